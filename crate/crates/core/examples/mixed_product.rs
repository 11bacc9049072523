//! Mixed product of two equidistant designs: every column pairs one column of
//! each source into a `q1 q2`-level column.

use ssd::constructors::construct_t4;
use ssd::generators::{rao_hamming_oa, EquidistantDesign};

fn main() -> ssd::Result<()> {
    let f1 = EquidistantDesign::certify(rao_hamming_oa(2, 2)?)?;
    let f2 = EquidistantDesign::certify(rao_hamming_oa(3, 2)?)?;
    let c = construct_t4(&f1, &f2)?;
    println!("{}", c.design.shape());
    println!("predicted lambda {:?}", c.plan.lambda_values);
    println!("built lambda {:?}", c.report.lambda_counts());
    println!("E(f_NOD) = {}", ssd::criteria::format_rational(&c.report.efnod));
    Ok(())
}
