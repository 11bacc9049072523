//! `F (+) D'` from a nine-run three-level design and ND(3, 2, 3).

use ssd::catalog::embedded;
use ssd::constructors::construct_t2;
use ssd::generators::EquidistantDesign;

fn main() -> ssd::Result<()> {
    let f = EquidistantDesign::certify(embedded("table1_f")?.design()?)?;
    let d = embedded("table1_d")?.difference()?;
    let c = construct_t2(&f, &d)?;
    println!("plan: {} lambda {:?}", c.plan.shape(), c.plan.lambda_values);
    for i in 0..c.design.n() {
        let row: Vec<String> = c.design.row(i).iter().map(u32::to_string).collect();
        println!("  {}", row.join(" "));
    }
    print!("{}", c.report.to_text());
    Ok(())
}
