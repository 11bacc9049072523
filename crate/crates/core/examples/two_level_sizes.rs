//! `(F1 (+) D', 0 (+) F2)`: two- and three-level columns with constant lambda.

use ssd::catalog::embedded;
use ssd::constructors::construct_t3;
use ssd::generators::EquidistantDesign;

fn main() -> ssd::Result<()> {
    let f1 = EquidistantDesign::certify(embedded("table4_f1")?.design()?)?;
    let f2 = EquidistantDesign::certify(embedded("table4_f2")?.design()?)?;
    let d = embedded("table4_d")?.difference()?;
    let c = construct_t3(&f1, &f2, &d)?;
    println!("{} lambda {:?}", c.design.shape(), c.report.profile.constant_lambda());
    println!("E(f_NOD) {}", c.report.efnod_certificate.text());
    println!("chi2     {}", c.report.chisq_certificate.text());
    Ok(())
}
