//! Full report for a design, as text and as JSON.

use ssd::catalog::embedded;
use ssd::verify::full_report;

fn main() -> ssd::Result<()> {
    let design = embedded("table5")?.design()?;
    let report = full_report(&design)?;
    print!("{}", report.to_text());
    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
    Ok(())
}
