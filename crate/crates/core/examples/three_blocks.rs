//! Three-block construction with difference matrices read from `sources/`.
//!
//! Run from the repository root: `cargo run --example three_blocks`.

use std::path::Path;

use ssd::catalog::{embedded, ingest_difference};
use ssd::constructors::construct_t5;
use ssd::generators::{search_equidistant, select_distinct_row_columns, EquidistantDesign, SearchBudget};

fn main() -> ssd::Result<()> {
    let sources = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../sources");
    let f1 = EquidistantDesign::certify(embedded("table4_f1")?.design()?)?;
    let f2 = search_equidistant(6, 10, 2, 4, true, SearchBudget::default(), 7)?
        .found()
        .expect("F(6, 2^10) is within the search budget");
    let f4 = EquidistantDesign::certify(embedded("table4_f2")?.design()?)?.with_zero_row(0);
    let l12 = ingest_difference(&sources.join("L12.design"))?;
    let d3 = select_distinct_row_columns(&l12, 6).expect("six columns with distinct rows");
    let d4 = ingest_difference(&sources.join("ND_12_4_3.design"))?;

    let c = construct_t5(&f1, &f2, &f1.with_zero_row(0), &f4, &d3, &d4)?;
    println!("{} lambda {:?}", c.design.shape(), c.report.profile.constant_lambda());
    println!("aliased pairs: {}", c.report.aliased_pairs.len());
    println!("{}", c.report.efnod_certificate.text());
    Ok(())
}
