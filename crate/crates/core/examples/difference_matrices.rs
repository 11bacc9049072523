//! Difference matrices from field multiplication, inner products, strength-2
//! arrays and Kronecker sums.

use ssd::algebra::Group;
use ssd::generators::{dm_from_oa, dm_kronecker, dm_linear, dm_multiplication_table, normalize_dm, rao_hamming_oa};

fn show(name: &str, d: &ssd::generators::DifferenceMatrix) {
    println!("{name}: {} (r = {}, normalized: {})", d.label(), d.r(), d.is_normalized());
}

fn main() -> ssd::Result<()> {
    let m3 = dm_multiplication_table(3)?;
    show("GF(3) multiplication", &m3);
    for s in 0..m3.rows() {
        println!("  {:?}", m3.matrix().row(s));
    }

    show("inner products over GF(2)^3", &dm_linear(2, 3)?);
    show("Kronecker sum", &dm_kronecker(&m3, &m3)?);

    let oa = rao_hamming_oa(2, 3)?;
    let d = dm_from_oa(&oa, &Group::for_order(2)?)?;
    show("from an 8-run array", &d);
    show("normalized", &normalize_dm(&d));
    Ok(())
}
