//! A saturated strength-2 array and its constant coincidence number.

use ssd::criteria::coincidence_profile;
use ssd::generators::{rao_hamming_oa, strength2_violation};

fn main() -> ssd::Result<()> {
    let oa = rao_hamming_oa(3, 2)?;
    println!("{}", oa.shape());
    for i in 0..oa.n() {
        println!("  {:?}", oa.row(i));
    }
    assert!(strength2_violation(&oa).is_none());
    let p = coincidence_profile(&oa);
    println!("lambda = {:?}", p.constant_lambda());

    let big = rao_hamming_oa(4, 3)?;
    println!("{} lambda = {:?}", big.shape(), coincidence_profile(&big).constant_lambda());
    Ok(())
}
