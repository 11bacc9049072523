//! Arithmetic in GF(8) and the additive groups used for Kronecker sums.

use ssd::algebra::{find_irreducible, GaloisField, Group};

fn main() -> ssd::Result<()> {
    let g = find_irreducible(2, 3)?;
    println!("modulus coefficients (constant first): {g:?}");

    let f = GaloisField::of_order(8)?;
    println!("multiplication table of GF(8):");
    for a in 0..8 {
        let row: Vec<String> = (0..8).map(|b| f.mul(a, b).to_string()).collect();
        println!("  {}", row.join(" "));
    }
    for a in 1..8 {
        println!("  {a}^-1 = {}", f.inv(a).unwrap());
    }

    // orders with no field fall back to a cyclic group
    for q in [4, 6] {
        let grp = Group::for_order(q)?;
        println!("{}: 3 + 3 = {}, -1 = {}", grp.name(), grp.add(3, 3), grp.neg(1));
    }
    Ok(())
}
