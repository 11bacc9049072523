//! Pairwise f_NOD, contingency tables and the bounds for combined columns.

use ssd::catalog::embedded;
use ssd::criteria::{format_rational, PairNonorthogonality};
use ssd::verify::{check_nonorthogonality_bound, BoundMode};

fn main() -> ssd::Result<()> {
    let f = embedded("table3")?.design()?;
    let p = PairNonorthogonality::new(&f, 0, 1)?;
    println!("columns 1, 2: f_NOD = {}", format_rational(&p.fnod));
    for a in 0..p.q_i {
        let row: Vec<u64> = (0..p.q_j).map(|b| p.cell(a, b)).collect();
        println!("  {row:?}");
    }

    let g = embedded("table4_f2")?.design()?;
    let (f1, f3) = (g.column(0), g.column(1));
    let (f2, f4) = (g.column(2), g.column(3));
    for mode in [BoundMode::A, BoundMode::B, BoundMode::C] {
        let b = check_nonorthogonality_bound(f1, f2, f3, f4, mode)?;
        println!("{mode:?}: {} vs {} (holds: {})", format_rational(&b.lhs), format_rational(&b.rhs), b.holds);
    }
    Ok(())
}
