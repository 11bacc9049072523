//! Seeded search for small equidistant designs.

use ssd::generators::{alias_class_count, search_equidistant, SearchBudget, SearchOutcome};

fn main() -> ssd::Result<()> {
    for (n, m, q, lambda) in [(6, 10, 2, 4), (6, 10, 3, 2), (8, 14, 2, 6), (6, 7, 3, 1)] {
        let classes = alias_class_count(n, q as usize).unwrap();
        match search_equidistant(n, m, q, lambda, true, SearchBudget::default(), 7)? {
            SearchOutcome::Found(f) => {
                println!("F({n}, {q}^{m}) lambda {lambda}: found ({classes} classes)");
                for i in 0..f.n() {
                    println!("  {:?}", f.design().row(i));
                }
            }
            SearchOutcome::NotFound(why) => println!("F({n}, {q}^{m}) lambda {lambda}: {why}"),
        }
    }
    Ok(())
}
