//! Builds every catalog instance whose sources need no external files.

use ssd::catalog::{build_instance, Catalog, Resolver};
use ssd::Error;

fn main() -> ssd::Result<()> {
    let catalog = Catalog::builtin();
    let mut resolver = Resolver::new(None, 7);
    for inst in catalog.instances()? {
        let mut ready = true;
        for req in inst.requirements() {
            ready &= resolver.availability(req)?.usable();
        }
        if !ready {
            continue;
        }
        match build_instance(&inst, &mut resolver) {
            Ok(b) => println!("{:<10} {:<28} {}", b.id, b.construction.design.shape(), inst.entry.criterion()),
            Err(Error::MissingSource { what, .. }) => println!("{:<10} search gave up on {what}", inst.id()),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
