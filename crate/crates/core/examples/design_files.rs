//! Writing a design file with metadata and reading it back with a declared property.

use ssd::catalog::{ingest, write_design};
use ssd::generators::rao_hamming_oa;

fn main() -> ssd::Result<()> {
    let oa = rao_hamming_oa(2, 3)?;
    let dir = std::env::temp_dir().join("ssd-example");
    std::fs::create_dir_all(&dir).map_err(|e| ssd::Error::io(dir.clone(), e))?;
    let path = dir.join("l8.design");
    write_design(&path, &oa, &["declare: strength2".into(), "declare: lambda 3".into()])?;
    print!("{}", std::fs::read_to_string(&path).unwrap());

    let back = ingest(&path)?;
    assert_eq!(back.design, oa);
    println!("verified: {:?}", back.verified);
    Ok(())
}
