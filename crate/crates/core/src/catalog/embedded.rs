//! Reference designs and worked results, stored run by run.

use crate::algebra::Group;
use crate::error::{Error, Result};
use crate::generators::DifferenceMatrix;
use crate::matrix::{DesignMatrix, Matrix};

/// Saturated nine-run three-level array, stored run by run (often shown transposed).
pub const T1_F: [[u32; 4]; 9] = [
    [0, 0, 0, 0],
    [0, 1, 1, 2],
    [0, 2, 2, 1],
    [1, 0, 1, 1],
    [1, 1, 2, 0],
    [1, 2, 0, 2],
    [2, 0, 2, 2],
    [2, 1, 0, 1],
    [2, 2, 1, 0],
];

/// Normalized difference matrix ND(3, 2, 3) over GF(3).
pub const T1_D: [[u32; 2]; 3] = [
    [0, 0],
    [0, 1],
    [0, 2],
];

/// Symmetric 18-run result built from `T1_F` and `T1_D`.
pub const T3_RESULT: [[u32; 12]; 18] = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2],
    [0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2],
    [0, 1, 2, 1, 2, 0, 1, 2, 0, 2, 0, 1],
    [0, 0, 0, 2, 2, 2, 2, 2, 2, 1, 1, 1],
    [0, 1, 2, 2, 0, 1, 2, 0, 1, 1, 2, 0],
    [1, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1],
    [1, 2, 0, 0, 1, 2, 1, 2, 0, 1, 2, 0],
    [1, 1, 1, 1, 1, 1, 2, 2, 2, 0, 0, 0],
    [1, 2, 0, 1, 2, 0, 2, 0, 1, 0, 1, 2],
    [1, 1, 1, 2, 2, 2, 0, 0, 0, 2, 2, 2],
    [1, 2, 0, 2, 0, 1, 0, 1, 2, 2, 0, 1],
    [2, 2, 2, 0, 0, 0, 2, 2, 2, 2, 2, 2],
    [2, 0, 1, 0, 1, 2, 2, 0, 1, 2, 0, 1],
    [2, 2, 2, 1, 1, 1, 0, 0, 0, 1, 1, 1],
    [2, 0, 1, 1, 2, 0, 0, 1, 2, 1, 2, 0],
    [2, 2, 2, 2, 2, 2, 1, 1, 1, 0, 0, 0],
    [2, 0, 1, 2, 0, 1, 1, 2, 0, 0, 1, 2],
];

/// Four-run two-level orthogonal array.
pub const T4_F1: [[u32; 3]; 4] = [
    [0, 0, 0],
    [0, 1, 1],
    [1, 0, 1],
    [1, 1, 0],
];

/// Six-run three-level equidistant design with coincidence number 1.
pub const T4_F2: [[u32; 5]; 6] = [
    [0, 0, 0, 0, 0],
    [0, 1, 1, 1, 1],
    [1, 0, 2, 2, 1],
    [1, 2, 0, 1, 2],
    [2, 1, 2, 0, 2],
    [2, 2, 1, 2, 0],
];

/// ND(8, 6, 2) over GF(2), stored un-transposed (often shown transposed).
pub const T4_DT: [[u32; 6]; 8] = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 1],
    [0, 1, 0, 0, 1, 1],
    [0, 1, 1, 1, 1, 0],
    [0, 1, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 1],
    [0, 0, 1, 0, 1, 1],
    [0, 0, 0, 1, 1, 0],
];

/// Mixed 24-run result built from `T4_F1`, `T4_F2` and `T4_DT`.
pub const T5_RESULT: [[u32; 29]; 24] = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1, 1],
    [0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 2, 2, 1],
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 2, 0, 1, 2],
    [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 2, 1, 2, 0, 2],
    [0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 2, 2, 1, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1],
    [0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 2, 2, 1],
    [0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 2, 0, 1, 2],
    [0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 2, 1, 2, 0, 2],
    [0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 2, 2, 1, 2, 0],
    [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 2, 2, 1],
    [1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 2, 0, 1, 2],
    [1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 2, 1, 2, 0, 2],
    [1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 2, 2, 1, 2, 0],
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 2, 2, 1],
    [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 2, 0, 1, 2],
    [1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 2, 1, 2, 0, 2],
    [1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 2, 2, 1, 2, 0],
];

/// An embedded table: either a design or a difference matrix.
#[derive(Debug, Clone)]
pub enum Embedded {
    Design(DesignMatrix),
    Difference(DifferenceMatrix),
}

impl Embedded {
    pub fn design(self) -> Result<DesignMatrix> {
        match self {
            Embedded::Design(d) => Ok(d),
            Embedded::Difference(d) => Err(Error::invalid(format!("{} is a difference matrix", d.label()))),
        }
    }

    pub fn difference(self) -> Result<DifferenceMatrix> {
        match self {
            Embedded::Difference(d) => Ok(d),
            Embedded::Design(d) => Err(Error::invalid(format!("{} is not a difference matrix", d.shape()))),
        }
    }
}

/// Canonical names with their accepted aliases.
pub const NAMES: [(&str, &str); 7] = [
    ("T1_F", "table1_f"),
    ("T1_D", "table1_d"),
    ("T3_RESULT", "table3"),
    ("T4_F1", "table4_f1"),
    ("T4_F2", "table4_f2"),
    ("T4_Dt", "table4_d"),
    ("T5_RESULT", "table5"),
];

fn rows<const M: usize>(data: &[[u32; M]]) -> Result<Matrix> {
    Matrix::from_rows(data)
}

fn design<const M: usize>(data: &[[u32; M]], q: u32) -> Result<DesignMatrix> {
    DesignMatrix::new(&rows(data)?, vec![q; M])
}

/// Looks up an embedded table by canonical name or alias (case-insensitive).
pub fn embedded(name: &str) -> Result<Embedded> {
    let key = NAMES
        .iter()
        .find(|(canon, alias)| canon.eq_ignore_ascii_case(name) || alias.eq_ignore_ascii_case(name))
        .map(|(canon, _)| *canon)
        .ok_or_else(|| {
            let known: Vec<&str> = NAMES.iter().map(|(c, _)| *c).collect();
            Error::invalid(format!("unknown embedded table {name:?} (known: {})", known.join(", ")))
        })?;
    Ok(match key {
        "T1_F" => Embedded::Design(design(&T1_F, 3)?),
        "T1_D" => Embedded::Difference(DifferenceMatrix::new(rows(&T1_D)?, Group::for_order(3)?)?),
        "T3_RESULT" => Embedded::Design(design(&T3_RESULT, 3)?),
        "T4_F1" => Embedded::Design(design(&T4_F1, 2)?),
        "T4_F2" => Embedded::Design(design(&T4_F2, 3)?),
        "T4_Dt" => Embedded::Difference(DifferenceMatrix::new(rows(&T4_DT)?, Group::for_order(2)?)?),
        _ => {
            let mut levels = vec![2u32; 24];
            levels.extend([3u32; 5]);
            Embedded::Design(DesignMatrix::new(&rows(&T5_RESULT)?, levels)?)
        }
    })
}

/// Metadata lines recorded when an embedded table is exported.
pub fn provenance(name: &str) -> Vec<String> {
    let mut out = vec![format!("embedded: {name}")];
    if name.eq_ignore_ascii_case("T1_F") || name.eq_ignore_ascii_case("T4_Dt") {
        out.push("orientation: stored un-transposed; usually shown transposed".to_string());
    }
    out
}
