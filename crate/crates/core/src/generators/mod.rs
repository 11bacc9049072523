//! Source ingredients: orthogonal arrays, difference matrices and equidistant designs.

mod dm;
mod oa;
mod search;

pub use dm::{
    distinct_rows, dm_from_oa, dm_kronecker, dm_linear, dm_multiplication_table, drop_duplicate_rows,
    normalize_dm, prepend_zero_column, search_difference_matrix, select_distinct_row_columns, DifferenceMatrix,
};
pub use oa::{rao_hamming_oa, strength2_violation};
pub use search::{alias_class_count, search_equidistant, SearchBudget, SearchOutcome};

use crate::criteria::{aliased_pairs, coincidence_profile};
use crate::error::{Error, Result};
use crate::matrix::DesignMatrix;

/// A design whose row pairs all share the same coincidence number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquidistantDesign {
    design: DesignMatrix,
    lambda: u64,
    alias_free: bool,
}

impl EquidistantDesign {
    /// Profiles the design and accepts it only if `lambda` is constant.
    pub fn certify(design: DesignMatrix) -> Result<Self> {
        if design.n() < 2 {
            return Err(Error::invalid("an equidistant design needs at least two runs"));
        }
        let profile = coincidence_profile(&design);
        let lambda = profile.constant_lambda().ok_or_else(|| {
            let vals = profile.lambda_values();
            let (a, b) = (profile.lambda[&vals[0]].witness, profile.lambda[vals.last().unwrap()].witness);
            Error::verification(format!(
                "coincidence numbers not constant: {vals:?} (rows {}/{} vs {}/{})",
                a.0 + 1,
                a.1 + 1,
                b.0 + 1,
                b.1 + 1
            ))
        })?;
        let alias_free = aliased_pairs(&design).is_empty();
        Ok(Self { design, lambda, alias_free })
    }

    /// Like [`certify`](Self::certify) but also rejects fully aliased columns.
    pub fn certify_alias_free(design: DesignMatrix) -> Result<Self> {
        let e = Self::certify(design)?;
        if let Some(&(i, j)) = aliased_pairs(&e.design).first() {
            return Err(Error::verification(format!("columns {} and {} are fully aliased", i + 1, j + 1)));
        }
        Ok(e)
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn into_design(self) -> DesignMatrix {
        self.design
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn alias_free(&self) -> bool {
        self.alias_free
    }

    pub fn n(&self) -> usize {
        self.design.n()
    }

    pub fn m(&self) -> usize {
        self.design.m()
    }

    /// The common level count, if the design is symmetric.
    pub fn q(&self) -> Option<u32> {
        let l = self.design.levels();
        l.iter().all(|&q| q == l[0]).then(|| l[0])
    }

    /// Level-permutes every column so that the given row is all zeros.
    pub fn with_zero_row(&self, row: usize) -> Self {
        Self { design: self.design.zero_row(row), lambda: self.lambda, alias_free: self.alias_free }
    }
}
