use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::oa::{dot, field_vectors};
use crate::algebra::{GaloisField, Group};
use crate::error::{Error, Result};
use crate::matrix::{kronecker_sum, DesignMatrix, Matrix};

/// An `rq x c` array over a group of order `q` in which every column
/// difference contains each group element exactly `r` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMatrix {
    matrix: Matrix,
    group: Group,
    r: usize,
}

/// Returns `r`, or the first column pair whose difference is not uniform.
fn verify(matrix: &Matrix, group: &Group) -> Result<usize> {
    let q = group.order() as usize;
    let rows = matrix.rows();
    if rows == 0 || rows % q != 0 {
        return Err(Error::verification(format!("{rows} rows is not a positive multiple of {q}")));
    }
    if let Some(&v) = matrix.data().iter().find(|&&v| v as usize >= q) {
        return Err(Error::verification(format!("entry {v} outside {}", group.name())));
    }
    let r = rows / q;
    let mut counts = vec![0usize; q];
    for i in 0..matrix.cols() {
        for j in i + 1..matrix.cols() {
            counts.iter_mut().for_each(|c| *c = 0);
            for s in 0..rows {
                counts[group.sub(matrix.get(s, i), matrix.get(s, j)) as usize] += 1;
            }
            if counts.iter().any(|&c| c != r) {
                return Err(Error::verification(format!(
                    "difference of columns {} and {} is not uniform over {}",
                    i + 1,
                    j + 1,
                    group.name()
                )));
            }
        }
    }
    Ok(r)
}

impl DifferenceMatrix {
    /// Verifies the difference property before accepting the matrix.
    pub fn new(matrix: Matrix, group: Group) -> Result<Self> {
        let r = verify(&matrix, &group)?;
        Ok(Self { matrix, group, r })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn q(&self) -> u32 {
        self.group.order()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn is_normalized(&self) -> bool {
        self.matrix.cols() > 0 && (0..self.rows()).all(|s| self.matrix.get(s, 0) == 0)
    }

    /// `D'`, the transpose used in Kronecker sums.
    pub fn transpose(&self) -> Matrix {
        self.matrix.transpose()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.matrix.select_columns(idx)?, self.group.clone())
    }

    /// Label such as `ND(12, 4, 3)` or `D(9, 4, 3)`.
    pub fn label(&self) -> String {
        let tag = if self.is_normalized() { "ND" } else { "D" };
        format!("{tag}({}, {}, {})", self.rows(), self.cols(), self.q())
    }
}

/// Reads a strength-2 orthogonal array as a difference matrix over `group`.
pub fn dm_from_oa(oa: &DesignMatrix, group: &Group) -> Result<DifferenceMatrix> {
    if let Some(j) = oa.levels().iter().position(|&q| q != group.order()) {
        return Err(Error::invalid(format!(
            "column {} has {} levels but {} has order {}",
            j + 1,
            oa.levels()[j],
            group.name(),
            group.order()
        )));
    }
    DifferenceMatrix::new(oa.to_matrix(), group.clone())
}

/// `ND(q, q, q)` with entry `(i, j) = i * j` in GF(q).
pub fn dm_multiplication_table(q: u32) -> Result<DifferenceMatrix> {
    let field = GaloisField::of_order(q)?;
    let data = (0..q * q).map(|k| field.mul(k / q, k % q)).collect();
    let group = Group::for_order(q)?;
    DifferenceMatrix::new(Matrix::new(q as usize, q as usize, data)?, group)
}

/// `ND(q^t, q^t, q)`: rows and columns run over `GF(q)^t`, entries are inner products.
pub fn dm_linear(q: u32, t: u32) -> Result<DifferenceMatrix> {
    if t == 0 || (q as u64).pow(t) > 4096 {
        return Err(Error::invalid(format!("unsupported linear difference matrix {q}^{t}")));
    }
    let field = GaloisField::of_order(q)?;
    let v = field_vectors(q, t);
    let n = v.len();
    let mut data = Vec::with_capacity(n * n);
    for a in &v {
        data.extend(v.iter().map(|b| dot(&field, a, b)));
    }
    DifferenceMatrix::new(Matrix::new(n, n, data)?, Group::for_order(q)?)
}

/// Subtracts the first column from every column.
pub fn normalize_dm(d: &DifferenceMatrix) -> DifferenceMatrix {
    let mut m = d.matrix.clone();
    for s in 0..m.rows() {
        let base = m.get(s, 0);
        for j in 0..m.cols() {
            m.set(s, j, d.group.sub(m.get(s, j), base));
        }
    }
    DifferenceMatrix { matrix: m, group: d.group.clone(), r: d.r }
}

/// Kronecker sum of two difference matrices over the same group.
pub fn dm_kronecker(d1: &DifferenceMatrix, d2: &DifferenceMatrix) -> Result<DifferenceMatrix> {
    if d1.group != d2.group {
        return Err(Error::invalid(format!("groups differ: {} vs {}", d1.group.name(), d2.group.name())));
    }
    let m = kronecker_sum(&d1.matrix, &d2.matrix, &d1.group)?;
    DifferenceMatrix::new(m, d1.group.clone())
        .map_err(|e| Error::internal(format!("Kronecker sum lost the difference property: {e}")))
}

/// Adds an all-zero first column; every existing column must be balanced.
pub fn prepend_zero_column(d: &DifferenceMatrix) -> Result<DifferenceMatrix> {
    let zero = vec![0u32; d.rows()];
    let cols: Vec<Vec<u32>> = std::iter::once(zero).chain((0..d.cols()).map(|j| d.matrix.column(j))).collect();
    DifferenceMatrix::new(Matrix::from_columns(&cols)?, d.group.clone())
}

pub fn distinct_rows(d: &DifferenceMatrix) -> bool {
    let mut seen = HashSet::new();
    (0..d.rows()).all(|s| seen.insert(d.matrix.row(s)))
}

/// Removes repeated rows, keeping first occurrences, provided the result is
/// still a difference matrix.
pub fn drop_duplicate_rows(d: &DifferenceMatrix) -> Result<DifferenceMatrix> {
    let mut seen = HashSet::new();
    let keep: Vec<usize> = (0..d.rows()).filter(|&s| seen.insert(d.matrix.row(s))).collect();
    let m = d.matrix.select_rows(&keep)?;
    DifferenceMatrix::new(m, d.group.clone())
        .map_err(|e| Error::verification(format!("dropping duplicate rows breaks the difference property: {e}")))
}

fn distinct_row_classes(m: &Matrix, cols: &[usize]) -> usize {
    let mut seen = HashSet::new();
    for s in 0..m.rows() {
        seen.insert(cols.iter().map(|&j| m.get(s, j)).collect::<Vec<_>>());
    }
    seen.len()
}

/// Chooses `c` columns, always including the first, so that rows are pairwise
/// distinct. Greedy on the number of distinct partial rows.
pub fn select_distinct_row_columns(d: &DifferenceMatrix, c: usize) -> Option<DifferenceMatrix> {
    if c == 0 || c > d.cols() {
        return None;
    }
    let mut chosen = vec![0usize];
    while chosen.len() < c {
        let next = (0..d.cols())
            .filter(|j| !chosen.contains(j))
            .max_by_key(|&j| {
                let mut trial = chosen.clone();
                trial.push(j);
                (distinct_row_classes(&d.matrix, &trial), std::cmp::Reverse(j))
            })?;
        chosen.push(next);
    }
    chosen.sort_unstable();
    let out = d.select_columns(&chosen).ok()?;
    distinct_rows(&out).then_some(out)
}

/// Randomised search for a normalized difference matrix with distinct rows.
/// Builds columns one at a time, restarting when stuck.
pub fn search_difference_matrix(
    rows: usize,
    cols: usize,
    group: &Group,
    seed: u64,
    restarts: u32,
) -> Option<DifferenceMatrix> {
    let q = group.order() as usize;
    if rows % q != 0 || cols == 0 {
        return None;
    }
    let r = rows / q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<u32> = (0..rows).map(|s| (s / r) as u32).collect();
    let fits = |columns: &[Vec<u32>], cand: &[u32]| {
        columns.iter().all(|c| {
            let mut counts = vec![0usize; q];
            for (&a, &b) in c.iter().zip(cand) {
                counts[group.sub(a, b) as usize] += 1;
            }
            counts.iter().all(|&k| k == r)
        })
    };
    for _ in 0..restarts {
        let mut columns = vec![vec![0u32; rows]];
        let mut stuck = false;
        while columns.len() < cols && !stuck {
            stuck = true;
            for _ in 0..20_000 {
                let mut cand = base.clone();
                cand.shuffle(&mut rng);
                if fits(&columns, &cand) {
                    columns.push(cand);
                    stuck = false;
                    break;
                }
            }
        }
        if stuck {
            continue;
        }
        let m = Matrix::from_columns(&columns).ok()?;
        if let Ok(d) = DifferenceMatrix::new(m, group.clone()) {
            if distinct_rows(&d) {
                return Some(d);
            }
        }
    }
    None
}
