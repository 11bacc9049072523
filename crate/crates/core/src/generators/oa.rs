use crate::algebra::GaloisField;
use crate::criteria::contingency;
use crate::error::{Error, Result};
use crate::matrix::{DesignMatrix, LevelColumn};

fn vectors(q: u32, t: u32) -> Vec<Vec<u32>> {
    (0..q.pow(t))
        .map(|mut x| {
            let mut v = vec![0u32; t as usize];
            for d in v.iter_mut().rev() {
                *d = x % q;
                x /= q;
            }
            v
        })
        .collect()
}

pub(crate) fn field_vectors(q: u32, t: u32) -> Vec<Vec<u32>> {
    vectors(q, t)
}

pub(crate) fn dot(field: &GaloisField, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// Saturated `L_{q^t}(q^{(q^t-1)/(q-1)})`: rows are all of `GF(q)^t` in
/// lexicographic order, columns the directions whose first nonzero entry is 1.
pub fn rao_hamming_oa(q: u32, t: u32) -> Result<DesignMatrix> {
    if t < 2 {
        return Err(Error::invalid("Rao-Hamming arrays need t >= 2"));
    }
    if (q as u64).pow(t) > 1 << 20 {
        return Err(Error::invalid(format!("{q}^{t} runs is too large")));
    }
    let field = GaloisField::of_order(q)?;
    let rows = vectors(q, t);
    let directions: Vec<&Vec<u32>> = rows
        .iter()
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect();
    let columns = directions
        .iter()
        .map(|d| LevelColumn { values: rows.iter().map(|v| dot(&field, v, d)).collect(), levels: q })
        .collect();
    DesignMatrix::from_columns(columns)
}

/// First column pair whose contingency table is not uniform.
pub fn strength2_violation(f: &DesignMatrix) -> Option<(usize, usize)> {
    for i in 0..f.m() {
        for j in i + 1..f.m() {
            let (a, b) = (f.column(i), f.column(j));
            let cells = (a.levels * b.levels) as usize;
            if f.n() % cells != 0 {
                return Some((i, j));
            }
            let t = contingency(a, b).ok()?;
            if t.iter().any(|&c| c as usize != f.n() / cells) {
                return Some((i, j));
            }
        }
    }
    None
}
