//! Coincidence numbers, nonorthogonality criteria and full aliasing.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{Column, DesignMatrix, GramMatrix};

/// Exact rational used for every criterion value.
pub type Rational = Ratio<i128>;

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Number of row pairs taking each value, plus the first pair seen with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueStat {
    pub count: u64,
    pub witness: (usize, usize),
}

/// Multisets of `lambda_ij` and `omega_ij` over unordered row pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoincidenceProfile {
    pub n: usize,
    pub lambda: BTreeMap<u64, ValueStat>,
    pub omega: BTreeMap<u64, ValueStat>,
}

impl CoincidenceProfile {
    pub fn pair_count(&self) -> u64 {
        self.lambda.values().map(|s| s.count).sum()
    }

    pub fn lambda_sum(&self) -> u64 {
        self.lambda.iter().map(|(v, s)| v * s.count).sum()
    }

    pub fn lambda_values(&self) -> Vec<u64> {
        self.lambda.keys().copied().collect()
    }

    pub fn omega_values(&self) -> Vec<u64> {
        self.omega.keys().copied().collect()
    }

    /// The common value when every pair has the same `lambda`.
    pub fn constant_lambda(&self) -> Option<u64> {
        (self.lambda.len() == 1).then(|| *self.lambda.keys().next().unwrap())
    }

    pub fn constant_omega(&self) -> Option<u64> {
        (self.omega.len() == 1).then(|| *self.omega.keys().next().unwrap())
    }
}

/// Full `n x n` coincidence matrices (`lambda`, `omega`), row-major, diagonal included.
pub(crate) fn coincidence_matrices(f: &DesignMatrix) -> (Vec<u32>, Vec<u64>) {
    let n = f.n();
    let mut lambda = vec![0u32; n * n];
    let mut omega = vec![0u64; n * n];
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for col in f.columns() {
        buckets.clear();
        buckets.resize(col.levels as usize, Vec::new());
        for (s, &v) in col.values.iter().enumerate() {
            buckets[v as usize].push(s);
        }
        for b in &buckets {
            for (k, &s) in b.iter().enumerate() {
                for &t in &b[k + 1..] {
                    lambda[s * n + t] += 1;
                    omega[s * n + t] += col.levels as u64;
                }
            }
        }
    }
    for s in 0..n {
        lambda[s * n + s] = f.m() as u32;
        omega[s * n + s] = f.levels().iter().map(|&q| q as u64).sum();
        for t in s + 1..n {
            lambda[t * n + s] = lambda[s * n + t];
            omega[t * n + s] = omega[s * n + t];
        }
    }
    (lambda, omega)
}

pub fn coincidence_profile(f: &DesignMatrix) -> CoincidenceProfile {
    let n = f.n();
    let (lambda, omega) = coincidence_matrices(f);
    let mut profile = CoincidenceProfile { n, lambda: BTreeMap::new(), omega: BTreeMap::new() };
    for s in 0..n {
        for t in s + 1..n {
            for (map, v) in [(&mut profile.lambda, lambda[s * n + t] as u64), (&mut profile.omega, omega[s * n + t])] {
                map.entry(v).or_insert(ValueStat { count: 0, witness: (s, t) }).count += 1;
            }
        }
    }
    profile
}

fn check_pair(a: Column<'_>, b: Column<'_>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("column lengths differ ({} vs {})", a.len(), b.len())));
    }
    a.check_balanced()?;
    b.check_balanced()
}

/// Contingency table `n_ab` as a row-major `q_a x q_b` vector.
pub fn contingency(a: Column<'_>, b: Column<'_>) -> Result<Vec<u64>> {
    check_pair(a, b)?;
    let qb = b.levels as usize;
    let mut t = vec![0u64; a.levels as usize * qb];
    for (&x, &y) in a.values.iter().zip(b.values) {
        t[x as usize * qb + y as usize] += 1;
    }
    Ok(t)
}

fn fnod_from_square_sum(sq: u64, n: usize, qa: u32, qb: u32) -> Rational {
    let den = qa as i128 * qb as i128;
    Rational::new(sq as i128 * den - (n as i128).pow(2), den)
}

/// `f_NOD` of a column pair: the squared deviation of its contingency table from uniform.
pub fn f_nod_pair(a: Column<'_>, b: Column<'_>) -> Result<Rational> {
    let t = contingency(a, b)?;
    let sq = t.iter().map(|c| c * c).sum();
    Ok(fnod_from_square_sum(sq, a.len(), a.levels, b.levels))
}

/// `f_NOD` through `tr(X_a' X_b X_b' X_a) - n^2 / (q_a q_b)`, the trace taken as
/// `sum_{s,t} (X_a X_a')_{st} (X_b X_b')_{ts}`.
pub fn f_nod_trace(a: Column<'_>, b: Column<'_>) -> Result<Rational> {
    check_pair(a, b)?;
    let (ga, gb) = (GramMatrix::of(a), GramMatrix::of(b));
    let n = a.len();
    let mut tr: u64 = 0;
    for s in 0..n {
        for t in 0..n {
            tr += (ga.get(s, t) * gb.get(t, s)) as u64;
        }
    }
    Ok(fnod_from_square_sum(tr, n, a.levels, b.levels))
}

/// Contingency table and `f_NOD` for columns `i` and `j` of a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairNonorthogonality {
    pub i: usize,
    pub j: usize,
    pub q_i: u32,
    pub q_j: u32,
    pub table: Vec<u64>,
    pub fnod: Rational,
}

impl PairNonorthogonality {
    pub fn new(f: &DesignMatrix, i: usize, j: usize) -> Result<Self> {
        if i >= f.m() || j >= f.m() {
            return Err(Error::invalid(format!("column index out of range (m = {})", f.m())));
        }
        let (a, b) = (f.column(i), f.column(j));
        let table = contingency(a, b)?;
        let fnod = f_nod_pair(a, b)?;
        Ok(Self { i, j, q_i: a.levels, q_j: b.levels, table, fnod })
    }

    pub fn cell(&self, a: u32, b: u32) -> u64 {
        self.table[(a * self.q_j + b) as usize]
    }
}

/// Results of one pass over all column pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseSummary {
    pub sum_fnod: Rational,
    pub sum_weighted_fnod: Rational,
    /// Largest pairwise `f_NOD` and the first pair attaining it.
    pub max_fnod: Option<(Rational, usize, usize)>,
}

/// Sums `f_NOD` and `q_i q_j f_NOD` over all column pairs by direct counting.
pub fn pairwise_summary(f: &DesignMatrix) -> PairwiseSummary {
    let n = f.n();
    let m = f.m();
    let mut by_kind: HashMap<(u32, u32), (u128, u64)> = HashMap::new();
    let mut best: Option<(i128, i128, usize, usize)> = None;
    let mut counts: Vec<u32> = Vec::new();
    for i in 0..m {
        let a = f.column(i);
        for j in i + 1..m {
            let b = f.column(j);
            let qb = b.levels as usize;
            counts.clear();
            counts.resize(a.levels as usize * qb, 0);
            for (&x, &y) in a.values.iter().zip(b.values) {
                counts[x as usize * qb + y as usize] += 1;
            }
            let sq: u64 = counts.iter().map(|&c| (c as u64) * (c as u64)).sum();
            let e = by_kind.entry((a.levels, b.levels)).or_insert((0, 0));
            e.0 += sq as u128;
            e.1 += 1;
            let den = a.levels as i128 * b.levels as i128;
            let num = sq as i128 * den - (n as i128).pow(2);
            let better = match best {
                None => true,
                Some((bn, bd, _, _)) => num * bd > bn * den,
            };
            if better {
                best = Some((num, den, i, j));
            }
        }
    }
    let mut sum_fnod = Rational::zero();
    let mut sum_weighted = Rational::zero();
    for ((qa, qb), (sq, pairs)) in by_kind {
        let den = qa as i128 * qb as i128;
        let total = Rational::new(sq as i128 * den - pairs as i128 * (n as i128).pow(2), den);
        sum_fnod += total;
        sum_weighted += total * Rational::from_integer(den);
    }
    PairwiseSummary {
        sum_fnod,
        sum_weighted_fnod: sum_weighted,
        max_fnod: best.map(|(num, den, i, j)| (Rational::new(num, den), i, j)),
    }
}

fn need_two_columns(f: &DesignMatrix) -> Result<()> {
    if f.m() < 2 {
        return Err(Error::invalid("criterion needs at least two columns"));
    }
    Ok(())
}

fn pair_average(f: &DesignMatrix, sum: Rational) -> Rational {
    let m = f.m() as i128;
    sum * Rational::new(2, m * (m - 1))
}

/// `E(f_NOD)`, the average `f_NOD` over column pairs.
pub fn e_fnod(f: &DesignMatrix) -> Result<Rational> {
    need_two_columns(f)?;
    Ok(pair_average(f, pairwise_summary(f).sum_fnod))
}

/// `chi^2 = sum_{i<j} q_i q_j f_NOD / n`.
pub fn chi_square(f: &DesignMatrix) -> Result<Rational> {
    need_two_columns(f)?;
    Ok(pairwise_summary(f).sum_weighted_fnod / Rational::from_integer(f.n() as i128))
}

/// `sum_{i<j} n^2 / (q_i q_j)`.
fn uniform_baseline(f: &DesignMatrix) -> Rational {
    let n2 = Rational::from_integer((f.n() as i128).pow(2));
    let inv: Vec<Rational> = f.levels().iter().map(|&q| Rational::new(1, q as i128)).collect();
    let s: Rational = inv.iter().sum();
    let s2: Rational = inv.iter().map(|x| x * x).sum();
    n2 * (s * s - s2) / Rational::from_integer(2)
}

/// `E(f_NOD)` through the trace identity, summing the traces over column
/// pairs from the row coincidence numbers: `sum_{i<j} tr_ij = 1/2 sum_{s,t} (lambda_st^2 - lambda_st)`.
pub fn e_fnod_via_trace(f: &DesignMatrix) -> Result<Rational> {
    need_two_columns(f)?;
    let (lambda, _) = coincidence_matrices(f);
    let twice: u128 = lambda.iter().map(|&l| (l as u128) * (l as u128) - l as u128).sum();
    let traces = Rational::from_integer((twice / 2) as i128);
    Ok(pair_average(f, traces - uniform_baseline(f)))
}

/// `chi^2` through the weighted coincidences:
/// `sum_{i<j} q_i q_j tr_ij = 1/2 (sum_{s,t} omega_st^2 - n^2 sum_k q_k)`.
pub fn chi_square_via_trace(f: &DesignMatrix) -> Result<Rational> {
    need_two_columns(f)?;
    let (_, omega) = coincidence_matrices(f);
    let n = f.n() as u128;
    let sq: u128 = omega.iter().map(|&w| (w as u128) * (w as u128)).sum();
    let qsum: u128 = f.levels().iter().map(|&q| q as u128).sum();
    let weighted_traces = Rational::from_integer(((sq - n * n * qsum) / 2) as i128);
    let m = f.m() as i128;
    let baseline = Rational::from_integer((f.n() as i128).pow(2) * m * (m - 1) / 2);
    Ok((weighted_traces - baseline) / Rational::from_integer(f.n() as i128))
}

/// True when one column is a level permutation of the other, decided by
/// comparing gram matrices. Columns with different level counts are never aliased.
pub fn fully_aliased(a: Column<'_>, b: Column<'_>) -> bool {
    a.levels == b.levels && a.len() == b.len() && GramMatrix::of(a) == GramMatrix::of(b)
}

/// All fully aliased column pairs `(i, j)`, `i < j`.
pub fn aliased_pairs(f: &DesignMatrix) -> Vec<(usize, usize)> {
    let mut classes: HashMap<(u32, GramMatrix), Vec<usize>> = HashMap::new();
    for (j, col) in f.columns().enumerate() {
        classes.entry((col.levels, GramMatrix::of(col))).or_default().push(j);
    }
    let mut out: Vec<(usize, usize)> = classes
        .values()
        .flat_map(|idx| {
            idx.iter()
                .enumerate()
                .flat_map(move |(k, &i)| idx[k + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    out.sort_unstable();
    out
}
