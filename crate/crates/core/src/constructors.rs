//! Kronecker-sum constructions and their predicted coincidence structure.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::Group;
use crate::criteria::fully_aliased;
use crate::error::{Error, Result};
use crate::generators::{distinct_rows, DifferenceMatrix, EquidistantDesign};
use crate::matrix::{kronecker_sum, mixed_combine, Column, DesignMatrix, Matrix};
use crate::verify::{adjacent_in_subset_sums, full_report, subset_sums, OptimalityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    T2,
    C1,
    T3,
    T4,
    T5,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::T2 => "T2",
            Method::C1 => "C1",
            Method::T3 => "T3",
            Method::T4 => "T4",
            Method::T5 => "T5",
        };
        f.write_str(s)
    }
}

/// Parameters of a symmetric equidistant source `F(n, q^m)` with coincidence `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Source {
    pub n: u64,
    pub m: u64,
    pub q: u64,
    pub lambda: u64,
}

impl Source {
    /// Derives `lambda` from `m (n/q - 1) = lambda (n - 1)`.
    pub fn new(n: u64, m: u64, q: u64) -> Result<Self> {
        if q < 2 || n < 2 || n % q != 0 {
            return Err(Error::invalid(format!("F({n}, {q}^{m}) cannot be balanced")));
        }
        let num = m * (n / q - 1);
        if num % (n - 1) != 0 {
            return Err(Error::invalid(format!(
                "F({n}, {q}^{m}) cannot be equidistant: m(n/q - 1) = {num} is not a multiple of n - 1"
            )));
        }
        Ok(Self { n, m, q, lambda: num / (n - 1) })
    }

    pub fn of(f: &EquidistantDesign) -> Result<Self> {
        let q = f.q().ok_or_else(|| Error::precondition("source design must have a single level count"))?;
        Ok(Self { n: f.n() as u64, m: f.m() as u64, q: q as u64, lambda: f.lambda() })
    }

    fn check(&self) -> Result<()> {
        let expect = Source::new(self.n, self.m, self.q)?;
        if expect.lambda != self.lambda {
            return Err(Error::invalid(format!(
                "F({}, {}^{}) has coincidence {} by the balance identity, not {}",
                self.n, self.q, self.m, expect.lambda, self.lambda
            )));
        }
        Ok(())
    }
}

/// Source parameters for [`plan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanParams {
    /// `F (+) D'` with `D = ND(rq, c, q)`.
    T2 { f: Source, r: u64, c: u64 },
    /// `(F1 (+) D', 0 (+) F2)` with `D = ND(r q1, n2, q1)`.
    T3 { f1: Source, f2: Source, r: u64 },
    /// Mixed product of `F1` and `F2`.
    T4 { f1: Source, f2: Source },
    /// Three blocks; `D3 = ND(r3 q3, n2, q3)`, `D4 = ND(r4 q4, n1, q4)`.
    T5 { f: [Source; 4], r3: u64, r4: u64 },
}

/// Predicted outcome of a construction, computed before building anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub method: Method,
    pub params: PlanParams,
    pub n: u64,
    /// `(levels, columns)` per block, in output column order.
    pub blocks: Vec<(u64, u64)>,
    pub lambda_values: BTreeSet<u64>,
    pub omega_values: BTreeSet<u64>,
    pub efnod_eligible: bool,
    pub chisq_eligible: bool,
}

impl ConstructionPlan {
    pub fn m(&self) -> u64 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    /// Level counts of every output column.
    pub fn levels(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|&(q, c)| std::iter::repeat_n(q as u32, c as usize)).collect()
    }

    /// Shape string with level counts in ascending order, e.g. `F(24, 2^24 3^5)`.
    pub fn shape(&self) -> String {
        let mut merged: Vec<(u64, u64)> = Vec::new();
        for &(q, c) in &self.blocks {
            match merged.iter_mut().find(|(l, _)| *l == q) {
                Some((_, k)) => *k += c,
                None => merged.push((q, c)),
            }
        }
        merged.sort();
        let parts: Vec<String> = merged.iter().map(|(q, c)| format!("{q}^{c}")).collect();
        format!("F({}, {})", self.n, parts.join(" "))
    }

    pub fn constant_lambda(&self) -> Option<u64> {
        (self.lambda_values.len() == 1).then(|| *self.lambda_values.first().unwrap())
    }

    pub fn constant_omega(&self) -> Option<u64> {
        (self.omega_values.len() == 1).then(|| *self.omega_values.first().unwrap())
    }
}

fn eligibility(lambda: &BTreeSet<u64>, omega: &BTreeSet<u64>, levels: &[u32]) -> (bool, bool) {
    let efnod = match (lambda.first(), lambda.last()) {
        (Some(lo), Some(hi)) => hi - lo <= 1,
        _ => true,
    };
    let chisq = match omega.len() {
        0 | 1 => true,
        2 => {
            let v: Vec<u64> = omega.iter().copied().collect();
            adjacent_in_subset_sums(&subset_sums(levels), v[0], v[1]).is_ok()
        }
        _ => false,
    };
    (efnod, chisq)
}

/// Predicts shape, coincidence values and certificate eligibility from parameters alone.
pub fn plan(params: PlanParams) -> Result<ConstructionPlan> {
    let mut lambda = BTreeSet::new();
    let mut omega = BTreeSet::new();
    let (method, n, blocks) = match params {
        PlanParams::T2 { f, r, c } => {
            f.check()?;
            if r == 0 || c == 0 {
                return Err(Error::invalid("r and c must be positive"));
            }
            if c >= 2 {
                lambda.insert(f.m * r);
                omega.insert(f.q * f.m * r);
            }
            lambda.insert(f.lambda * r * f.q);
            omega.insert(f.q * f.lambda * r * f.q);
            let saturated = (f.q - 1) * f.m == f.n - 1;
            let method = if saturated && r == 1 { Method::C1 } else { Method::T2 };
            (method, f.n * c, vec![(f.q, f.m * r * f.q)])
        }
        PlanParams::T3 { f1, f2, r } => {
            f1.check()?;
            f2.check()?;
            if r == 0 {
                return Err(Error::invalid("r must be positive"));
            }
            lambda.insert(f2.lambda + r * f1.m);
            lambda.insert(f2.m + f1.lambda * r * f1.q);
            omega.insert(f2.q * f2.lambda + f1.q * r * f1.m);
            omega.insert(f2.q * f2.m + f1.lambda * r * f1.q * f1.q);
            (Method::T3, f1.n * f2.n, vec![(f1.q, f1.m * r * f1.q), (f2.q, f2.m)])
        }
        PlanParams::T4 { f1, f2 } => {
            f1.check()?;
            f2.check()?;
            let qq = f1.q * f2.q;
            for v in [f1.lambda * f2.m, f2.lambda * f1.m, f1.lambda * f2.lambda] {
                lambda.insert(v);
                omega.insert(qq * v);
            }
            (Method::T4, f1.n * f2.n, vec![(qq, f1.m * f2.m)])
        }
        PlanParams::T5 { f, r3, r4 } => {
            for s in &f {
                s.check()?;
            }
            let [f1, f2, f3, f4] = f;
            if f1.n != f3.n || f2.n != f4.n {
                return Err(Error::invalid("three-block construction needs n1 = n3 and n2 = n4"));
            }
            if r3 == 0 || r4 == 0 {
                return Err(Error::invalid("r3 and r4 must be positive"));
            }
            let qq = f1.q * f2.q;
            let cases = [
                (f1.m * f2.lambda, f3.m * r3, f4.lambda * r4 * f4.q),
                (f1.lambda * f2.lambda, f3.m * r3, r4 * f4.m),
                (f1.lambda * f2.m, f3.lambda * r3 * f3.q, r4 * f4.m),
            ];
            for (a, b, c) in cases {
                lambda.insert(a + b + c);
                omega.insert(qq * a + f3.q * b + f4.q * c);
            }
            let blocks = vec![(qq, f1.m * f2.m), (f3.q, f3.m * r3 * f3.q), (f4.q, f4.m * r4 * f4.q)];
            (Method::T5, f1.n * f2.n, blocks)
        }
    };
    let mut p = ConstructionPlan {
        method,
        params,
        n,
        blocks,
        lambda_values: lambda,
        omega_values: omega,
        efnod_eligible: false,
        chisq_eligible: false,
    };
    let (e, c) = eligibility(&p.lambda_values, &p.omega_values, &p.levels());
    p.efnod_eligible = e;
    p.chisq_eligible = c;
    Ok(p)
}

/// A built design together with its plan and independent report.
#[derive(Debug, Clone)]
pub struct Construction {
    pub design: DesignMatrix,
    pub plan: ConstructionPlan,
    pub report: OptimalityReport,
}

impl Construction {
    pub fn efnod_certified(&self) -> bool {
        self.report.efnod_certificate.is_granted()
    }

    pub fn chisq_certified(&self) -> bool {
        self.report.chisq_certificate.is_granted()
    }
}

/// Cross-checks the built design against its plan.
fn finish(design: DesignMatrix, plan: ConstructionPlan, require_alias_free: bool) -> Result<Construction> {
    if design.n() as u64 != plan.n || design.levels() != plan.levels().as_slice() {
        return Err(Error::internal(format!("built {} but the plan predicts {}", design.shape(), plan.shape())));
    }
    let report = full_report(&design)?;
    let lambda: BTreeSet<u64> = report.profile.lambda.keys().copied().collect();
    let omega: BTreeSet<u64> = report.profile.omega.keys().copied().collect();
    if !lambda.is_subset(&plan.lambda_values) || !omega.is_subset(&plan.omega_values) {
        return Err(Error::internal(format!(
            "coincidence values {lambda:?}/{omega:?} fall outside the predicted {:?}/{:?}",
            plan.lambda_values, plan.omega_values
        )));
    }
    if require_alias_free {
        if let Some((i, j)) = report.aliased_pairs.first() {
            return Err(Error::internal(format!("output columns {} and {} are fully aliased", i + 1, j + 1)));
        }
    }
    if report.efnod_certificate.is_granted() != plan.efnod_eligible
        || report.chisq_certificate.is_granted() != plan.chisq_eligible
    {
        return Err(Error::internal("plan and verification disagree on a certificate"));
    }
    Ok(Construction { design, plan, report })
}

fn symmetric_levels(f: &EquidistantDesign, name: &str) -> Result<u32> {
    f.q().ok_or_else(|| Error::precondition(format!("{name} must have a single level count")))
}

fn require_alias_free(f: &EquidistantDesign, name: &str) -> Result<()> {
    if f.alias_free() {
        Ok(())
    } else {
        Err(Error::precondition(format!("{name} has fully aliased columns")))
    }
}

fn require_nd(d: &DifferenceMatrix, name: &str, q: u32, cols: usize) -> Result<()> {
    if d.q() != q {
        return Err(Error::precondition(format!("{name} is over a group of order {} but needs order {q}", d.q())));
    }
    if d.cols() != cols {
        return Err(Error::precondition(format!("{name} has {} columns but needs {cols}", d.cols())));
    }
    if !d.is_normalized() {
        return Err(Error::precondition(format!("{name} is not normalized (first column not all zeros)")));
    }
    if !distinct_rows(d) {
        return Err(Error::precondition(format!("{name} has identical rows")));
    }
    Ok(())
}

fn design_over(m: Matrix, q: u32) -> Result<DesignMatrix> {
    let cols = m.cols();
    DesignMatrix::new(&m, vec![q; cols])
}

/// `F (+)_G D'` for an alias-free equidistant `F` and a normalized `D` without identical rows.
pub fn construct_t2(f: &EquidistantDesign, d: &DifferenceMatrix) -> Result<Construction> {
    let q = symmetric_levels(f, "F")?;
    require_alias_free(f, "F")?;
    require_nd(d, "D", q, d.cols())?;
    let p = plan(PlanParams::T2 { f: Source::of(f)?, r: d.r() as u64, c: d.cols() as u64 })?;
    let m = kronecker_sum(&f.design().to_matrix(), &d.transpose(), d.group())?;
    finish(design_over(m, q)?, p, true)
}

/// `(F1 (+)_G D', 0_{n1} (+) F2)`.
pub fn construct_t3(f1: &EquidistantDesign, f2: &EquidistantDesign, d: &DifferenceMatrix) -> Result<Construction> {
    let q1 = symmetric_levels(f1, "F1")?;
    let q2 = symmetric_levels(f2, "F2")?;
    require_alias_free(f1, "F1")?;
    require_alias_free(f2, "F2")?;
    require_nd(d, "D", q1, f2.n())?;
    let p = plan(PlanParams::T3 { f1: Source::of(f1)?, f2: Source::of(f2)?, r: d.r() as u64 })?;
    let first = design_over(kronecker_sum(&f1.design().to_matrix(), &d.transpose(), d.group())?, q1)?;
    let f2m = f2.design().to_matrix();
    let copies: Vec<&Matrix> = std::iter::repeat_n(&f2m, f1.n()).collect();
    let second = design_over(Matrix::vstack(&copies)?, q2)?;
    finish(DesignMatrix::hstack(&[&first, &second])?, p, true)
}

fn mixed_block(f1: &DesignMatrix, f2: &DesignMatrix) -> Result<DesignMatrix> {
    let mut cols = Vec::with_capacity(f1.m() * f2.m());
    for a in f1.columns() {
        for b in f2.columns() {
            cols.push(mixed_combine(a, b)?);
        }
    }
    DesignMatrix::from_columns(cols)
}

/// Every column is `mixed_combine` of a column of `F1` with a column of `F2`.
pub fn construct_t4(f1: &EquidistantDesign, f2: &EquidistantDesign) -> Result<Construction> {
    symmetric_levels(f1, "F1")?;
    symmetric_levels(f2, "F2")?;
    let p = plan(PlanParams::T4 { f1: Source::of(f1)?, f2: Source::of(f2)? })?;
    finish(mixed_block(f1.design(), f2.design())?, p, false)
}

fn cross_aliasing(f: &DesignMatrix, dt: &Matrix, q: u32, fname: &str, dname: &str) -> Result<()> {
    if f.levels().first() != Some(&q) {
        return Ok(());
    }
    for j in 0..f.m() {
        for k in 0..dt.cols() {
            let dcol = dt.column(k);
            if fully_aliased(f.column(j), Column::new(&dcol, q)) {
                return Err(Error::precondition(format!(
                    "column {} of {fname} is fully aliased with column {} of {dname}'",
                    j + 1,
                    k + 1
                )));
            }
        }
    }
    Ok(())
}

/// The three-block design `[F1 x F2, F3 (+) D3', D4' (+) F4]`.
#[allow(clippy::too_many_arguments)]
pub fn construct_t5(
    f1: &EquidistantDesign,
    f2: &EquidistantDesign,
    f3: &EquidistantDesign,
    f4: &EquidistantDesign,
    d3: &DifferenceMatrix,
    d4: &DifferenceMatrix,
) -> Result<Construction> {
    let names = ["F1", "F2", "F3", "F4"];
    let fs = [f1, f2, f3, f4];
    let mut qs = [0u32; 4];
    for k in 0..4 {
        qs[k] = symmetric_levels(fs[k], names[k])?;
        require_alias_free(fs[k], names[k])?;
    }
    if f1.n() != f3.n() || f2.n() != f4.n() {
        return Err(Error::precondition(format!(
            "need n1 = n3 and n2 = n4 (got {}, {}, {}, {})",
            f1.n(),
            f2.n(),
            f3.n(),
            f4.n()
        )));
    }
    for (f, name) in [(f3, "F3"), (f4, "F4")] {
        if f.design().row(0).iter().any(|&v| v != 0) {
            return Err(Error::precondition(format!("the first row of {name} is not all zeros")));
        }
    }
    require_nd(d3, "D3", qs[2], f2.n())?;
    require_nd(d4, "D4", qs[3], f1.n())?;
    let (d3t, d4t) = (d3.transpose(), d4.transpose());
    if qs[2] == qs[3] {
        cross_aliasing(f3.design(), &d4t, qs[3], "F3", "D4")?;
        cross_aliasing(f4.design(), &d3t, qs[2], "F4", "D3")?;
    }
    let sources = [Source::of(f1)?, Source::of(f2)?, Source::of(f3)?, Source::of(f4)?];
    let p = plan(PlanParams::T5 { f: sources, r3: d3.r() as u64, r4: d4.r() as u64 })?;

    let first = mixed_block(f1.design(), f2.design())?;
    let second = design_over(kronecker_sum(&f3.design().to_matrix(), &d3t, d3.group())?, qs[2])?;
    let third = design_over(kronecker_sum(&d4t, &f4.design().to_matrix(), d4.group())?, qs[3])?;
    finish(DesignMatrix::hstack(&[&first, &second, &third])?, p, true)
}

/// Group used for Kronecker sums over `q` levels.
pub fn default_group(q: u32) -> Result<Group> {
    Group::for_order(q)
}
