//! Independent certification of designs.

use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::Group;
use crate::criteria::{
    aliased_pairs, chi_square_via_trace, coincidence_profile, e_fnod_via_trace, f_nod_pair, format_rational,
    pairwise_summary, CoincidenceProfile, Rational,
};
use crate::error::{Error, Result};
use crate::matrix::{column_sum, mixed_combine, Column, DesignMatrix};

/// Text attached to every chi-square certificate.
pub const CHISQ_RULE: &str =
    "two nearest values read as adjacent in the set of subset sums of the level counts";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Granted { condition: String },
    Refused { reason: String, witnesses: Vec<(usize, usize)> },
}

impl Certificate {
    pub fn is_granted(&self) -> bool {
        matches!(self, Certificate::Granted { .. })
    }

    pub fn text(&self) -> String {
        match self {
            Certificate::Granted { condition } => format!("granted: {condition}"),
            Certificate::Refused { reason, witnesses } => {
                let w: Vec<String> = witnesses.iter().map(|(a, b)| format!("({},{})", a + 1, b + 1)).collect();
                if w.is_empty() {
                    format!("refused: {reason}")
                } else {
                    format!("refused: {reason}; witnesses {}", w.join(" "))
                }
            }
        }
    }
}

/// Which sums of the level counts `{q_k}` some subset can reach.
pub fn subset_sums(levels: &[u32]) -> Vec<bool> {
    let total: usize = levels.iter().map(|&q| q as usize).sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    let mut top = 0;
    for &q in levels {
        let q = q as usize;
        for s in (0..=top).rev() {
            if reach[s] {
                reach[s + q] = true;
            }
        }
        top += q;
    }
    reach
}

/// `Ok` when no attainable sum lies strictly between `a < b`; otherwise the first one that does.
pub fn adjacent_in_subset_sums(reach: &[bool], a: u64, b: u64) -> std::result::Result<(), u64> {
    let (lo, hi) = (a.min(b), a.max(b));
    match (lo + 1..hi).find(|&s| reach.get(s as usize).copied().unwrap_or(false)) {
        Some(s) => Err(s),
        None => Ok(()),
    }
}

/// The coincidence numbers span at most one.
pub fn certify_efnod_profile(p: &CoincidenceProfile) -> Certificate {
    let (Some((&lo, slo)), Some((&hi, shi))) = (p.lambda.first_key_value(), p.lambda.last_key_value()) else {
        return Certificate::Granted { condition: "no row pairs".into() };
    };
    if hi - lo <= 1 {
        Certificate::Granted {
            condition: format!("coincidence numbers {{{}}} differ by at most one", join(&p.lambda_values())),
        }
    } else {
        Certificate::Refused {
            reason: format!("coincidence numbers span {} (from {lo} to {hi})", hi - lo),
            witnesses: vec![slo.witness, shi.witness],
        }
    }
}

/// Chi-square counterpart on the weighted coincidences.
pub fn certify_chisq_profile(p: &CoincidenceProfile, levels: &[u32]) -> Certificate {
    let vals = p.omega_values();
    match vals.len() {
        0 => Certificate::Granted { condition: "no row pairs".into() },
        1 => Certificate::Granted { condition: format!("weighted coincidence numbers constant at {}", vals[0]) },
        2 => match adjacent_in_subset_sums(&subset_sums(levels), vals[0], vals[1]) {
            Ok(()) => Certificate::Granted {
                condition: format!("weighted coincidence numbers {{{}}} are adjacent ({CHISQ_RULE})", join(&vals)),
            },
            Err(s) => Certificate::Refused {
                reason: format!("weighted values {} and {} are not adjacent: {s} is attainable ({CHISQ_RULE})", vals[0], vals[1]),
                witnesses: vec![p.omega[&vals[0]].witness, p.omega[&vals[1]].witness],
            },
        },
        k => Certificate::Refused {
            reason: format!("{k} distinct weighted coincidence numbers {{{}}}", join(&vals)),
            witnesses: vec![p.omega[&vals[0]].witness, p.omega[vals.last().unwrap()].witness],
        },
    }
}

pub fn certify_efnod(f: &DesignMatrix) -> Certificate {
    certify_efnod_profile(&coincidence_profile(f))
}

pub fn certify_chisq(f: &DesignMatrix) -> Certificate {
    certify_chisq_profile(&coincidence_profile(f), f.levels())
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

/// FNV-1a 64 over `n`, `m` (u64 little endian), each level count and then
/// each entry in row-major order (u32 little endian).
pub fn design_hash(f: &DesignMatrix) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(&(f.n() as u64).to_le_bytes());
    eat(&(f.m() as u64).to_le_bytes());
    for &q in f.levels() {
        eat(&q.to_le_bytes());
    }
    for i in 0..f.n() {
        for j in 0..f.m() {
            eat(&f.get(i, j).to_le_bytes());
        }
    }
    h
}

/// Everything the tool asserts about a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityReport {
    pub shape: String,
    pub n: usize,
    pub m: usize,
    pub levels: Vec<u32>,
    pub hash: u64,
    pub efnod: Rational,
    pub chisq: Rational,
    pub profile: CoincidenceProfile,
    pub efnod_certificate: Certificate,
    pub chisq_certificate: Certificate,
    pub aliased_pairs: Vec<(usize, usize)>,
    pub max_fnod: Option<(Rational, usize, usize)>,
}

pub fn full_report(f: &DesignMatrix) -> Result<OptimalityReport> {
    if f.m() < 2 || f.n() < 2 {
        return Err(Error::invalid("a report needs at least two runs and two columns"));
    }
    let summary = pairwise_summary(f);
    let m = f.m() as i128;
    let efnod = summary.sum_fnod * Rational::new(2, m * (m - 1));
    let chisq = summary.sum_weighted_fnod / Rational::from_integer(f.n() as i128);
    if e_fnod_via_trace(f)? != efnod || chi_square_via_trace(f)? != chisq {
        return Err(Error::internal("direct and trace routes disagree on a criterion value"));
    }
    let profile = coincidence_profile(f);
    Ok(OptimalityReport {
        shape: f.shape(),
        n: f.n(),
        m: f.m(),
        levels: f.levels().to_vec(),
        hash: design_hash(f),
        efnod,
        chisq,
        efnod_certificate: certify_efnod_profile(&profile),
        chisq_certificate: certify_chisq_profile(&profile, f.levels()),
        profile,
        aliased_pairs: aliased_pairs(f),
        max_fnod: summary.max_fnod,
    })
}

fn counts(map: &std::collections::BTreeMap<u64, crate::criteria::ValueStat>) -> String {
    map.iter().map(|(v, s)| format!("{v}:{}", s.count)).collect::<Vec<_>>().join(" ")
}

impl OptimalityReport {
    pub fn lambda_counts(&self) -> Vec<(u64, u64)> {
        self.profile.lambda.iter().map(|(v, s)| (*v, s.count)).collect()
    }

    pub fn omega_counts(&self) -> Vec<(u64, u64)> {
        self.profile.omega.iter().map(|(v, s)| (*v, s.count)).collect()
    }

    /// Flat `key: value` block.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let levels: Vec<String> = self.levels.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "shape: {}", self.shape);
        let _ = writeln!(s, "runs: {}", self.n);
        let _ = writeln!(s, "columns: {}", self.m);
        let _ = writeln!(s, "levels: {}", levels.join(" "));
        let _ = writeln!(s, "hash: {:016x}", self.hash);
        let _ = writeln!(s, "efnod: {}", format_rational(&self.efnod));
        let _ = writeln!(s, "chisq: {}", format_rational(&self.chisq));
        let _ = writeln!(s, "lambda_values: {}", counts(&self.profile.lambda));
        let _ = writeln!(s, "omega_values: {}", counts(&self.profile.omega));
        let _ = writeln!(s, "efnod_certificate: {}", self.efnod_certificate.text());
        let _ = writeln!(s, "chisq_certificate: {}", self.chisq_certificate.text());
        let pairs: Vec<String> = self.aliased_pairs.iter().map(|(a, b)| format!("({},{})", a + 1, b + 1)).collect();
        let _ = writeln!(s, "aliased_pairs: {}", if pairs.is_empty() { "none".into() } else { pairs.join(" ") });
        if let Some((v, i, j)) = &self.max_fnod {
            let _ = writeln!(s, "max_fnod: {} at columns ({},{})", format_rational(v), i + 1, j + 1);
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let cert = |c: &Certificate| match c {
            Certificate::Granted { condition } => json!({"granted": true, "condition": condition}),
            Certificate::Refused { reason, witnesses } => json!({
                "granted": false,
                "reason": reason,
                "witnesses": witnesses.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
            }),
        };
        let values = |v: Vec<(u64, u64)>| v.into_iter().map(|(x, c)| json!({"value": x, "count": c})).collect::<Vec<_>>();
        json!({
            "shape": {"text": self.shape, "runs": self.n, "columns": self.m},
            "levels": self.levels,
            "efnod": format_rational(&self.efnod),
            "chisq": format_rational(&self.chisq),
            "lambda_values": values(self.lambda_counts()),
            "omega_values": values(self.omega_counts()),
            "certificates": {
                "efnod_optimal": cert(&self.efnod_certificate),
                "chisq_optimal": cert(&self.chisq_certificate),
            },
            "aliased_pairs": self.aliased_pairs.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
            "hash": format!("{:016x}", self.hash),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Both sides combined by `mixed_combine`.
    A,
    /// Both sides combined by group sums; needs `q1 = q2` and `q3 = q4`.
    B,
    /// Group sum against `mixed_combine`; needs `q1 = q2`.
    C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub mode: BoundMode,
    pub lhs: Rational,
    pub rhs: Rational,
    /// The equality (mode A) or inequality (modes B, C) holds.
    pub holds: bool,
    pub equality: bool,
    /// `f1 _|_ f3` or `f2 _|_ f4`.
    pub component_orthogonal: bool,
}

impl BoundCheck {
    /// The full claim: the relation holds, and in modes B and C equality
    /// occurs exactly when a component pair is orthogonal.
    pub fn consistent(&self) -> bool {
        match self.mode {
            BoundMode::A => self.holds,
            _ => self.holds && self.equality == self.component_orthogonal,
        }
    }
}

/// Checks the nonorthogonality bound for combined columns `h1 = f1 * f2`, `h2 = f3 * f4`.
pub fn check_nonorthogonality_bound(
    f1: Column<'_>,
    f2: Column<'_>,
    f3: Column<'_>,
    f4: Column<'_>,
    mode: BoundMode,
) -> Result<BoundCheck> {
    if f1.len() != f3.len() || f2.len() != f4.len() {
        return Err(Error::invalid("need n1 = n3 and n2 = n4"));
    }
    match mode {
        BoundMode::B if f1.levels != f2.levels || f3.levels != f4.levels => {
            return Err(Error::invalid("mode b needs q1 = q2 and q3 = q4"))
        }
        BoundMode::C if f1.levels != f2.levels => return Err(Error::invalid("mode c needs q1 = q2")),
        _ => {}
    }
    let a = f_nod_pair(f1, f3)?;
    let b = f_nod_pair(f2, f4)?;
    let r = |x: usize| Rational::from_integer(x as i128);
    let (n1, n2) = (r(f1.len()), r(f2.len()));
    let (q1, q2, q3, q4) = (r(f1.levels as usize), r(f2.levels as usize), r(f3.levels as usize), r(f4.levels as usize));
    let group_sum = |x: Column<'_>, y: Column<'_>| -> Result<(Vec<u32>, u32)> {
        let g = Group::for_order(x.levels)?;
        Ok((column_sum(x.values, y.values, &g), x.levels))
    };
    let (lhs, rhs) = match mode {
        BoundMode::A => {
            let h1 = mixed_combine(f1, f2)?;
            let h2 = mixed_combine(f3, f4)?;
            let lhs = f_nod_pair(h1.view(), h2.view())?;
            (lhs, a * b + n2 * n2 / (q2 * q4) * a + n1 * n1 / (q1 * q3) * b)
        }
        BoundMode::B => {
            let (h1, p) = group_sum(f1, f2)?;
            let (h2, s) = group_sum(f3, f4)?;
            let lhs = f_nod_pair(Column::new(&h1, p), Column::new(&h2, s))?;
            (lhs, q1 * q3 * a * b + (n2 * n2 * a).min(n1 * n1 * b))
        }
        BoundMode::C => {
            let (h1, p) = group_sum(f1, f2)?;
            let h2 = mixed_combine(f3, f4)?;
            let lhs = f_nod_pair(Column::new(&h1, p), h2.view())?;
            (lhs, q1 * a * b + (n2 * n2 / q4 * a).min(n1 * n1 / q3 * b))
        }
    };
    let holds = match mode {
        BoundMode::A => lhs == rhs,
        _ => lhs <= rhs,
    };
    Ok(BoundCheck { mode, lhs, rhs, holds, equality: lhs == rhs, component_orthogonal: a.is_zero() || b.is_zero() })
}
