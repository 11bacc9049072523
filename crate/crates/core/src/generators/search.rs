//! Search for equidistant designs as a `lambda`-fold exact cover of row pairs
//! by alias classes of balanced columns.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EquidistantDesign;
use crate::error::{Error, Result};
use crate::matrix::{DesignMatrix, LevelColumn};

/// Limits on the search effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Refuse parameter sets with more alias classes than this.
    pub max_classes: u64,
    /// Nodes per restart.
    pub max_nodes: u64,
    /// Randomised restarts when the class count is above the exhaustive threshold.
    pub restarts: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_classes: 1000, max_nodes: 200_000, restarts: 16 }
    }
}

/// Class counts up to this size are searched exhaustively in canonical order.
const EXHAUSTIVE_CLASSES: u64 = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(EquidistantDesign),
    NotFound(String),
}

impl SearchOutcome {
    pub fn found(self) -> Option<EquidistantDesign> {
        match self {
            SearchOutcome::Found(d) => Some(d),
            SearchOutcome::NotFound(_) => None,
        }
    }
}

/// Number of balanced `q`-level columns of length `n` up to level permutation:
/// `n! / ((n/q)!^q q!)`. `None` on overflow or when `q` does not divide `n`.
pub fn alias_class_count(n: usize, q: usize) -> Option<u64> {
    if q == 0 || n % q != 0 {
        return None;
    }
    let s = n / q;
    // product over blocks of C(remaining - 1, s - 1), placing the smallest free row first
    let mut total: u128 = 1;
    let mut remaining = n;
    for _ in 0..q {
        total = total.checked_mul(binom(remaining - 1, s - 1)?)?;
        remaining -= s;
    }
    u64::try_from(total).ok()
}

fn binom(n: usize, k: usize) -> Option<u128> {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

/// All canonical balanced columns (levels numbered by first appearance).
fn alias_classes(n: usize, q: usize) -> Vec<Vec<u32>> {
    fn rec(pos: usize, col: &mut Vec<u32>, counts: &mut Vec<usize>, used: usize, s: usize, out: &mut Vec<Vec<u32>>) {
        if pos == col.len() {
            out.push(col.clone());
            return;
        }
        let top = (used + 1).min(counts.len());
        for l in 0..top {
            if counts[l] < s {
                counts[l] += 1;
                col[pos] = l as u32;
                rec(pos + 1, col, counts, used.max(l + 1), s, out);
                counts[l] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, &mut vec![0; n], &mut vec![0; q], 0, n / q, &mut out);
    out
}

struct Cover<'a> {
    class_pairs: &'a [Vec<usize>],
    pair_classes: Vec<Vec<usize>>,
    need: Vec<u32>,
    used: Vec<u32>,
    banned: Vec<bool>,
    chosen: Vec<usize>,
    target: usize,
    distinct: bool,
    nodes: u64,
    max_nodes: u64,
}

impl Cover<'_> {
    fn viable(&self, c: usize) -> bool {
        !self.banned[c] && !(self.distinct && self.used[c] > 0) && self.class_pairs[c].iter().all(|&p| self.need[p] > 0)
    }

    fn apply(&mut self, c: usize, sign: bool) {
        for &p in &self.class_pairs[c] {
            if sign {
                self.need[p] -= 1;
            } else {
                self.need[p] += 1;
            }
        }
        if sign {
            self.used[c] += 1;
            self.chosen.push(c);
        } else {
            self.used[c] -= 1;
            self.chosen.pop();
        }
    }

    /// `Some(true)` on success, `Some(false)` when exhausted, `None` when over budget.
    fn solve(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if self.chosen.len() == self.target {
            return Some(self.need.iter().all(|&x| x == 0));
        }
        let viable: Vec<bool> = (0..self.class_pairs.len()).map(|c| self.viable(c)).collect();
        let mut pick: Option<(usize, usize)> = None;
        for (p, &need) in self.need.iter().enumerate() {
            if need == 0 {
                continue;
            }
            let options = self.pair_classes[p].iter().filter(|&&c| viable[c]).count();
            if options == 0 || (self.distinct && options < need as usize) {
                return Some(false);
            }
            if pick.is_none_or(|(_, best)| options < best) {
                pick = Some((p, options));
            }
        }
        let Some((p, _)) = pick else {
            return Some(false);
        };
        let candidates: Vec<usize> = self.pair_classes[p].iter().copied().filter(|&c| viable[c]).collect();
        let mut banned_here = Vec::new();
        let mut result = Some(false);
        for c in candidates {
            self.apply(c, true);
            let r = self.solve();
            if r != Some(false) {
                result = r;
                if r == Some(true) {
                    // leave the solution in place
                    for b in banned_here {
                        self.banned[b] = false;
                    }
                    return result;
                }
                self.apply(c, false);
                break;
            }
            self.apply(c, false);
            self.banned[c] = true;
            banned_here.push(c);
        }
        for b in banned_here {
            self.banned[b] = false;
        }
        result
    }
}

fn pair_index(n: usize) -> impl Fn(usize, usize) -> usize {
    move |s, t| s * n - s * (s + 1) / 2 + (t - s - 1)
}

/// Searches for an `F(n, q^m)` with every row pair coinciding in exactly `lambda` columns.
///
/// Class orders come from `seed` when randomised restarts are used, so results
/// are reproducible. Every hit is re-certified before being returned.
pub fn search_equidistant(
    n: usize,
    m: usize,
    q: u32,
    lambda: u64,
    no_aliasing: bool,
    budget: SearchBudget,
    seed: u64,
) -> Result<SearchOutcome> {
    let qs = q as usize;
    if n < 2 || qs < 2 || n % qs != 0 {
        return Err(Error::invalid(format!("need q >= 2 dividing n >= 2 (n = {n}, q = {q})")));
    }
    let pairs = n * (n - 1) / 2;
    let per_column = qs * (n / qs) * (n / qs - 1) / 2;
    if (m * per_column) as u64 != lambda * pairs as u64 {
        return Ok(SearchOutcome::NotFound(format!(
            "no F({n}, {q}^{m}) can have constant coincidence {lambda}: {m} columns cover {} coinciding pairs, {lambda} x {pairs} needed",
            m * per_column
        )));
    }
    let classes_total = match alias_class_count(n, qs) {
        Some(c) if c <= budget.max_classes => c,
        other => {
            return Ok(SearchOutcome::NotFound(format!(
                "{} alias classes exceed the search budget of {}",
                other.map_or("too many".to_string(), |c| c.to_string()),
                budget.max_classes
            )))
        }
    };
    if no_aliasing && m as u64 > classes_total {
        return Ok(SearchOutcome::NotFound(format!("only {classes_total} alias classes for {m} columns")));
    }

    let classes = alias_classes(n, qs);
    let idx = pair_index(n);
    let class_pairs: Vec<Vec<usize>> = classes
        .iter()
        .map(|col| {
            let mut ps = Vec::with_capacity(per_column);
            for s in 0..n {
                for t in s + 1..n {
                    if col[s] == col[t] {
                        ps.push(idx(s, t));
                    }
                }
            }
            ps
        })
        .collect();

    let exhaustive = classes_total <= EXHAUSTIVE_CLASSES;
    let attempts = if exhaustive { 1 } else { budget.restarts.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..attempts {
        let mut order: Vec<usize> = (0..classes.len()).collect();
        if !exhaustive {
            order.shuffle(&mut rng);
        }
        let mut pair_classes = vec![Vec::new(); pairs];
        for &c in &order {
            for &p in &class_pairs[c] {
                pair_classes[p].push(c);
            }
        }
        let mut cover = Cover {
            class_pairs: &class_pairs,
            pair_classes,
            need: vec![lambda as u32; pairs],
            used: vec![0; classes.len()],
            banned: vec![false; classes.len()],
            chosen: Vec::new(),
            target: m,
            distinct: no_aliasing,
            nodes: 0,
            max_nodes: budget.max_nodes,
        };
        match cover.solve() {
            Some(true) => {
                let mut chosen = cover.chosen.clone();
                chosen.sort_unstable();
                let columns = chosen.iter().map(|&c| LevelColumn { values: classes[c].clone(), levels: q }).collect();
                let design = DesignMatrix::from_columns(columns)?;
                let certified = if no_aliasing {
                    EquidistantDesign::certify_alias_free(design)
                } else {
                    EquidistantDesign::certify(design)
                }
                .map_err(|e| Error::internal(format!("search produced an uncertifiable design: {e}")))?;
                if certified.lambda() != lambda {
                    return Err(Error::internal("search produced the wrong coincidence number"));
                }
                return Ok(SearchOutcome::Found(certified));
            }
            Some(false) if exhaustive => {
                return Ok(SearchOutcome::NotFound(format!(
                    "exhaustive search over {classes_total} alias classes found no F({n}, {q}^{m}) with lambda {lambda}"
                )))
            }
            _ => {
                let _ = attempt;
            }
        }
    }
    Ok(SearchOutcome::NotFound(format!(
        "no F({n}, {q}^{m}) with lambda {lambda} within {attempts} restarts of {} nodes",
        budget.max_nodes
    )))
}
