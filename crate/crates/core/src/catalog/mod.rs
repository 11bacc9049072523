//! The selected-design catalog, embedded example tables, design files and
//! source resolution.

pub mod embedded;
pub mod io;
mod resolve;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constructors::{
    construct_t3, construct_t5, plan, Construction, ConstructionPlan, Method, PlanParams, Source,
};
use crate::error::{Error, Result};

pub use embedded::{embedded, Embedded};
pub use io::{ingest, ingest_difference, write_atomic, write_design, write_difference, DesignFile, Ingested};
pub use resolve::{Availability, Requirement, Resolved, Resolver};

const CATALOG_TOML: &str = include_str!("../../data/catalog.toml");

/// One row of the equidistant source table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRow {
    pub n: u64,
    /// Column count, possibly a multiple of `k` such as `"5k"`.
    pub m: String,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ks: Vec<u64>,
    pub reference: String,
}

impl SourceRow {
    /// True when this row lists `F(n, q^m)`.
    pub fn covers(&self, n: u64, m: u64, q: u64) -> bool {
        if self.n != n || self.q != q {
            return false;
        }
        let ks: Vec<u64> = if self.ks.is_empty() { vec![1] } else { self.ks.clone() };
        ks.iter().any(|&k| eval_param(&self.m, k).ok() == Some(m))
    }
}

/// Which optimality criterion a table certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Efnod,
    Chisq,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Efnod => "lambda",
            Criterion::Chisq => "omega",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub table: String,
    pub method: String,
    pub criterion: Criterion,
    /// Parameters exactly as listed, e.g. `["4", "3", "2", "6", "5k", "3", "4k"]`.
    pub params: Vec<String>,
    /// Shape as listed, e.g. `F(24, 2^{24k}3^{5k})`.
    pub shape: String,
    /// Constant coincidence (or weighted coincidence) number as listed.
    pub value: String,
    /// Values of `k`; empty when the row has no `k`.
    pub ks: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_criterion: Option<Criterion>,
}

impl CatalogEntry {
    /// Criterion checked on build; the corrected one for misfiled rows.
    pub fn criterion(&self) -> Criterion {
        self.corrected_criterion.unwrap_or(self.criterion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema: u32,
    pub source: Vec<SourceRow>,
    pub entry: Vec<CatalogEntry>,
}

/// Evaluates `"5k"`, `"k"` or `"12"` at `k`.
pub fn eval_param(s: &str, k: u64) -> Result<u64> {
    let bad = || Error::invalid(format!("bad catalog parameter {s:?}"));
    match s.strip_suffix('k') {
        Some("") => Ok(k),
        Some(c) => c.parse::<u64>().map(|c| c * k).map_err(|_| bad()),
        None => s.parse().map_err(|_| bad()),
    }
}

/// Turns a listed shape like `F(24, 2^{24k}3^{5k})` into the canonical
/// `F(24, 2^24 3^5)` with equal level counts merged.
pub fn canonical_shape(printed: &str, k: u64) -> Result<String> {
    let bad = || Error::invalid(format!("unparseable shape {printed:?}"));
    let inner = printed.trim().strip_prefix("F(").and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let (n, rest) = inner.split_once(',').ok_or_else(bad)?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
    let mut s = rest.trim();
    while !s.is_empty() {
        let (q, tail) = s.split_once('^').ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        let (exp, tail) = match tail.strip_prefix('{') {
            Some(t) => t.split_once('}').ok_or_else(bad)?,
            None => {
                let end = tail.find(|c: char| c.is_whitespace()).unwrap_or(tail.len());
                tail.split_at(end)
            }
        };
        *merged.entry(q).or_default() += eval_param(exp.trim(), k)?;
        s = tail.trim_start();
    }
    let parts: Vec<String> = merged.iter().map(|(q, c)| format!("{q}^{c}")).collect();
    Ok(format!("F({n}, {})", parts.join(" ")))
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn builtin() -> Self {
        Self::from_toml(CATALOG_TOML).expect("built-in catalog parses")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Catalog = toml::from_str(text).map_err(|e| Error::invalid(format!("catalog: {e}")))?;
        if c.schema != 1 {
            return Err(Error::invalid(format!("catalog schema {} is not supported", c.schema)));
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::internal(format!("catalog serialization: {e}")))
    }

    pub fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.entry.iter().find(|e| e.id.eq_ignore_ascii_case(id))
    }

    /// Every materialized instance, one per `k`.
    pub fn instances(&self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for e in &self.entry {
            out.extend(e.instances()?);
        }
        Ok(out)
    }

    /// Resolves `B2.01` (all its `k`) or `B2.01.k2` (one instance).
    pub fn select(&self, id: &str) -> Result<Vec<Instance>> {
        let (base, k) = match id.rsplit_once(".k") {
            Some((b, k)) => (b, Some(k.parse::<u64>().map_err(|_| Error::invalid(format!("bad instance id {id:?}")))?)),
            None => (id, None),
        };
        let entry = self.entry(base).ok_or_else(|| Error::invalid(format!("no catalog entry {base:?}")))?;
        let all = entry.instances()?;
        match k {
            None => Ok(all),
            Some(k) => {
                let hit: Vec<Instance> = all.into_iter().filter(|i| i.k == Some(k)).collect();
                if hit.is_empty() {
                    return Err(Error::invalid(format!("entry {} has no k = {k}", entry.id)));
                }
                Ok(hit)
            }
        }
    }

    /// Literature reference for an equidistant source, if the table lists one.
    pub fn reference_for(&self, n: u64, m: u64, q: u64) -> Option<&str> {
        self.source.iter().find(|s| s.covers(n, m, q)).map(|s| s.reference.as_str())
    }
}

impl CatalogEntry {
    pub fn instances(&self) -> Result<Vec<Instance>> {
        let ks: Vec<Option<u64>> = if self.ks.is_empty() { vec![None] } else { self.ks.iter().map(|&k| Some(k)).collect() };
        ks.into_iter().map(|k| Instance::new(self.clone(), k)).collect()
    }

    /// `Sum (q_j - 1) > n - 1` for the listed (or corrected) shape at every `k`.
    pub fn is_supersaturated(&self) -> Result<bool> {
        for inst in self.instances()? {
            if !inst.is_supersaturated()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A catalog row at a fixed `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub entry: CatalogEntry,
    pub k: Option<u64>,
    /// Parameters evaluated at `k`.
    pub values: Vec<u64>,
}

impl Instance {
    fn new(entry: CatalogEntry, k: Option<u64>) -> Result<Self> {
        let values = entry.params.iter().map(|p| eval_param(p, k.unwrap_or(1))).collect::<Result<Vec<_>>>()?;
        let want = match entry.method.as_str() {
            "T3" => 7,
            "T5" => 12,
            other => return Err(Error::invalid(format!("entry {}: unknown method {other}", entry.id))),
        };
        if values.len() != want {
            return Err(Error::invalid(format!("entry {}: expected {want} parameters", entry.id)));
        }
        Ok(Self { entry, k, values })
    }

    pub fn id(&self) -> String {
        match self.k {
            Some(k) => format!("{}.k{k}", self.entry.id),
            None => self.entry.id.clone(),
        }
    }

    fn kk(&self) -> u64 {
        self.k.unwrap_or(1)
    }

    /// Shape the catalog claims, canonicalized; uses the corrected shape for errata rows.
    pub fn expected_shape(&self) -> Result<String> {
        let printed = self.entry.corrected_shape.as_deref().unwrap_or(&self.entry.shape);
        canonical_shape(printed, self.kk())
    }

    pub fn expected_value(&self) -> Result<u64> {
        eval_param(&self.entry.value, self.kk())
    }

    pub fn is_supersaturated(&self) -> Result<bool> {
        let shape = self.expected_shape()?;
        let inner = &shape[2..shape.len() - 1];
        let (n, rest) = inner.split_once(", ").ok_or_else(|| Error::internal("shape"))?;
        let n: u64 = n.parse().map_err(|_| Error::internal("shape"))?;
        let mut dof = 0u64;
        for part in rest.split(' ') {
            let (q, c) = part.split_once('^').ok_or_else(|| Error::internal("shape"))?;
            let (q, c): (u64, u64) = (q.parse().unwrap_or(0), c.parse().unwrap_or(0));
            dof += (q.saturating_sub(1)) * c;
        }
        Ok(dof > n - 1)
    }

    /// Source designs and difference matrices the construction needs, in
    /// argument order.
    pub fn requirements(&self) -> Vec<Requirement> {
        let v = &self.values;
        if self.entry.method == "T3" {
            let (n1, m1, q1, n2, m2, q2, r) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
            vec![
                Requirement::Equidistant { n: n1, m: m1, q: q1 },
                Requirement::Equidistant { n: n2, m: m2, q: q2 },
                Requirement::Difference { rows: r * q1, cols: n2, q: q1 },
            ]
        } else {
            let (n1, m1, q1, n2, m2, q2) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            let (m3, q3, m4, q4, r3, r4) = (v[6], v[7], v[8], v[9], v[10], v[11]);
            vec![
                Requirement::Equidistant { n: n1, m: m1, q: q1 },
                Requirement::Equidistant { n: n2, m: m2, q: q2 },
                Requirement::Equidistant { n: n1, m: m3, q: q3 },
                Requirement::Equidistant { n: n2, m: m4, q: q4 },
                Requirement::Difference { rows: r3 * q3, cols: n2, q: q3 },
                Requirement::Difference { rows: r4 * q4, cols: n1, q: q4 },
            ]
        }
    }

    pub fn plan(&self) -> Result<ConstructionPlan> {
        let v = &self.values;
        let params = if self.entry.method == "T3" {
            PlanParams::T3 { f1: Source::new(v[0], v[1], v[2])?, f2: Source::new(v[3], v[4], v[5])?, r: v[6] }
        } else {
            PlanParams::T5 {
                f: [
                    Source::new(v[0], v[1], v[2])?,
                    Source::new(v[3], v[4], v[5])?,
                    Source::new(v[0], v[6], v[7])?,
                    Source::new(v[3], v[8], v[9])?,
                ],
                r3: v[10],
                r4: v[11],
            }
        };
        plan(params)
    }
}

/// Result of building one catalog instance.
#[derive(Debug, Clone)]
pub struct Built {
    pub id: String,
    pub construction: Construction,
    /// How each requirement was obtained.
    pub sources: Vec<(Requirement, Resolved)>,
}

impl Built {
    /// Metadata lines for the exported design file.
    pub fn metadata(&self) -> Vec<String> {
        let mut out = vec![
            format!("catalog: {}", self.id),
            format!("method: {}", self.construction.plan.method),
            format!("shape: {}", self.construction.design.shape()),
        ];
        for (req, res) in &self.sources {
            out.push(format!("source: {req} <- {}", res.provenance));
        }
        out
    }
}

fn expectation(id: &str, what: &str, want: impl fmt::Display, got: impl fmt::Display) -> Error {
    Error::verification(format!("{id}: expected {what} {want}, built {got}"))
}

/// Builds an instance, checking shape, value and certificate against the catalog.
pub fn build_instance(inst: &Instance, resolver: &mut Resolver) -> Result<Built> {
    let id = inst.id();
    let p = inst.plan()?;
    let shape = inst.expected_shape()?;
    if p.shape() != shape {
        return Err(expectation(&id, "shape", &shape, p.shape()));
    }
    let reqs = inst.requirements();
    let mut resolved = Vec::with_capacity(reqs.len());
    for req in &reqs {
        resolved.push(resolver.resolve(*req)?);
    }
    let eq = |k: usize| resolved[k].equidistant();
    let dm = |k: usize| resolved[k].difference();
    let construction = match p.method {
        Method::T3 => construct_t3(eq(0)?, eq(1)?, dm(2)?)?,
        Method::T5 => {
            let f3 = eq(2)?.with_zero_row(0);
            let f4 = eq(3)?.with_zero_row(0);
            construct_t5(eq(0)?, eq(1)?, &f3, &f4, dm(4)?, dm(5)?)?
        }
        other => return Err(Error::internal(format!("catalog method {other}"))),
    };
    let design = &construction.design;
    if design.shape() != shape {
        return Err(expectation(&id, "shape", &shape, design.shape()));
    }
    let want = inst.expected_value()?;
    let profile = &construction.report.profile;
    let (got, granted) = match inst.entry.criterion() {
        Criterion::Efnod => (profile.constant_lambda(), construction.efnod_certified()),
        Criterion::Chisq => (profile.constant_omega(), construction.chisq_certified()),
    };
    let crit = inst.entry.criterion();
    match got {
        Some(v) if v == want => {}
        Some(v) => return Err(expectation(&id, &format!("constant {crit}"), want, v)),
        None => {
            let vals = match crit {
                Criterion::Efnod => profile.lambda_values(),
                Criterion::Chisq => profile.omega_values(),
            };
            return Err(expectation(&id, &format!("constant {crit}"), want, format!("values {vals:?}")));
        }
    }
    if !granted {
        return Err(Error::verification(format!("{id}: the {crit} certificate was refused")));
    }
    let sources = reqs.into_iter().zip(resolved).collect();
    Ok(Built { id, construction, sources })
}

/// Writes `<id>.design` and `<id>.report.txt` into `dir`; returns the design path.
pub fn write_built(dir: &Path, built: &Built) -> Result<std::path::PathBuf> {
    let design_path = dir.join(format!("{}.design", built.id));
    write_design(&design_path, &built.construction.design, &built.metadata())?;
    write_atomic(&dir.join(format!("{}.report.txt", built.id)), &built.construction.report.to_text())?;
    Ok(design_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_and_round_trips() {
        let c = Catalog::builtin();
        assert_eq!(c.entry.len(), 156);
        assert_eq!(c.source.len(), 43);
        let again = Catalog::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn shapes_canonicalize() {
        assert_eq!(canonical_shape("F(24, 2^{24k}3^{5k})", 2).unwrap(), "F(24, 2^48 3^10)");
        assert_eq!(canonical_shape("F(24, 2^{36}3^{60}4^{30})", 1).unwrap(), "F(24, 2^36 3^60 4^30)");
        assert_eq!(canonical_shape("F(24, 2^36 3^5)", 1).unwrap(), "F(24, 2^36 3^5)");
        assert!(canonical_shape("G(1, 2)", 1).is_err());
    }

    #[test]
    fn supersaturation_and_planned_shapes() {
        let c = Catalog::builtin();
        let mut saturated = Vec::new();
        for inst in c.instances().unwrap() {
            if !inst.is_supersaturated().unwrap() {
                saturated.push(inst.id());
            }
            let p = inst.plan().unwrap();
            assert_eq!(p.shape(), inst.expected_shape().unwrap(), "{}", inst.id());
        }
        // 2*48 + 11 = 107 = n - 1: this instance is saturated, not supersaturated
        assert_eq!(saturated, vec!["B3.34.k1".to_string()]);
        assert!(!c.entry("B3.34").unwrap().is_supersaturated().unwrap());
    }

    #[test]
    fn planned_values_match_listed_values() {
        let c = Catalog::builtin();
        let mut mismatched = Vec::new();
        for inst in c.instances().unwrap() {
            let p = inst.plan().unwrap();
            let got = match inst.entry.criterion() {
                Criterion::Efnod => p.constant_lambda(),
                Criterion::Chisq => p.constant_omega(),
            };
            if got != Some(inst.expected_value().unwrap()) {
                mismatched.push(inst.entry.id.clone());
            }
        }
        assert!(mismatched.is_empty(), "{mismatched:?}");
        let misfiled = c.entry("B5.35").unwrap();
        assert_eq!((misfiled.criterion, misfiled.criterion()), (Criterion::Chisq, Criterion::Efnod));
    }

    #[test]
    fn select_ids() {
        let c = Catalog::builtin();
        assert_eq!(c.select("B2.01").unwrap().len(), 3);
        assert_eq!(c.select("b2.01.k2").unwrap()[0].id(), "B2.01.k2");
        assert!(c.select("B2.01.k9").is_err());
        assert!(c.select("B9.01").is_err());
        assert_eq!(c.reference_for(6, 10, 2), Some("Liu and Zhang (2000)"));
        assert_eq!(c.reference_for(8, 21, 4), Some("Georgiou and Koukouvinos (2006)"));
    }
}
