//! Finding source designs and difference matrices for catalog builds.
//!
//! Equidistant sources are tried in the order: Rao-Hamming array, embedded
//! table, file in the sources directory, seeded search. Difference matrices:
//! linear construction over GF(q)^t, Kronecker sums of those, file, and a
//! seeded search for `r <= 2`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use super::embedded::embedded;
use super::io::{ingest, ingest_difference, DesignFile, Declaration};
use super::Catalog;
use crate::algebra::{prime_power, Group};
use crate::error::{Error, Result};
use crate::generators::{
    alias_class_count, distinct_rows, dm_kronecker, dm_linear, rao_hamming_oa, search_difference_matrix,
    search_equidistant, select_distinct_row_columns, DifferenceMatrix, EquidistantDesign, SearchBudget,
    SearchOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Requirement {
    /// Alias-free equidistant `F(n, q^m)`.
    Equidistant { n: u64, m: u64, q: u64 },
    /// Normalized `ND(rows, cols, q)` without identical rows.
    Difference { rows: u64, cols: u64, q: u64 },
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Requirement::Equidistant { n, m, q } => write!(f, "F({n}, {q}^{m})"),
            Requirement::Difference { rows, cols, q } => write!(f, "ND({rows}, {cols}, {q})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Availability {
    Generated,
    Embedded,
    Searchable,
    /// Needs a user-supplied file; `present` when the sources directory has one.
    External { present: bool },
}

impl Availability {
    pub fn usable(&self) -> bool {
        !matches!(self, Availability::External { present: false })
    }
}

impl fmt::Display for Availability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Availability::Generated => "generated",
            Availability::Embedded => "embedded",
            Availability::Searchable => "searchable",
            Availability::External { present: true } => "external (present)",
            Availability::External { present: false } => "external (missing)",
        })
    }
}

#[derive(Debug, Clone)]
enum Payload {
    Equidistant(EquidistantDesign),
    Difference(DifferenceMatrix),
}

/// A resolved requirement.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub availability: Availability,
    pub provenance: String,
    payload: Payload,
}

impl Resolved {
    pub fn equidistant(&self) -> Result<&EquidistantDesign> {
        match &self.payload {
            Payload::Equidistant(e) => Ok(e),
            Payload::Difference(_) => Err(Error::internal("expected an equidistant design")),
        }
    }

    pub fn difference(&self) -> Result<&DifferenceMatrix> {
        match &self.payload {
            Payload::Difference(d) => Ok(d),
            Payload::Equidistant(_) => Err(Error::internal("expected a difference matrix")),
        }
    }

    /// Design-file form, used to cache searched sources.
    pub fn to_file(&self) -> DesignFile {
        let mut metadata = vec![format!("provenance: {}", self.provenance)];
        match &self.payload {
            Payload::Equidistant(e) => {
                metadata.push(format!("declare: lambda {}", e.lambda()));
                super::io::design_file(e.design(), &metadata)
            }
            Payload::Difference(d) => {
                metadata.push(format!("declare: {}", Declaration::Difference(Some(d.group().name()))));
                DesignFile { matrix: d.matrix().clone(), levels: vec![d.q(); d.cols()], metadata }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum FileItem {
    Equidistant(EquidistantDesign),
    Difference(DifferenceMatrix),
}

/// Resolves requirements with caching. Searches use `seed`, so the same
/// seed always yields the same sources.
pub struct Resolver {
    dir: Option<PathBuf>,
    seed: u64,
    budget: SearchBudget,
    catalog: Catalog,
    files: Option<Vec<(PathBuf, FileItem)>>,
    cache: HashMap<Requirement, std::result::Result<Resolved, String>>,
}

/// Difference matrices from the search are only attempted for `r` up to this.
const DM_SEARCH_MAX_R: u64 = 2;

impl Resolver {
    pub fn new(dir: Option<PathBuf>, seed: u64) -> Self {
        Self { dir, seed, budget: SearchBudget::default(), catalog: Catalog::builtin(), files: None, cache: HashMap::new() }
    }

    pub fn with_budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn sources_dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn files(&mut self) -> Result<&[(PathBuf, FileItem)]> {
        if self.files.is_none() {
            let mut out = Vec::new();
            if let Some(dir) = &self.dir {
                let mut paths: Vec<PathBuf> = match fs::read_dir(dir) {
                    Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
                    Err(e) => return Err(Error::io(dir, e)),
                };
                paths.retain(|p| p.extension().is_some_and(|x| x == "design"));
                paths.sort();
                for p in paths {
                    let file = DesignFile::read(&p)?;
                    let decls = file.declarations()?;
                    let is_dm = decls.iter().any(|d| matches!(d, Declaration::Difference(_)));
                    if is_dm || decls.contains(&Declaration::Strength2) {
                        out.push((p.clone(), FileItem::Difference(ingest_difference(&p)?)));
                    }
                    if !is_dm {
                        let ing = ingest(&p)?;
                        if let Ok(e) = ing.equidistant() {
                            out.push((p, FileItem::Equidistant(e)));
                        }
                    }
                }
            }
            self.files = Some(out);
        }
        Ok(self.files.as_deref().unwrap_or_default())
    }

    /// How a requirement would be met, without running any search.
    pub fn availability(&mut self, req: Requirement) -> Result<Availability> {
        if let Some(Ok(r)) = self.cache.get(&req) {
            return Ok(r.availability);
        }
        Ok(match req {
            Requirement::Equidistant { n, m, q } => {
                if generated_oa(n, m, q).is_some() {
                    Availability::Generated
                } else if embedded_source(n, m, q) {
                    Availability::Embedded
                } else if self.file_equidistant(n, m, q)?.is_some() {
                    Availability::External { present: true }
                } else if searchable(n, m, q, &self.budget) {
                    Availability::Searchable
                } else {
                    Availability::External { present: false }
                }
            }
            Requirement::Difference { rows, cols, q } => {
                if generated_dm(rows, cols, q).is_some() {
                    Availability::Generated
                } else if self.file_difference(rows, cols, q)?.is_some() {
                    Availability::External { present: true }
                } else if rows / q <= DM_SEARCH_MAX_R && rows % q == 0 {
                    Availability::Searchable
                } else {
                    Availability::External { present: false }
                }
            }
        })
    }

    fn file_equidistant(&mut self, n: u64, m: u64, q: u64) -> Result<Option<(PathBuf, EquidistantDesign)>> {
        Ok(self.files()?.iter().find_map(|(p, item)| match item {
            FileItem::Equidistant(e)
                if e.n() as u64 == n && e.m() as u64 == m && e.q() == Some(q as u32) && e.alias_free() =>
            {
                Some((p.clone(), e.clone()))
            }
            _ => None,
        }))
    }

    fn file_difference(&mut self, rows: u64, cols: u64, q: u64) -> Result<Option<(PathBuf, DifferenceMatrix)>> {
        Ok(self.files()?.iter().find_map(|(p, item)| match item {
            FileItem::Difference(d) if d.rows() as u64 == rows && d.q() as u64 == q && d.cols() as u64 >= cols => {
                fit_difference(d, cols as usize).map(|d| (p.clone(), d))
            }
            _ => None,
        }))
    }

    /// Resolves a requirement, running searches when needed. Failures are
    /// cached too, so a hopeless search is only attempted once.
    pub fn resolve(&mut self, req: Requirement) -> Result<Resolved> {
        if let Some(hit) = self.cache.get(&req) {
            return hit.clone().map_err(|reference| Error::MissingSource { what: req.to_string(), reference });
        }
        let out = self.resolve_uncached(req)?;
        self.cache.insert(req, out.clone());
        out.map_err(|reference| Error::MissingSource { what: req.to_string(), reference })
    }

    fn resolve_uncached(&mut self, req: Requirement) -> Result<std::result::Result<Resolved, String>> {
        let found = |availability, provenance: String, payload| Ok(Ok(Resolved { availability, provenance, payload }));
        match req {
            Requirement::Equidistant { n, m, q } => {
                if let Some(t) = generated_oa(n, m, q) {
                    let e = EquidistantDesign::certify(rao_hamming_oa(q as u32, t)?)?;
                    return found(Availability::Generated, format!("Rao-Hamming array L{n}({q}^{m})"), Payload::Equidistant(e));
                }
                if embedded_source(n, m, q) {
                    let e = EquidistantDesign::certify(embedded("T4_F2")?.design()?)?;
                    return found(Availability::Embedded, "embedded T4_F2".into(), Payload::Equidistant(e));
                }
                if let Some((p, e)) = self.file_equidistant(n, m, q)? {
                    return found(
                        Availability::External { present: true },
                        format!("file {}", p.display()),
                        Payload::Equidistant(e),
                    );
                }
                let reference = self
                    .catalog
                    .reference_for(n, m, q)
                    .map(|r| format!("listed source: {r}"))
                    .unwrap_or_else(|| "no source listed".into());
                if searchable(n, m, q, &self.budget) {
                    let lambda = m * (n / q - 1) / (n - 1);
                    match search_equidistant(n as usize, m as usize, q as u32, lambda, true, self.budget, self.seed)? {
                        SearchOutcome::Found(e) => {
                            return found(
                                Availability::Searchable,
                                format!("search seed {} lambda {lambda}", self.seed),
                                Payload::Equidistant(e),
                            )
                        }
                        SearchOutcome::NotFound(why) => {
                            return Ok(Err(format!("{reference}; search gave up: {why}; supply a design file")))
                        }
                    }
                }
                Ok(Err(format!("{reference}; supply a design file in the sources directory")))
            }
            Requirement::Difference { rows, cols, q } => {
                if let Some(d) = generated_dm(rows, cols, q) {
                    return found(Availability::Generated, format!("linear construction over GF({q})"), Payload::Difference(d));
                }
                if let Some((p, d)) = self.file_difference(rows, cols, q)? {
                    return found(
                        Availability::External { present: true },
                        format!("file {}", p.display()),
                        Payload::Difference(d),
                    );
                }
                if rows % q == 0 && rows / q <= DM_SEARCH_MAX_R {
                    if let Ok(group) = Group::for_order(q as u32) {
                        if let Some(d) = search_difference_matrix(rows as usize, cols as usize, &group, self.seed, 200) {
                            return found(
                                Availability::Searchable,
                                format!("difference search seed {}", self.seed),
                                Payload::Difference(d),
                            );
                        }
                    }
                }
                let hint = if q == 2 && rows % 4 == 0 {
                    format!("e.g. a strength-2 array L{rows}(2^{}) declared `strength2`", rows - 1)
                } else {
                    "a file declared `difference`".to_string()
                };
                Ok(Err(format!("no construction available; supply {hint} in the sources directory")))
            }
        }
    }
}

/// Strength `t` of the saturated Rao-Hamming array `F(n, q^m)`, if it is one.
fn generated_oa(n: u64, m: u64, q: u64) -> Option<u32> {
    prime_power(q as u32)?;
    let mut x = q;
    let mut t = 1;
    while x < n {
        x *= q;
        t += 1;
    }
    (x == n && t >= 2 && m == (n - 1) / (q - 1)).then_some(t)
}

fn embedded_source(n: u64, m: u64, q: u64) -> bool {
    (n, m, q) == (6, 5, 3)
}

fn searchable(n: u64, m: u64, q: u64, budget: &SearchBudget) -> bool {
    if q < 2 || n % q != 0 || (m * (n / q - 1)) % (n - 1) != 0 {
        return false;
    }
    alias_class_count(n as usize, q as usize).is_some_and(|c| c <= budget.max_classes && m <= c)
}

/// Picks `cols` columns with pairwise distinct rows, normalizing first.
fn fit_difference(d: &DifferenceMatrix, cols: usize) -> Option<DifferenceMatrix> {
    let d = if d.is_normalized() { d.clone() } else { crate::generators::normalize_dm(d) };
    if d.cols() == cols && distinct_rows(&d) {
        return Some(d);
    }
    select_distinct_row_columns(&d, cols)
}

/// `ND(q^t, q^t, q)` from the linear construction, or a Kronecker sum of two
/// such matrices, cut down to `cols` columns.
fn generated_dm(rows: u64, cols: u64, q: u64) -> Option<DifferenceMatrix> {
    prime_power(q as u32)?;
    let mut t = 0;
    let mut x = 1u64;
    while x < rows {
        x *= q;
        t += 1;
    }
    if x != rows || cols > rows || rows > 4096 {
        return None;
    }
    let d = dm_linear(q as u32, t).ok()?;
    if let Some(out) = fit_difference(&d, cols as usize) {
        return Some(out);
    }
    // a Kronecker sum keeps the difference property; used as a fallback
    let half = dm_linear(q as u32, t / 2).ok()?;
    let rest = dm_linear(q as u32, t - t / 2).ok()?;
    fit_difference(&dm_kronecker(&half, &rest).ok()?, cols as usize)
}
