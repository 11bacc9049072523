//! Plain-text design files.
//!
//! ```text
//! # any metadata, one item per line
//! # declare: strength2
//! n m
//! q_1 ... q_m
//! row_1
//! ...
//! row_n
//! ```
//!
//! Recognised declarations (`# declare: ...`) are `strength2`, `lambda <v>` and
//! `difference [group]`. Declared properties are checked on ingest.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::algebra::Group;
use crate::error::{Error, Result};
use crate::generators::{strength2_violation, DifferenceMatrix, EquidistantDesign};
use crate::matrix::{DesignMatrix, Matrix};

/// Property a file asserts about its contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Strength2,
    Lambda(u64),
    /// Difference matrix over the named group, or the default group for its order.
    Difference(Option<String>),
}

impl Declaration {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        let mut it = s.split_whitespace();
        let head = it.next().ok_or("empty declaration")?;
        let arg = it.next();
        let decl = match head {
            "strength2" => Declaration::Strength2,
            "lambda" => {
                let v = arg.ok_or("lambda needs a value")?;
                Declaration::Lambda(v.parse().map_err(|_| format!("bad lambda value {v:?}"))?)
            }
            "difference" => Declaration::Difference(arg.map(str::to_string)),
            other => return Err(format!("unknown declaration {other:?}")),
        };
        if it.next().is_some() {
            return Err(format!("trailing text in declaration {s:?}"));
        }
        Ok(decl)
    }
}

impl std::fmt::Display for Declaration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Declaration::Strength2 => f.write_str("strength2"),
            Declaration::Lambda(v) => write!(f, "lambda {v}"),
            Declaration::Difference(None) => f.write_str("difference"),
            Declaration::Difference(Some(g)) => write!(f, "difference {g}"),
        }
    }
}

/// Raw contents of a design file. Balance is not checked here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignFile {
    pub matrix: Matrix,
    pub levels: Vec<u32>,
    /// Metadata lines without the leading `#` and surrounding whitespace.
    pub metadata: Vec<String>,
}

fn parse_err(path: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, column, message: message.into() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

fn numbers(path: &str, lineno: usize, line: &str) -> Result<Vec<u32>> {
    tokens(line)
        .map(|(col, tok)| {
            tok.parse::<u32>().map_err(|_| parse_err(path, lineno, col, format!("expected a non-negative integer, found {tok:?}")))
        })
        .collect()
}

impl DesignFile {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut levels: Option<Vec<u32>> = None;
        let mut data = Vec::new();
        let mut rows = 0usize;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            last_line = lineno;
            let line = raw.trim_end_matches('\r');
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if rows > 0 {
                    return Err(parse_err(path, lineno, 1, "metadata lines must precede the data rows"));
                }
                metadata.push(rest.trim().to_string());
                continue;
            }
            let nums = numbers(path, lineno, line)?;
            match (header, &levels) {
                (None, _) => {
                    if nums.len() != 2 {
                        return Err(parse_err(path, lineno, 1, "header must be `n m`"));
                    }
                    header = Some((nums[0] as usize, nums[1] as usize));
                }
                (Some((_, m)), None) => {
                    if nums.len() != m {
                        return Err(parse_err(path, lineno, 1, format!("expected {m} level counts, found {}", nums.len())));
                    }
                    if let Some(j) = nums.iter().position(|&q| q < 1) {
                        return Err(parse_err(path, lineno, 1, format!("column {} has no levels", j + 1)));
                    }
                    levels = Some(nums);
                }
                (Some((n, m)), Some(lv)) => {
                    if rows == n {
                        return Err(parse_err(path, lineno, 1, format!("more than the declared {n} rows")));
                    }
                    if nums.len() != m {
                        return Err(parse_err(path, lineno, 1, format!("expected {m} entries, found {}", nums.len())));
                    }
                    for (j, (&v, (col, _))) in nums.iter().zip(tokens(line)).enumerate() {
                        if v >= lv[j] {
                            return Err(parse_err(
                                path,
                                lineno,
                                col,
                                format!("entry {v} out of range for column {} with {} levels", j + 1, lv[j]),
                            ));
                        }
                    }
                    data.extend(nums);
                    rows += 1;
                }
            }
        }
        let (n, m) = header.ok_or_else(|| parse_err(path, last_line.max(1), 1, "missing `n m` header"))?;
        let levels = levels.ok_or_else(|| parse_err(path, last_line.max(1), 1, "missing level line"))?;
        if rows != n {
            return Err(parse_err(path, last_line.max(1), 1, format!("expected {n} rows, found {rows}")));
        }
        Ok(Self { matrix: Matrix::new(n, m, data)?, levels, metadata })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn declarations(&self) -> Result<Vec<Declaration>> {
        self.metadata
            .iter()
            .filter_map(|line| line.strip_prefix("declare:"))
            .map(|rest| Declaration::parse(rest.trim()).map_err(Error::invalid))
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for line in &self.metadata {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "{} {}", self.matrix.rows(), self.matrix.cols());
        let lv: Vec<String> = self.levels.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "{}", lv.join(" "));
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn design_file(design: &DesignMatrix, metadata: &[String]) -> DesignFile {
    DesignFile { matrix: design.to_matrix(), levels: design.levels().to_vec(), metadata: metadata.to_vec() }
}

pub fn write_design(path: &Path, design: &DesignMatrix, metadata: &[String]) -> Result<()> {
    write_atomic(path, &design_file(design, metadata).render())
}

/// Difference matrices are written with a `difference <group>` declaration.
pub fn write_difference(path: &Path, d: &DifferenceMatrix, metadata: &[String]) -> Result<()> {
    let mut meta = metadata.to_vec();
    meta.push(format!("declare: {}", Declaration::Difference(Some(d.group().name()))));
    let file = DesignFile { matrix: d.matrix().clone(), levels: vec![d.q(); d.cols()], metadata: meta };
    write_atomic(path, &file.render())
}

/// A verified design together with the declarations that were checked.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub design: DesignMatrix,
    pub verified: Vec<Declaration>,
    pub metadata: Vec<String>,
}

impl Ingested {
    pub fn is_oa(&self) -> bool {
        self.verified.contains(&Declaration::Strength2)
    }

    /// The design as an equidistant source; fails when it is not equidistant.
    pub fn equidistant(&self) -> Result<EquidistantDesign> {
        EquidistantDesign::certify(self.design.clone())
    }
}

fn verification(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::verification(format!("{}: {msg}", path.display()))
}

fn check_declarations(path: &Path, design: &DesignMatrix, decls: &[Declaration]) -> Result<()> {
    for decl in decls {
        match decl {
            Declaration::Strength2 => {
                if let Some((i, j)) = strength2_violation(design) {
                    return Err(verification(
                        path,
                        format!("declared strength 2, but columns {} and {} are not orthogonal", i + 1, j + 1),
                    ));
                }
            }
            Declaration::Lambda(v) => {
                let eq = EquidistantDesign::certify(design.clone()).map_err(|e| verification(path, e))?;
                if eq.lambda() != *v {
                    return Err(verification(path, format!("declared lambda {v}, found {}", eq.lambda())));
                }
            }
            Declaration::Difference(_) => {}
        }
    }
    Ok(())
}

/// Reads a design file, verifies balance and every declared property.
pub fn ingest(path: &Path) -> Result<Ingested> {
    let file = DesignFile::read(path)?;
    let decls = file.declarations()?;
    if decls.iter().any(|d| matches!(d, Declaration::Difference(_))) {
        return Err(Error::invalid(format!("{} holds a difference matrix; ingest it as one", path.display())));
    }
    let design = DesignMatrix::new(&file.matrix, file.levels.clone()).map_err(|e| verification(path, e))?;
    check_declarations(path, &design, &decls)?;
    Ok(Ingested { design, verified: decls, metadata: file.metadata })
}

/// Reads a difference matrix file. A `strength2` declaration turns a
/// strength-2 array into a difference matrix with a zero column prepended.
pub fn ingest_difference(path: &Path) -> Result<DifferenceMatrix> {
    let file = DesignFile::read(path)?;
    let decls = file.declarations()?;
    let q = *file.levels.first().ok_or_else(|| Error::invalid(format!("{} has no columns", path.display())))?;
    if let Some(j) = file.levels.iter().position(|&l| l != q) {
        return Err(verification(path, format!("column {} has {} levels, expected {q}", j + 1, file.levels[j])));
    }
    let group_name = decls.iter().find_map(|d| match d {
        Declaration::Difference(g) => Some(g.clone()),
        _ => None,
    });
    match group_name {
        Some(g) => {
            let group = match g {
                Some(name) => Group::parse(&name)?,
                None => Group::for_order(q)?,
            };
            if group.order() != q {
                return Err(verification(path, format!("{} does not have order {q}", group.name())));
            }
            DifferenceMatrix::new(file.matrix, group).map_err(|e| verification(path, e))
        }
        None if decls.contains(&Declaration::Strength2) => {
            let ing = ingest(path)?;
            let group = Group::for_order(q)?;
            let d = crate::generators::dm_from_oa(&ing.design, &group).map_err(|e| verification(path, e))?;
            crate::generators::prepend_zero_column(&d).map_err(|e| verification(path, e))
        }
        None => Err(Error::invalid(format!(
            "{} declares neither `difference` nor `strength2`",
            path.display()
        ))),
    }
}
