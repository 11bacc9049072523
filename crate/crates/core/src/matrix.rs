//! Level matrices, induced matrices and Kronecker-type compositions.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::Group;
use crate::error::{Error, Result};

/// Plain integer matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::invalid(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_columns<C: AsRef<[u32]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut out = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::invalid(format!("column {j} has {} entries, expected {rows}", c.len())));
            }
            for (i, &v) in c.iter().enumerate() {
                out.data[i * out.cols + j] = v;
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix> {
        if let Some(&j) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::invalid(format!("column {j} out of range")));
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Matrix::new(self.rows, idx.len(), data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Matrix> {
        if let Some(&i) = idx.iter().find(|&&i| i >= self.rows) {
            return Err(Error::invalid(format!("row {i} out of range")));
        }
        let mut data = Vec::with_capacity(self.cols * idx.len());
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::new(idx.len(), self.cols, data)
    }

    /// Stacks matrices on top of each other.
    pub fn vstack(parts: &[&Matrix]) -> Result<Matrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::invalid("vstack: column counts differ"));
        }
        let data = parts.iter().flat_map(|m| m.data.iter().copied()).collect::<Vec<_>>();
        Matrix::new(data.len() / cols.max(1), cols, data)
    }

    /// Places matrices side by side.
    pub fn hstack(parts: &[&Matrix]) -> Result<Matrix> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::invalid("hstack: row counts differ"));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for m in parts {
                data.extend_from_slice(m.row(i));
            }
        }
        Matrix::new(rows, cols, data)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A borrowed level column with its level count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column<'a> {
    pub values: &'a [u32],
    pub levels: u32,
}

impl<'a> Column<'a> {
    pub fn new(values: &'a [u32], levels: u32) -> Self {
        Self { values, levels }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn level_counts(&self) -> Option<Vec<usize>> {
        let mut counts = vec![0usize; self.levels as usize];
        for &v in self.values {
            *counts.get_mut(v as usize)? += 1;
        }
        Some(counts)
    }

    pub fn is_balanced(&self) -> bool {
        let n = self.values.len();
        self.levels > 0
            && n % self.levels as usize == 0
            && self
                .level_counts()
                .is_some_and(|c| c.iter().all(|&k| k == n / self.levels as usize))
    }

    pub fn check_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "column is not balanced over {} levels (length {})",
                self.levels,
                self.values.len()
            )))
        }
    }

    pub fn to_owned(&self) -> LevelColumn {
        LevelColumn { values: self.values.to_vec(), levels: self.levels }
    }

    /// Relabels levels in order of first appearance.
    pub fn canonical_labels(&self) -> Vec<u32> {
        let mut map: HashMap<u32, u32> = HashMap::new();
        self.values
            .iter()
            .map(|&v| {
                let next = map.len() as u32;
                *map.entry(v).or_insert(next)
            })
            .collect()
    }
}

/// An owned level column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelColumn {
    pub values: Vec<u32>,
    pub levels: u32,
}

impl LevelColumn {
    /// Builds a column, requiring balance.
    pub fn new(values: Vec<u32>, levels: u32) -> Result<Self> {
        let c = Self { values, levels };
        c.view().check_balanced()?;
        Ok(c)
    }

    pub fn view(&self) -> Column<'_> {
        Column { values: &self.values, levels: self.levels }
    }
}

/// A balanced design `F(n, q_1...q_m)`, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignMatrix {
    n: usize,
    m: usize,
    levels: Vec<u32>,
    data: Vec<u32>,
}

impl DesignMatrix {
    /// Builds a design from a row-major matrix and per-column level counts.
    pub fn new(matrix: &Matrix, levels: Vec<u32>) -> Result<Self> {
        if levels.len() != matrix.cols() {
            return Err(Error::invalid(format!(
                "{} level counts for {} columns",
                levels.len(),
                matrix.cols()
            )));
        }
        let columns: Vec<LevelColumn> = (0..matrix.cols())
            .map(|j| LevelColumn { values: matrix.column(j), levels: levels[j] })
            .collect();
        Self::from_columns(columns)
    }

    /// Builds a design inferring each column's level count as its maximum plus one.
    pub fn infer(matrix: &Matrix) -> Result<Self> {
        let levels = (0..matrix.cols())
            .map(|j| matrix.column(j).into_iter().max().map_or(1, |v| v + 1))
            .collect();
        Self::new(matrix, levels)
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R], levels: Vec<u32>) -> Result<Self> {
        Self::new(&Matrix::from_rows(rows)?, levels)
    }

    pub fn from_columns(columns: Vec<LevelColumn>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.values.len());
        let mut levels = Vec::with_capacity(columns.len());
        let mut data = Vec::with_capacity(n * columns.len());
        for (j, c) in columns.into_iter().enumerate() {
            if c.values.len() != n {
                return Err(Error::invalid(format!("column {} has length {}, expected {n}", j + 1, c.values.len())));
            }
            if !c.view().is_balanced() {
                return Err(Error::invalid(format!(
                    "column {} is not balanced over {} levels",
                    j + 1,
                    c.levels
                )));
            }
            levels.push(c.levels);
            data.extend(c.values);
        }
        Ok(Self { n, m: levels.len(), levels, data })
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&DesignMatrix]) -> Result<Self> {
        let n = parts.first().map_or(0, |d| d.n);
        if parts.iter().any(|d| d.n != n) {
            return Err(Error::invalid("hstack: run counts differ"));
        }
        Ok(Self {
            n,
            m: parts.iter().map(|d| d.m).sum(),
            levels: parts.iter().flat_map(|d| d.levels.iter().copied()).collect(),
            data: parts.iter().flat_map(|d| d.data.iter().copied()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> Column<'_> {
        Column { values: &self.data[j * self.n..(j + 1) * self.n], levels: self.levels[j] }
    }

    pub fn columns(&self) -> impl Iterator<Item = Column<'_>> {
        (0..self.m).map(move |j| self.column(j))
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        (0..self.m).map(|j| self.get(i, j)).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut out = Matrix::zeros(self.n, self.m);
        for j in 0..self.m {
            for i in 0..self.n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        let cols = idx
            .iter()
            .map(|&j| {
                (j < self.m)
                    .then(|| self.column(j).to_owned())
                    .ok_or_else(|| Error::invalid(format!("column {j} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(cols)
    }

    /// Applies a level permutation per column so the given row becomes all zeros.
    pub fn zero_row(&self, row: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.m {
            let q = self.levels[j];
            let pivot = self.get(row, j);
            for i in 0..self.n {
                let v = &mut out.data[j * self.n + i];
                *v = (*v + q - pivot) % q;
            }
        }
        out
    }

    /// Level signature as `(q, count)` pairs in order of first appearance.
    pub fn signature(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &q in &self.levels {
            match out.iter_mut().find(|(l, _)| *l == q) {
                Some((_, c)) => *c += 1,
                None => out.push((q, 1)),
            }
        }
        out
    }

    /// Shape string such as `F(18, 3^12)`, level counts in ascending order.
    pub fn shape(&self) -> String {
        let mut sig = self.signature();
        sig.sort();
        let parts: Vec<String> = sig.iter().map(|(q, c)| format!("{q}^{c}")).collect();
        format!("F({}, {})", self.n, parts.join(" "))
    }
}

/// The `n x q` indicator expansion of a balanced column, kept implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMatrix {
    column: LevelColumn,
}

pub fn induced_matrix(col: Column<'_>) -> Result<InducedMatrix> {
    col.check_balanced()?;
    Ok(InducedMatrix { column: col.to_owned() })
}

impl InducedMatrix {
    pub fn rows(&self) -> usize {
        self.column.values.len()
    }

    pub fn cols(&self) -> usize {
        self.column.levels as usize
    }

    pub fn get(&self, s: usize, t: usize) -> u32 {
        (self.column.values[s] as usize == t) as u32
    }

    pub fn materialize(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows(), self.cols());
        for (s, &v) in self.column.values.iter().enumerate() {
            out.set(s, v as usize, 1);
        }
        out
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::of(self.column.view())
    }
}

/// `X X'` of an induced matrix, represented by the partition of rows into level classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    labels: Vec<u32>,
}

impl GramMatrix {
    pub fn of(col: Column<'_>) -> Self {
        Self { labels: col.canonical_labels() }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        (self.labels[i] == self.labels[j]) as u32
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.n();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }
}

/// The permutation matrix `P_i` with `i + (0, ..., q-1) = (0, ..., q-1) P_i'`.
pub fn permutation_matrix(group: &Group, i: u32) -> Result<Matrix> {
    let q = group.order();
    if i >= q {
        return Err(Error::invalid(format!("element {i} outside {}", group.name())));
    }
    let mut p = Matrix::zeros(q as usize, q as usize);
    for k in 0..q {
        p.set(k as usize, group.add(i, k) as usize, 1);
    }
    Ok(p)
}

/// `A (+)_G B`: block `(i, j)` is `a_ij + B` elementwise.
pub fn kronecker_sum(a: &Matrix, b: &Matrix, group: &Group) -> Result<Matrix> {
    let q = group.order();
    if let Some(&v) = a.data.iter().chain(&b.data).find(|&&v| v >= q) {
        return Err(Error::invalid(format!("entry {v} outside {}", group.name())));
    }
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut data = Vec::with_capacity(rows * cols);
    for ai in 0..a.rows {
        for bi in 0..b.rows {
            for aj in 0..a.cols {
                let x = a.get(ai, aj);
                data.extend(b.row(bi).iter().map(|&y| group.add(x, y)));
            }
        }
    }
    Matrix::new(rows, cols, data)
}

/// Ordinary Kronecker product `A (x) B`.
pub fn kronecker_product(a: &Matrix, b: &Matrix) -> Matrix {
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    let mut data = Vec::with_capacity(rows * cols);
    for ai in 0..a.rows {
        for bi in 0..b.rows {
            for aj in 0..a.cols {
                let x = a.get(ai, aj);
                data.extend(b.row(bi).iter().map(|&y| x * y));
            }
        }
    }
    Matrix { rows, cols, data }
}

/// Combines a `q1`-level and a `q2`-level column into a `q1 q2`-level column of
/// length `n1 n2`; the entry for rows `(s, t)` is `q2 * f1[s] + f2[t]`.
pub fn mixed_combine(f1: Column<'_>, f2: Column<'_>) -> Result<LevelColumn> {
    f1.check_balanced()?;
    f2.check_balanced()?;
    let mut values = Vec::with_capacity(f1.len() * f2.len());
    for &a in f1.values {
        values.extend(f2.values.iter().map(|&b| f2.levels * a + b));
    }
    Ok(LevelColumn { values, levels: f1.levels * f2.levels })
}

/// Group sum of two columns, `f1 (+)_G f2`, with rows `(s, t)` in `s`-major order.
pub fn column_sum(f1: &[u32], f2: &[u32], group: &Group) -> Vec<u32> {
    let mut out = Vec::with_capacity(f1.len() * f2.len());
    for &a in f1 {
        out.extend(f2.iter().map(|&b| group.add(a, b)));
    }
    out
}
