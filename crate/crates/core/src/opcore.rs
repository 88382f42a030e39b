//! Finite dimensional sparse operators with complex entries, and the small
//! algebra needed to check operator identities: composition, adjoint,
//! commutator, residual norms, block extraction and commutant dimension.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Singular values below this fraction of the largest one count as zero when
/// computing commutant dimensions.
pub const RANK_REL_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A `rows × cols` complex matrix stored as a map from `(row, col)` to value.
///
/// Only exact zeros are pruned. Values that cancel to `1e-17` through
/// rounding are kept, so an identity residual is never hidden by storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self::zeros_rect(dim, dim)
    }

    pub fn zeros_rect(rows: usize, cols: usize) -> Self {
        SparseOperator { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal((0..dim).map(|_| Complex64::new(1.0, 0.0)))
    }

    pub fn from_diagonal(values: impl IntoIterator<Item = Complex64>) -> Self {
        let mut entries = BTreeMap::new();
        let mut dim = 0;
        for (i, v) in values.into_iter().enumerate() {
            dim = i + 1;
            if v != ZERO {
                entries.insert((i, i), v);
            }
        }
        SparseOperator { rows: dim, cols: dim, entries }
    }

    /// Builds an operator from `(row, col, value)` triplets. Duplicate
    /// positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let mut op = Self::zeros_rect(rows, cols);
        for (r, c, v) in triplets {
            op.check_index(r, c)?;
            op.accumulate(r, c, v);
        }
        Ok(op)
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut op = Self::zeros_rect(m.nrows(), m.ncols());
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v != ZERO {
                    op.entries.insert((r, c), v);
                }
            }
        }
        op
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (&(r, c), &v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    /// Returns a copy with the entry at `(row, col)` replaced.
    pub fn with_entry(mut self, row: usize, col: usize, value: Complex64) -> Result<Self> {
        self.check_index(row, col)?;
        if value == ZERO {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(self)
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::IndexOutOfRange { row, col, rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    fn accumulate(&mut self, row: usize, col: usize, value: Complex64) {
        match self.entries.entry((row, col)) {
            Entry::Occupied(mut slot) => {
                let sum = *slot.get() + value;
                if sum == ZERO {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
            Entry::Vacant(slot) => {
                if value != ZERO {
                    slot.insert(value);
                }
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Dimension of a square operator (the row count otherwise).
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or(ZERO)
    }

    /// Stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    fn row(&self, row: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.entries.range((row, 0)..(row + 1, 0)).map(|(&(_, c), &v)| (c, v))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|&(r, c)| r == c)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zeros_rect(self.rows, self.cols);
        for (&pos, &v) in &self.entries {
            let w = v * factor;
            if w != ZERO {
                out.entries.insert(pos, w);
            }
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { left: self.shape(), right: other.shape() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (&(r, c), &v) in &other.entries {
            out.accumulate(r, c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (&(r, c), &v) in &other.entries {
            out.accumulate(r, c, -v);
        }
        Ok(out)
    }

    /// `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { left: self.shape(), right: other.shape() });
        }
        let mut out = Self::zeros_rect(self.rows, other.cols);
        for (&(r, k), &a) in &self.entries {
            for (c, b) in other.row(k) {
                out.accumulate(r, c, a * b);
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        SparseOperator {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), &v)| ((c, r), v.conj())).collect(),
        }
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        self.same_shape(other)?;
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Largest entry modulus; `0` for an operator with no stored entries.
    pub fn max_residual(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<Self> {
        let mut row_pos = BTreeMap::new();
        for (i, &r) in row_idx.iter().enumerate() {
            if r >= self.rows {
                return Err(Error::IndexOutOfRange { row: r, col: 0, rows: self.rows, cols: self.cols });
            }
            row_pos.insert(r, i);
        }
        let mut col_pos = BTreeMap::new();
        for (j, &c) in col_idx.iter().enumerate() {
            if c >= self.cols {
                return Err(Error::IndexOutOfRange { row: 0, col: c, rows: self.rows, cols: self.cols });
            }
            col_pos.insert(c, j);
        }
        let mut out = Self::zeros_rect(row_idx.len(), col_idx.len());
        for (&(r, c), &v) in &self.entries {
            if let (Some(&i), Some(&j)) = (row_pos.get(&r), col_pos.get(&c)) {
                out.entries.insert((i, j), v);
            }
        }
        Ok(out)
    }

    /// Restriction to the invariant subspace spanned by the listed basis
    /// vectors.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        self.submatrix(idx, idx)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { left: self.shape(), right: (v.len(), 1) });
        }
        let mut out = vec![ZERO; self.rows];
        for (&(r, c), &a) in &self.entries {
            out[r] += a * v[c];
        }
        Ok(out)
    }
}

/// Outcome of one named identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// An ordered list of named residual checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a residual check. A NaN residual never passes.
    pub fn record(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            max_abs_residual: residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    /// Records an exact (boolean) check as residual 0 or 1 against tolerance 0.
    pub fn record_exact(&mut self, name: impl Into<String>, holds: bool) {
        self.record(name, if holds { 0.0 } else { 1.0 }, 0.0);
    }

    /// Records `‖lhs − rhs‖_max` as the residual.
    pub fn record_difference(
        &mut self,
        name: impl Into<String>,
        lhs: &SparseOperator,
        rhs: &SparseOperator,
        tolerance: f64,
    ) {
        let residual = lhs.sub(rhs).map(|d| d.max_residual()).unwrap_or(f64::INFINITY);
        self.record(name, residual, tolerance);
    }

    /// Folds `other` into `self`. Checks sharing a name keep the worst
    /// residual; merging is associative and keeps first-seen order.
    pub fn merge(&mut self, other: VerificationReport) {
        for check in other.checks {
            match self.checks.iter_mut().find(|c| c.name == check.name) {
                Some(existing) => {
                    existing.max_abs_residual = worst(existing.max_abs_residual, check.max_abs_residual);
                    existing.tolerance = existing.tolerance.min(check.tolerance);
                    existing.pass = existing.max_abs_residual <= existing.tolerance;
                }
                None => self.checks.push(check),
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Dimension of `{X : [X, A] = 0 for every A in ops}` with the default rank
/// tolerance [`RANK_REL_TOL`]. By Schur's lemma a value of 1 certifies that
/// the operators act irreducibly.
pub fn commutant_dimension(ops: &[SparseOperator]) -> Result<usize> {
    commutant_dimension_with_tol(ops, RANK_REL_TOL)
}

/// Nullity of the stacked Sylvester system `A X − X A = 0`, computed from
/// the singular values of its connected blocks.
///
/// Unknowns pinned to zero by a one-term equation are eliminated first.
/// The unknowns `X_{kl}` split into groups that share no equation; the
/// stacked matrix is block diagonal in that grouping, so the rank is the sum
/// of the block ranks. Every block is judged against the largest singular
/// value of the whole system.
pub fn commutant_dimension_with_tol(ops: &[SparseOperator], rel_tol: f64) -> Result<usize> {
    let first = ops.first().ok_or(Error::EmptyOperatorList)?;
    if !first.is_square() {
        return Err(Error::NotSquare { rows: first.rows, cols: first.cols });
    }
    for op in ops {
        first.same_shape(op)?;
    }
    let d = first.dim();
    let n_vars = d * d;
    let var = |k: usize, l: usize| k * d + l;

    // Equation (i, j) of [A, X] = 0 reads Σ_k A_ik X_kj − Σ_k X_ik A_kj.
    let mut equations: Vec<BTreeMap<usize, Complex64>> = Vec::new();
    for op in ops {
        let mut rows: BTreeMap<(usize, usize), BTreeMap<usize, Complex64>> = BTreeMap::new();
        for (i, k, a) in op.iter() {
            for j in 0..d {
                *rows.entry((i, j)).or_default().entry(var(k, j)).or_insert(ZERO) += a;
            }
        }
        for (k, j, a) in op.iter() {
            for i in 0..d {
                *rows.entry((i, j)).or_default().entry(var(i, k)).or_insert(ZERO) -= a;
            }
        }
        for (_, mut row) in rows {
            row.retain(|_, v| *v != ZERO);
            if !row.is_empty() {
                equations.push(row);
            }
        }
    }

    // A row with a single significant coefficient forces its unknown to
    // vanish; substituting repeatedly shrinks the blocks handed to the SVD.
    let scale = equations.iter().flat_map(|r| r.values()).map(|v| v.norm()).fold(0.0, f64::max);
    let floor = rel_tol * scale;
    let mut zeroed = vec![false; n_vars];
    let mut forced = 0;
    loop {
        let mut changed = false;
        for row in &mut equations {
            row.retain(|v, _| !zeroed[*v]);
            if row.len() == 1 {
                let (&v, c) = row.iter().next().expect("one entry");
                if c.norm() > floor {
                    zeroed[v] = true;
                    forced += 1;
                    row.clear();
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    equations.retain(|row| !row.is_empty());

    let mut groups = UnionFind::new(n_vars);
    for row in &equations {
        let mut vars = row.keys();
        if let Some(&head) = vars.next() {
            for &v in vars {
                groups.union(head, v);
            }
        }
    }

    // Column position of each variable inside its group.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in (0..n_vars).filter(|&v| !zeroed[v]) {
        members.entry(groups.find(v)).or_default().push(v);
    }
    let mut rows_of: BTreeMap<usize, Vec<&BTreeMap<usize, Complex64>>> = BTreeMap::new();
    for row in &equations {
        let head = *row.keys().next().expect("empty rows are dropped");
        rows_of.entry(groups.find(head)).or_default().push(row);
    }

    let mut spectra = Vec::new();
    for (root, rows) in &rows_of {
        let vars = &members[root];
        let col_of: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(c, &v)| (v, c)).collect();
        let mut block = DMatrix::<Complex64>::zeros(rows.len(), vars.len());
        for (r, row) in rows.iter().enumerate() {
            for (v, &coeff) in row.iter() {
                block[(r, col_of[v])] = coeff;
            }
        }
        spectra.push(block.singular_values());
    }

    let sigma_max = spectra.iter().flat_map(|s| s.iter().copied()).fold(scale, f64::max);
    let rank: usize = if sigma_max == 0.0 {
        0
    } else {
        let cutoff = rel_tol * sigma_max;
        spectra.iter().map(|s| s.iter().filter(|&&x| x > cutoff).count()).sum()
    };
    Ok(n_vars - forced - rank)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = rb.min(ra);
        }
    }
}
