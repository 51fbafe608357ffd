//! Dense sensing matrices, sparse test signals and small vector helpers.
//!
//! Matrices are stored row-major. The two cached quantities, the coherence
//! and the power-iteration estimate of `||A^T A||`, are filled at most once
//! through [`OnceLock`], so a matrix can be shared read-only across threads
//! after construction.

use std::io::{Read, Write};
use std::sync::OnceLock;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Columns whose Euclidean norm falls below this are treated as zero.
pub const ZERO_COLUMN_NORM: f64 = 1e-30;

/// Power-iteration defaults used when the cached operator norm is first requested.
pub const DEFAULT_POWER_ITERS: usize = 200;
pub const DEFAULT_POWER_TOL: f64 = 1e-9;

const SMX_MAGIC: &[u8; 4] = b"SMX1";

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyDimension { rows: usize, cols: usize },
    #[error("expected {expected} entries for the given shape, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("matrix entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("column {column} has (near) zero norm")]
    ZeroColumn { column: usize },
    #[error("sparsity {s} exceeds dimension {n}")]
    SparsityTooLarge { s: usize, n: usize },
    #[error("cannot place {s} spikes with separation {min_sep} in dimension {n}")]
    SeparationInfeasible { n: usize, s: usize, min_sep: usize },
    #[error("refinement factor must be >= 1 (got {0})")]
    BadRefinement(f64),
    #[error("bad matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of a power iteration on `A^T A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpNormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Dense `m x n` measurement matrix.
#[derive(Debug)]
pub struct SenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    op_norm_sq: OnceLock<OpNormEstimate>,
    coherence: OnceLock<f64>,
}

impl Clone for SenseMatrix {
    fn clone(&self) -> Self {
        let out = Self::from_parts(self.rows, self.cols, self.data.clone());
        if let Some(v) = self.op_norm_sq.get() {
            let _ = out.op_norm_sq.set(*v);
        }
        if let Some(v) = self.coherence.get() {
            let _ = out.coherence.set(*v);
        }
        out
    }
}

impl PartialEq for SenseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl SenseMatrix {
    fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        Self {
            rows,
            cols,
            data,
            op_norm_sq: OnceLock::new(),
            coherence: OnceLock::new(),
        }
    }

    /// Wraps a row-major buffer, checking the shape and that every entry is finite.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self::from_parts(rows, cols, data))
    }

    /// Builds a matrix column by column from `f(row, col)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// I.i.d. `N(0, 1/m)` entries, so each column has unit expected norm.
    pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension { rows, cols });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (rows as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self::from_row_major(rows, cols, data)
    }

    /// Randomly oversampled partial DCT matrix.
    ///
    /// Column `j` (0-based) is `cos(2 pi xi j / F) / sqrt(m)` with one draw of
    /// `xi ~ U([0,1]^m)` shared by all columns, so column 0 is constant.
    /// Larger refinement factors `F` make neighbouring columns more alike,
    /// so coherence grows with `F`.
    pub fn oversampled_dct(
        rows: usize,
        cols: usize,
        refinement: f64,
        seed: u64,
    ) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension { rows, cols });
        }
        if !(refinement >= 1.0) || !refinement.is_finite() {
            return Err(LinalgError::BadRefinement(refinement));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi: Vec<f64> = (0..rows).map(|_| rng.random::<f64>()).collect();
        let scale = 1.0 / (rows as f64).sqrt();
        let two_pi = 2.0 * std::f64::consts::PI;
        Self::from_fn(rows, cols, |i, j| {
            scale * (two_pi * xi[i] * j as f64 / refinement).cos()
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// `out = A x`
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "apply: x has wrong length");
        assert_eq!(out.len(), self.rows, "apply: out has wrong length");
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        out
    }

    /// `out = A^T y`
    pub fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.rows, "apply_transpose: y has wrong length");
        assert_eq!(out.len(), self.cols, "apply_transpose: out has wrong length");
        out.fill(0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.apply_transpose_into(y, &mut out);
        out
    }

    /// Multiplies column `col` by `factor` in place and drops the caches.
    pub fn scale_column(&mut self, col: usize, factor: f64) {
        for i in 0..self.rows {
            self.data[i * self.cols + col] *= factor;
        }
        self.op_norm_sq = OnceLock::new();
        self.coherence = OnceLock::new();
    }

    /// Returns a new matrix whose column `j` is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.cols);
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(perm.iter().map(|&p| row[p]));
        }
        Self::from_parts(self.rows, self.cols, data)
    }

    /// Mutual coherence: the largest normalized absolute inner product
    /// between two distinct columns. Zero for a single column.
    pub fn coherence(&self) -> Result<f64, LinalgError> {
        if let Some(c) = self.coherence.get() {
            return Ok(*c);
        }
        let c = self.compute_coherence()?;
        Ok(*self.coherence.get_or_init(|| c))
    }

    fn compute_coherence(&self) -> Result<f64, LinalgError> {
        let n = self.cols;
        // column-major copy keeps the pairwise sweep cache friendly
        let cols: Vec<Vec<f64>> = (0..n).map(|j| self.column(j)).collect();
        let norms: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
        if let Some(column) = norms.iter().position(|&v| v < ZERO_COLUMN_NORM) {
            return Err(LinalgError::ZeroColumn { column });
        }
        let mut best = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let c = dot(&cols[i], &cols[j]).abs() / (norms[i] * norms[j]);
                best = best.max(c);
            }
        }
        Ok(best.min(1.0))
    }

    /// Power iteration on `A^T A` starting from the normalized all-ones vector.
    ///
    /// The returned value is a Rayleigh quotient, hence never above the true
    /// largest eigenvalue. It is floored by the largest squared column norm
    /// (itself a Rayleigh quotient at a basis vector). The first call fills
    /// the cache read by [`SenseMatrix::op_norm_sq`].
    pub fn estimate_op_norm_sq(&self, iters: usize, tol: f64) -> OpNormEstimate {
        let est = self.power_iteration(iters.max(1), tol);
        let _ = self.op_norm_sq.set(est);
        est
    }

    fn power_iteration(&self, iters: usize, tol: f64) -> OpNormEstimate {
        let n = self.cols;
        let col_floor = (0..n)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).powi(2)).sum::<f64>())
            .fold(0.0_f64, f64::max);

        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut av = vec![0.0; self.rows];
        let mut atav = vec![0.0; n];
        let mut rq = 0.0;
        let mut converged = false;
        let mut used = 0;
        for it in 1..=iters {
            used = it;
            self.apply_into(&v, &mut av);
            let next = dot(&av, &av);
            self.apply_transpose_into(&av, &mut atav);
            let nrm = norm2(&atav);
            let change = (next - rq).abs();
            rq = next;
            if nrm == 0.0 {
                converged = true;
                break;
            }
            for (vi, &w) in v.iter_mut().zip(&atav) {
                *vi = w / nrm;
            }
            if it > 1 && change <= tol * rq.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        OpNormEstimate {
            value: rq.max(col_floor),
            iterations: used,
            converged,
        }
    }

    /// Cached estimate of the largest eigenvalue of `A^T A`, computed with the
    /// default power-iteration settings on first use.
    pub fn op_norm_sq(&self) -> f64 {
        self.op_norm_sq
            .get_or_init(|| self.power_iteration(DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL))
            .value
    }

    pub fn op_norm_estimate(&self) -> Option<OpNormEstimate> {
        self.op_norm_sq.get().copied()
    }

    /// Serializes as `"SMX1"`, `u32` rows, `u32` cols (little-endian), then
    /// the row-major entries as little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), LinalgError> {
        w.write_all(SMX_MAGIC)?;
        w.write_all(&(self.rows as u32).to_le_bytes())?;
        w.write_all(&(self.cols as u32).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.data.len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, LinalgError> {
        let mut head = [0u8; 12];
        r.read_exact(&mut head)
            .map_err(|_| LinalgError::Format("truncated header".into()))?;
        if &head[..4] != SMX_MAGIC {
            return Err(LinalgError::Format("missing SMX1 magic".into()));
        }
        let rows = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let mut data = Vec::with_capacity(rows * cols);
        let mut buf = [0u8; 8];
        for _ in 0..rows * cols {
            r.read_exact(&mut buf)
                .map_err(|_| LinalgError::Format("truncated payload".into()))?;
            data.push(f64::from_le_bytes(buf));
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LinalgError> {
        let m = Self::read_from(bytes)?;
        if bytes.len() != 12 + 8 * m.rows * m.cols {
            return Err(LinalgError::Format("trailing bytes after payload".into()));
        }
        Ok(m)
    }
}

/// An `s`-sparse vector in `R^n` stored by support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    n: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    /// `support` must be strictly increasing and in range, `values` nonzero.
    pub fn new(n: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self, LinalgError> {
        if support.len() != values.len() {
            return Err(LinalgError::ShapeMismatch {
                expected: support.len(),
                got: values.len(),
            });
        }
        if support.len() > n {
            return Err(LinalgError::SparsityTooLarge { s: support.len(), n });
        }
        let sorted = support.windows(2).all(|w| w[0] < w[1]);
        let in_range = support.last().is_none_or(|&i| i < n);
        if !sorted || !in_range {
            return Err(LinalgError::Format("support must be strictly increasing and < n".into()));
        }
        if let Some(index) = values.iter().position(|v| *v == 0.0 || !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { n, support, values })
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(x: &[f64]) -> Self {
        let (support, values) = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        Self {
            n: x.len(),
            support,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

/// Uniformly random support of size `s`, i.i.d. standard normal values,
/// rescaled to unit Euclidean norm.
pub fn random_sparse_signal(n: usize, s: usize, seed: u64) -> Result<SparseSignal, LinalgError> {
    if s > n {
        return Err(LinalgError::SparsityTooLarge { s, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let values = normal_unit_values(&mut rng, s);
    SparseSignal::new(n, support, values)
}

/// Like [`random_sparse_signal`] but with any two support indices at least
/// `min_sep` apart. Picks `s` of `n - (s-1)(min_sep-1)` slots and spreads
/// them out, which is uniform over feasible supports.
pub fn random_separated_sparse_signal(
    n: usize,
    s: usize,
    min_sep: usize,
    seed: u64,
) -> Result<SparseSignal, LinalgError> {
    if s > n {
        return Err(LinalgError::SparsityTooLarge { s, n });
    }
    if min_sep <= 1 || s <= 1 {
        return random_sparse_signal(n, s, seed);
    }
    let need = (s - 1) * min_sep + 1;
    if need > n {
        return Err(LinalgError::SeparationInfeasible { n, s, min_sep });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = n - (s - 1) * (min_sep - 1);
    let mut base = index::sample(&mut rng, slots, s).into_vec();
    base.sort_unstable();
    let support = base
        .iter()
        .enumerate()
        .map(|(k, &b)| b + k * (min_sep - 1))
        .collect();
    let values = normal_unit_values(&mut rng, s);
    SparseSignal::new(n, support, values)
}

fn normal_unit_values(rng: &mut ChaCha8Rng, s: usize) -> Vec<f64> {
    loop {
        let vals: Vec<f64> = (0..s).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = norm2(&vals);
        if nrm > 0.0 && vals.iter().all(|v| *v != 0.0) {
            return vals.into_iter().map(|v| v / nrm).collect();
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `||a - b||_2`
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `||x_hat - x||_2 / ||x||_2`, falling back to the absolute error for `x = 0`.
pub fn relative_error(x_hat: &[f64], x: &[f64]) -> f64 {
    let d = dist2(x_hat, x);
    let nx = norm2(x);
    if nx > 0.0 {
        d / nx
    } else {
        d
    }
}
