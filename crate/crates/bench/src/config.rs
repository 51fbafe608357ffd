//! TOML experiment descriptions.

use std::path::{Path, PathBuf};

use plad_core::linalg::{LinalgError, SenseMatrix};
use plad_core::noise::NoiseSpec;
use plad_core::solver::UpdateOrder;
use plad_core::tv::{PhantomKind, MAX_SIDE};
use serde::{Deserialize, Serialize};

use crate::BenchError;

fn default_trials() -> usize {
    50
}

fn default_threshold() -> f64 {
    1e-2
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::None
}

fn default_lambda_sweep() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 1.0]
}

fn default_gamma() -> f64 {
    1.0
}

fn default_max_iters() -> usize {
    5000
}

fn default_rel_change_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Gaussian,
    Dct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub kind: MatrixKind,
    pub m: usize,
    pub n: usize,
    /// Refinement factor of the DCT construction.
    #[serde(default, alias = "F", skip_serializing_if = "Option::is_none")]
    pub refinement: Option<f64>,
}

impl MatrixSpec {
    pub fn build(&self, seed: u64) -> Result<SenseMatrix, LinalgError> {
        match self.kind {
            MatrixKind::Gaussian => SenseMatrix::gaussian(self.m, self.n, seed),
            MatrixKind::Dct => SenseMatrix::oversampled_dct(self.m, self.n, self.refinement.unwrap_or(1.0), seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_lambda_sweep")]
    pub lambda_sweep: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Defaults to `0.99 / ||A||^2` for each matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Defaults to `1e-6 sqrt(m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_tol: Option<f64>,
    #[serde(default = "default_rel_change_tol")]
    pub rel_change_tol: f64,
    #[serde(default = "UpdateOrder::default")]
    pub update_order: UpdateOrder,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            lambda_sweep: default_lambda_sweep(),
            gamma: default_gamma(),
            mu: None,
            max_iters: default_max_iters(),
            primal_tol: None,
            rel_change_tol: default_rel_change_tol(),
            update_order: UpdateOrder::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub sparsities: Vec<usize>,
    pub alpha_list: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    /// Reuse one matrix for every trial instead of drawing a fresh one.
    #[serde(default)]
    pub fix_matrix: bool,
    /// Minimum index gap between spikes; 0 or 1 means unconstrained.
    #[serde(default)]
    pub min_separation: usize,
    pub matrix: MatrixSpec,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub solver: SolverSection,
}

fn bad(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(bad("trials must be at least 1"));
        }
        if self.sparsities.is_empty() || self.alpha_list.is_empty() {
            return Err(bad("sparsities and alpha_list must be non-empty"));
        }
        if self.sparsities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("sparsities must be strictly increasing"));
        }
        if self.sparsities[0] == 0 || *self.sparsities.last().unwrap() > self.matrix.n {
            return Err(bad(format!("sparsities must lie in 1..={}", self.matrix.n)));
        }
        if self.alpha_list.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(bad("every alpha must lie in [0, 1]"));
        }
        if !(self.success_threshold > 0.0) {
            return Err(bad("success_threshold must be positive"));
        }
        if self.matrix.m == 0 || self.matrix.n == 0 {
            return Err(bad("matrix dimensions must be positive"));
        }
        if self.matrix.kind == MatrixKind::Dct && self.matrix.refinement.is_none() {
            return Err(bad("a dct matrix needs a refinement factor F"));
        }
        if self.solver.lambda_sweep.is_empty() || self.solver.lambda_sweep.iter().any(|l| !(*l > 0.0)) {
            return Err(bad("lambda_sweep must hold positive values"));
        }
        if !(self.solver.gamma > 0.0) {
            return Err(bad("gamma must be positive"));
        }
        let s_max = *self.sparsities.last().unwrap();
        if self.min_separation > 1 && (s_max - 1) * self.min_separation + 1 > self.matrix.n {
            return Err(bad("min_separation cannot be met at the largest sparsity"));
        }
        self.noise.validate().map_err(|e| bad(e.to_string()))
    }
}

fn default_rho() -> f64 {
    0.5
}

fn default_tv_iters() -> usize {
    3000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TvSection {
    pub lambda: f64,
    #[serde(default = "default_rho")]
    pub rho1: f64,
    #[serde(default = "default_rho")]
    pub rho2: f64,
    #[serde(default = "default_tv_iters")]
    pub max_iters: usize,
    /// Defaults to `1e-5 sqrt(n1 n2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MriConfig {
    pub seed: u64,
    pub size: usize,
    /// Radial lines; ignored when `full_mask` is set.
    #[serde(default)]
    pub num_lines: usize,
    #[serde(default)]
    pub full_mask: bool,
    #[serde(default)]
    pub phantom: PhantomKind,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub alphas: Vec<f64>,
    pub tv: TvSection,
}

impl MriConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.size == 0 || self.size > MAX_SIDE {
            return Err(bad(format!("size must lie in 1..={MAX_SIDE}")));
        }
        if !self.full_mask && self.num_lines == 0 {
            return Err(bad("num_lines must be at least 1 unless full_mask is set"));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(bad("alphas must be a non-empty list in [0, 1]"));
        }
        if !(self.tv.lambda > 0.0) || !(self.tv.rho1 > 0.0) || !(self.tv.rho2 > 0.0) {
            return Err(bad("lambda, rho1 and rho2 must be positive"));
        }
        self.noise.validate().map_err(|e| bad(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum RipSource {
    /// Constants supplied directly: order `ks` and order `(k+1)s`.
    Manual {
        ks_lb: f64,
        ks_ub: f64,
        k1s_lb: f64,
        k1s_ub: f64,
    },
    /// Brute-force estimates on a tiny matrix read from an SMX1 file or
    /// generated from a matrix spec.
    BruteForce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix_file: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<MatrixSpec>,
        #[serde(default)]
        matrix_seed: u64,
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    pub s: usize,
    pub k: f64,
    pub alpha: f64,
    #[serde(default)]
    pub eta1: f64,
    #[serde(default)]
    pub eta2: f64,
    /// Row count used in the Dantzig-selector bound.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub tail_norm: f64,
    pub rip: RipSource,
}

fn default_m() -> usize {
    1
}

/// Reads and parses a TOML file.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}
