//! Linearized ADMM with a DCA step for
//!
//! ```text
//! min_x  lambda (||x||_1 - alpha ||x||_2) + ||A x - b||_1
//! ```
//!
//! The data term is split as `y = A x - b`. Each iteration linearizes the
//! concave `-alpha ||x||_2` at the current iterate (direction `v = x/||x||_2`)
//! and the quadratic coupling term around `x`, which turns the x-update into
//! one soft-thresholding step. The y-update is a shrinkage with threshold
//! `1/gamma` and the multiplier takes a plain dual ascent step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dist2, norm1, norm2, SenseMatrix};

/// Below this Euclidean norm the DCA direction is taken to be zero.
pub const DCA_ZERO_GUARD: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("step mu = {mu} violates mu * ||A^T A|| < 1 (||A^T A|| ~ {op_norm_sq})")]
    StepTooLarge { mu: f64, op_norm_sq: f64 },
    #[error("non-finite iterate at iteration {iter}")]
    Diverged { iter: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Where the multiplier update takes its `y`.
///
/// `Standard` is the usual Gauss-Seidel ADMM sweep (x, then y with the old
/// multiplier, then the multiplier with the new x and y). `PaperListing`
/// reproduces the printed algorithm box, whose multiplier step uses the
/// previous `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    #[default]
    Standard,
    PaperListing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Weight of the subtracted l2 term, in `[0, 1]`; zero gives plain l1-PLAD.
    pub alpha: f64,
    pub lambda: f64,
    /// ADMM penalty.
    pub gamma: f64,
    /// Linearization step; must satisfy `mu * ||A^T A|| < 1`.
    pub mu: f64,
    pub max_iters: usize,
    pub primal_tol: f64,
    pub rel_change_tol: f64,
    #[serde(default)]
    pub update_order: UpdateOrder,
}

impl SolverConfig {
    /// Defaults for a given matrix: `gamma = 1`, `mu = 0.99 / ||A^T A||`,
    /// 5000 iterations, `primal_tol = 1e-6 sqrt(m)`, `rel_change_tol = 1e-8`.
    pub fn for_matrix(a: &SenseMatrix, alpha: f64, lambda: f64) -> Self {
        Self {
            alpha,
            lambda,
            gamma: 1.0,
            mu: 0.99 / a.op_norm_sq(),
            max_iters: 5000,
            primal_tol: 1e-6 * (a.rows() as f64).sqrt(),
            rel_change_tol: 1e-8,
            update_order: UpdateOrder::Standard,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidConfig(msg.to_string()));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad("lambda must be positive");
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return bad("gamma must be positive");
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return bad("mu must be positive");
        }
        if !(self.primal_tol >= 0.0) || !(self.rel_change_tol >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        Ok(())
    }
}

/// ADMM iterate `(x, y; w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub iter: usize,
}

impl SolverState {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; m],
            w: vec![0.0; m],
            iter: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    /// Iterate with the smallest objective seen (the starting point and zero included).
    pub x_hat: Vec<f64>,
    /// Final iterate of the loop.
    pub x_last: Vec<f64>,
    pub best_objective: f64,
    /// Iteration index at which `x_hat` was produced (0 = start).
    pub best_iter: usize,
    pub iters_used: usize,
    /// Refers to the final state: `||A x - y - b||_2 <= primal_tol` and the
    /// relative step `<= rel_change_tol` at the last iteration.
    pub converged: bool,
    pub primal_residual_history: Vec<f64>,
    pub objective_history: Vec<f64>,
    pub final_state: SolverState,
    pub config: SolverConfig,
}

/// Component-wise `sign(v_i) max(|v_i| - r, 0)`.
pub fn soft_threshold(v: &[f64], r: f64) -> Vec<f64> {
    v.iter().map(|&x| shrink(x, r)).collect()
}

#[inline]
pub(crate) fn shrink(x: f64, r: f64) -> f64 {
    let mag = x.abs() - r;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

/// Gradient of `||x||_2` away from the origin, zero at (or extremely near) it.
pub fn dca_subgradient(x: &[f64]) -> Vec<f64> {
    let nrm = norm2(x);
    if nrm > DCA_ZERO_GUARD {
        x.iter().map(|v| v / nrm).collect()
    } else {
        vec![0.0; x.len()]
    }
}

/// `lambda (||x||_1 - alpha ||x||_2) + ||A x - b||_1`
pub fn objective_value(a: &SenseMatrix, b: &[f64], x: &[f64], alpha: f64, lambda: f64) -> f64 {
    let ax = a.apply(x);
    objective_from_ax(&ax, b, x, alpha, lambda)
}

fn objective_from_ax(ax: &[f64], b: &[f64], x: &[f64], alpha: f64, lambda: f64) -> f64 {
    let fit: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).abs()).sum();
    lambda * (norm1(x) - alpha * norm2(x)) + fit
}

/// Runs the l1 - alpha l2 linearized ADMM from `init` (zeros by default).
pub fn solve_plad(
    a: &SenseMatrix,
    b: &[f64],
    cfg: &SolverConfig,
    init: Option<SolverState>,
) -> Result<SolverResult, SolverError> {
    cfg.validate()?;
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(SolverError::DimensionMismatch(format!(
            "b has length {}, A has {} rows",
            b.len(),
            m
        )));
    }
    let op = a.op_norm_sq();
    if cfg.mu * op >= 1.0 {
        return Err(SolverError::StepTooLarge {
            mu: cfg.mu,
            op_norm_sq: op,
        });
    }
    let mut st = init.unwrap_or_else(|| SolverState::zeros(n, m));
    if st.x.len() != n || st.y.len() != m || st.w.len() != m {
        return Err(SolverError::DimensionMismatch(
            "initial state does not match A".into(),
        ));
    }

    let (alpha, lambda, gamma, mu) = (cfg.alpha, cfg.lambda, cfg.gamma, cfg.mu);
    let x_thresh = lambda * mu / gamma;
    let dca_weight = lambda * alpha * mu / gamma;
    let y_thresh = 1.0 / gamma;

    let mut ax = a.apply(&st.x);
    let mut resid = vec![0.0; m];
    let mut grad = vec![0.0; n];
    let mut x_next = vec![0.0; n];

    let zero_obj = norm1(b);
    let start_obj = objective_from_ax(&ax, b, &st.x, alpha, lambda);
    let (mut best_x, mut best_obj, mut best_iter) = if start_obj <= zero_obj {
        (st.x.clone(), start_obj, 0)
    } else {
        (vec![0.0; n], zero_obj, 0)
    };

    let mut primal_hist = Vec::with_capacity(cfg.max_iters.min(1 << 16));
    let mut obj_hist = Vec::with_capacity(cfg.max_iters.min(1 << 16));
    let mut converged = false;

    for k in 0..cfg.max_iters {
        let v = dca_subgradient(&st.x);

        // x-update: one proximal-gradient step on the linearized subproblem
        for i in 0..m {
            resid[i] = ax[i] - b[i] - st.y[i] - st.w[i] / gamma;
        }
        a.apply_transpose_into(&resid, &mut grad);
        for j in 0..n {
            let z = st.x[j] - mu * grad[j] + dca_weight * v[j];
            x_next[j] = shrink(z, x_thresh);
        }
        a.apply_into(&x_next, &mut ax);

        // y-update, then multiplier
        let y_prev = match cfg.update_order {
            UpdateOrder::Standard => None,
            UpdateOrder::PaperListing => Some(st.y.clone()),
        };
        for i in 0..m {
            st.y[i] = shrink(ax[i] - b[i] - st.w[i] / gamma, y_thresh);
        }
        let y_for_w = y_prev.as_deref().unwrap_or(&st.y);
        for i in 0..m {
            st.w[i] -= gamma * (ax[i] - y_for_w[i] - b[i]);
        }

        let step = dist2(&x_next, &st.x) / norm2(&st.x).max(1.0);
        std::mem::swap(&mut st.x, &mut x_next);
        st.iter += 1;

        if st.x.iter().chain(&st.y).chain(&st.w).any(|v| !v.is_finite()) {
            return Err(SolverError::Diverged { iter: k + 1 });
        }

        let primal = (0..m)
            .map(|i| (ax[i] - st.y[i] - b[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let obj = objective_from_ax(&ax, b, &st.x, alpha, lambda);
        primal_hist.push(primal);
        obj_hist.push(obj);
        if obj < best_obj {
            best_obj = obj;
            best_x.copy_from_slice(&st.x);
            best_iter = k + 1;
        }

        if primal <= cfg.primal_tol && step <= cfg.rel_change_tol {
            converged = true;
            break;
        }
    }

    Ok(SolverResult {
        x_hat: best_x,
        x_last: st.x.clone(),
        best_objective: best_obj,
        best_iter,
        iters_used: primal_hist.len(),
        converged,
        primal_residual_history: primal_hist,
        objective_history: obj_hist,
        final_state: st,
        config: cfg.clone(),
    })
}

impl SolverResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solver result is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[3.0], 1.0), vec![2.0]);
        assert_eq!(soft_threshold(&[-0.5], 1.0), vec![0.0]);
        assert_eq!(soft_threshold(&[-2.0, 0.25], 0.5), vec![-1.5, 0.0]);
    }

    #[test]
    fn dca_examples() {
        assert_eq!(dca_subgradient(&[0.0, 0.0, 0.0]), vec![0.0; 3]);
        let v = dca_subgradient(&[3.0, 4.0]);
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        assert_eq!(dca_subgradient(&[1e-30, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn objective_examples() {
        let a = SenseMatrix::identity(3).unwrap();
        let b = [1.0, -2.0, 0.5];
        assert_eq!(objective_value(&a, &b, &[0.0; 3], 0.7, 2.0), 3.5);
        let x = [0.0, 4.0, 0.0];
        assert_eq!(objective_value(&a, &x, &x, 1.0, 3.0), 0.0);
    }

    #[test]
    fn zero_data_stays_at_zero() {
        let a = SenseMatrix::gaussian(10, 20, 1).unwrap();
        let cfg = SolverConfig::for_matrix(&a, 0.5, 0.1);
        let r = solve_plad(&a, &[0.0; 10], &cfg, None).unwrap();
        assert!(r.converged);
        assert!(r.iters_used <= 3);
        assert!(r.x_hat.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_large_step_and_bad_config() {
        let a = SenseMatrix::identity(4).unwrap();
        let mut cfg = SolverConfig::for_matrix(&a, 0.0, 1.0);
        cfg.mu = 1.0;
        assert!(matches!(
            solve_plad(&a, &[0.0; 4], &cfg, None),
            Err(SolverError::StepTooLarge { .. })
        ));
        cfg.mu = 0.5;
        cfg.alpha = 1.5;
        assert!(matches!(
            solve_plad(&a, &[0.0; 4], &cfg, None),
            Err(SolverError::InvalidConfig(_))
        ));
        cfg.alpha = 0.5;
        assert!(matches!(
            solve_plad(&a, &[0.0; 3], &cfg, None),
            Err(SolverError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn overflowing_multiplier_reports_divergence() {
        let a = SenseMatrix::identity(2).unwrap();
        let mut cfg = SolverConfig::for_matrix(&a, 0.0, 1.0);
        cfg.mu = 0.5;
        cfg.gamma = 1e-300;
        let init = SolverState {
            x: vec![0.0; 2],
            y: vec![0.0; 2],
            w: vec![1e10, -1e10],
            iter: 0,
        };
        let r = solve_plad(&a, &[1.0, 1.0], &cfg, Some(init));
        assert!(matches!(r, Err(SolverError::Diverged { .. })));
    }
}
