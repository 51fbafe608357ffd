//! Monte Carlo success-rate sweeps over sparsity, alpha and lambda.

use plad_core::linalg::{random_separated_sparse_signal, relative_error, SenseMatrix};
use plad_core::solver::{solve_plad, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::{derive_seed, to_json, Artifacts, BenchError, Report, REPORT_FILE};

pub const CSV_FILE: &str = "sweep.csv";

const TAG_TRIAL: u64 = 1;
const TAG_MATRIX: u64 = 2;
const TAG_SIGNAL: u64 = 3;
const TAG_NOISE: u64 = 4;

/// Statistics of one `(alpha, s, lambda)` combination over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaStats {
    pub lambda: f64,
    pub successes: usize,
    /// Successes judged on the last iterate instead of the best-objective one.
    pub last_iterate_successes: usize,
    pub solver_errors: usize,
    /// Mean over trials whose solve returned.
    pub mean_rel_err: f64,
    pub mean_iters: f64,
}

/// One `(alpha, s)` cell, reported at the lambda with the most successes
/// (ties: smaller mean error, then earlier in the sweep list).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub alpha: f64,
    pub s: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_rel_err: f64,
    pub mean_iters: f64,
    pub lambda_used: f64,
    pub per_lambda: Vec<LambdaStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub trial: usize,
    pub matrix: u64,
    /// Signal and noise seeds, one pair per sparsity in config order.
    pub signal: Vec<u64>,
    pub noise: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<CellResult>,
    pub min_coherence: f64,
    pub max_coherence: f64,
    pub trial_seeds: Vec<TrialSeeds>,
}

impl SweepResult {
    pub fn cell(&self, alpha: f64, s: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.alpha == alpha && c.s == s)
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    rel_err: Option<f64>,
    rel_err_last: Option<f64>,
    iters: usize,
}

struct TrialOutput {
    coherence: f64,
    /// Indexed `[s][alpha][lambda]`.
    outcomes: Vec<Vec<Vec<Outcome>>>,
}

fn trial_seeds(cfg: &SweepConfig, trial: usize) -> TrialSeeds {
    let t = derive_seed(cfg.seed ^ TAG_TRIAL, trial as u64);
    let matrix = if cfg.fix_matrix { derive_seed(cfg.seed, TAG_MATRIX) } else { derive_seed(t, TAG_MATRIX) };
    TrialSeeds {
        trial,
        matrix,
        signal: cfg.sparsities.iter().map(|&s| derive_seed(derive_seed(t, TAG_SIGNAL), s as u64)).collect(),
        noise: cfg.sparsities.iter().map(|&s| derive_seed(derive_seed(t, TAG_NOISE), s as u64)).collect(),
    }
}

fn solver_config(cfg: &SweepConfig, a: &SenseMatrix, alpha: f64, lambda: f64) -> SolverConfig {
    let mut sc = SolverConfig::for_matrix(a, alpha, lambda);
    let sec = &cfg.solver;
    sc.gamma = sec.gamma;
    if let Some(mu) = sec.mu {
        sc.mu = mu;
    }
    sc.max_iters = sec.max_iters;
    if let Some(tol) = sec.primal_tol {
        sc.primal_tol = tol;
    }
    sc.rel_change_tol = sec.rel_change_tol;
    sc.update_order = sec.update_order;
    sc
}

fn run_trial(cfg: &SweepConfig, seeds: &TrialSeeds, shared: Option<&SenseMatrix>) -> Result<TrialOutput, BenchError> {
    let owned;
    let a = match shared {
        Some(a) => a,
        None => {
            owned = cfg.matrix.build(seeds.matrix).map_err(|e| BenchError::Solver(e.to_string()))?;
            &owned
        }
    };
    let coherence = a.coherence().map_err(|e| BenchError::Solver(e.to_string()))?;
    let n = cfg.matrix.n;
    let mut outcomes = Vec::with_capacity(cfg.sparsities.len());
    for (si, &s) in cfg.sparsities.iter().enumerate() {
        let x = random_separated_sparse_signal(n, s, cfg.min_separation, seeds.signal[si])
            .map_err(|e| BenchError::Config(e.to_string()))?
            .to_dense();
        let z = cfg.noise.sample(cfg.matrix.m, seeds.noise[si]).map_err(|e| BenchError::Config(e.to_string()))?;
        let b: Vec<f64> = a.apply(&x).iter().zip(&z).map(|(v, e)| v + e).collect();
        let per_alpha = cfg
            .alpha_list
            .iter()
            .map(|&alpha| {
                cfg.solver
                    .lambda_sweep
                    .iter()
                    .map(|&lambda| match solve_plad(a, &b, &solver_config(cfg, a, alpha, lambda), None) {
                        Ok(r) => Outcome {
                            rel_err: Some(relative_error(&r.x_hat, &x)),
                            rel_err_last: Some(relative_error(&r.x_last, &x)),
                            iters: r.iters_used,
                        },
                        Err(_) => Outcome { rel_err: None, rel_err_last: None, iters: 0 },
                    })
                    .collect()
            })
            .collect();
        outcomes.push(per_alpha);
    }
    Ok(TrialOutput { coherence, outcomes })
}

/// Runs every trial (in parallel) and aggregates in trial order, so the
/// result does not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, BenchError> {
    cfg.validate()?;
    let seeds: Vec<TrialSeeds> = (0..cfg.trials).map(|t| trial_seeds(cfg, t)).collect();
    let shared = if cfg.fix_matrix {
        Some(cfg.matrix.build(seeds[0].matrix).map_err(|e| BenchError::Solver(e.to_string()))?)
    } else {
        None
    };
    let outputs: Vec<TrialOutput> = seeds
        .par_iter()
        .map(|s| run_trial(cfg, s, shared.as_ref()))
        .collect::<Result<_, _>>()?;

    let mut cells = Vec::new();
    for (ai, &alpha) in cfg.alpha_list.iter().enumerate() {
        for (si, &s) in cfg.sparsities.iter().enumerate() {
            let per_lambda: Vec<LambdaStats> = cfg
                .solver
                .lambda_sweep
                .iter()
                .enumerate()
                .map(|(li, &lambda)| {
                    let mut st = LambdaStats {
                        lambda,
                        successes: 0,
                        last_iterate_successes: 0,
                        solver_errors: 0,
                        mean_rel_err: 0.0,
                        mean_iters: 0.0,
                    };
                    let mut returned = 0usize;
                    for out in &outputs {
                        let o = out.outcomes[si][ai][li];
                        match (o.rel_err, o.rel_err_last) {
                            (Some(e), Some(el)) => {
                                returned += 1;
                                st.mean_rel_err += e;
                                st.mean_iters += o.iters as f64;
                                st.successes += usize::from(e <= cfg.success_threshold);
                                st.last_iterate_successes += usize::from(el <= cfg.success_threshold);
                            }
                            _ => st.solver_errors += 1,
                        }
                    }
                    if returned > 0 {
                        st.mean_rel_err /= returned as f64;
                        st.mean_iters /= returned as f64;
                    } else {
                        st.mean_rel_err = f64::NAN;
                    }
                    st
                })
                .collect();
            let best = per_lambda
                .iter()
                .enumerate()
                .min_by(|(i, x), (j, y)| {
                    y.successes
                        .cmp(&x.successes)
                        .then(x.mean_rel_err.total_cmp(&y.mean_rel_err))
                        .then(i.cmp(j))
                })
                .map(|(_, b)| b.clone())
                .expect("lambda_sweep is non-empty");
            cells.push(CellResult {
                alpha,
                s,
                trials: cfg.trials,
                successes: best.successes,
                success_rate: best.successes as f64 / cfg.trials as f64,
                mean_rel_err: best.mean_rel_err,
                mean_iters: best.mean_iters,
                lambda_used: best.lambda,
                per_lambda,
            });
        }
    }
    let (min_coherence, max_coherence) = outputs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o.coherence), hi.max(o.coherence)));
    Ok(SweepResult { cells, min_coherence, max_coherence, trial_seeds: seeds })
}

#[derive(Serialize)]
struct CsvRow {
    alpha: f64,
    s: usize,
    trials: usize,
    successes: usize,
    success_rate: f64,
    mean_rel_err: f64,
    mean_iters: f64,
    lambda_used: f64,
}

pub fn to_csv(result: &SweepResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in &result.cells {
        w.serialize(CsvRow {
            alpha: c.alpha,
            s: c.s,
            trials: c.trials,
            successes: c.successes,
            success_rate: c.success_rate,
            mean_rel_err: c.mean_rel_err,
            mean_iters: c.mean_iters,
            lambda_used: c.lambda_used,
        })
        .expect("csv rows are plain numbers");
    }
    w.into_inner().expect("writing to a Vec cannot fail")
}

/// `sweep.csv` and `report.json` for a config.
pub fn sweep_artifacts(cfg: &SweepConfig) -> Result<Artifacts, BenchError> {
    let result = run_sweep(cfg)?;
    let mut out = Artifacts::default();
    out.push(CSV_FILE, to_csv(&result));
    out.push(REPORT_FILE, to_json(&Report::Sweep { config: cfg.clone(), result }));
    Ok(out)
}
