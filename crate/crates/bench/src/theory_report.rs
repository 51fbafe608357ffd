//! Recovery-condition reports from manual or brute-force RIP constants.

use std::path::Path;

use plad_core::linalg::SenseMatrix;
use plad_core::theory::{brute_force_rip_l1, theory_report, RecoveryParams, RipPair, TheoryReport};
use serde::Serialize;

use crate::config::{RipSource, TheoryConfig};
use crate::BenchError;

#[derive(Debug, Clone, Serialize)]
pub struct TheoryOutput {
    pub config: TheoryConfig,
    pub report: TheoryReport,
}

fn cfg_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Config(e.to_string())
}

fn rip_pairs(cfg: &TheoryConfig, base_dir: &Path) -> Result<(RipPair, RipPair), BenchError> {
    let ks = (cfg.k * cfg.s as f64).round() as usize;
    let k1s = ks + cfg.s;
    match &cfg.rip {
        RipSource::Manual { ks_lb, ks_ub, k1s_lb, k1s_ub } => {
            Ok((RipPair::new(ks, *ks_lb, *ks_ub), RipPair::new(k1s, *k1s_lb, *k1s_ub)))
        }
        RipSource::BruteForce { matrix_file, matrix, matrix_seed, samples, seed } => {
            let a = match (matrix_file, matrix) {
                (Some(path), None) => {
                    let path = base_dir.join(path);
                    let bytes = std::fs::read(&path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
                    SenseMatrix::from_bytes(&bytes).map_err(cfg_err)?
                }
                (None, Some(spec)) => spec.build(*matrix_seed).map_err(cfg_err)?,
                _ => return Err(cfg_err("brute_force needs exactly one of matrix_file or [rip.matrix]")),
            };
            let lo = brute_force_rip_l1(&a, ks, *samples, *seed).map_err(cfg_err)?;
            let hi = brute_force_rip_l1(&a, k1s, *samples, *seed).map_err(cfg_err)?;
            Ok((lo, hi))
        }
    }
}

/// Evaluates every condition and bound. Relative `matrix_file` paths are
/// resolved against `base_dir`.
pub fn run_theory_report(cfg: &TheoryConfig, base_dir: &Path) -> Result<TheoryOutput, BenchError> {
    let (rip_ks, rip_k1s) = rip_pairs(cfg, base_dir)?;
    let p = RecoveryParams { s: cfg.s, k: cfg.k, alpha: cfg.alpha, rip_ks, rip_k1s };
    let report = theory_report(&p, cfg.eta1, cfg.eta2, cfg.m, cfg.tail_norm).map_err(cfg_err)?;
    Ok(TheoryOutput { config: cfg.clone(), report })
}

impl TheoryOutput {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("theory reports are always serializable")
    }
}
