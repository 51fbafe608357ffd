//! Phantom reconstruction from noisy radial Fourier samples.

use plad_core::tv::{
    add_spectrum_noise, masked_spectrum, radial_mask, rms, shepp_logan, solve_tv_plad, zero_filled, FourierMask,
    TvConfig,
};
use serde::{Deserialize, Serialize};

use crate::config::MriConfig;
use crate::{derive_seed, to_json, Artifacts, BenchError, Report, REPORT_FILE};

const TAG_NOISE: u64 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRun {
    pub alpha: f64,
    pub rms: f64,
    pub iters_used: usize,
    pub converged: bool,
    pub final_primal_residual: f64,
    pub final_objective: f64,
    pub image_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MriReport {
    pub size: usize,
    pub kept_frequencies: usize,
    pub noise_seed: u64,
    pub zero_filled_rms: f64,
    pub runs: Vec<AlphaRun>,
    pub warnings: Vec<String>,
}

impl MriReport {
    pub fn rms_for(&self, alpha: f64) -> Option<f64> {
        self.runs.iter().find(|r| r.alpha == alpha).map(|r| r.rms)
    }
}

fn solver_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Solver(e.to_string())
}

fn image_name(alpha: f64) -> String {
    format!("recon_alpha_{alpha}.pgm")
}

/// Runs every alpha on the same noisy samples and returns the report plus
/// the PGM/PBM images keyed by file name.
pub fn run_mri(cfg: &MriConfig) -> Result<(MriReport, Artifacts), BenchError> {
    cfg.validate()?;
    let n = cfg.size;
    let truth = shepp_logan(n, cfg.phantom).map_err(|e| BenchError::Config(e.to_string()))?;
    let mask = if cfg.full_mask {
        FourierMask::full(n, n)
    } else {
        radial_mask(n, n, cfg.num_lines).map_err(|e| BenchError::Config(e.to_string()))?
    };
    let noise_seed = derive_seed(cfg.seed, TAG_NOISE);
    let clean = masked_spectrum(&truth, &mask).map_err(solver_err)?;
    let b = add_spectrum_noise(&clean, &cfg.noise, noise_seed).map_err(|e| BenchError::Config(e.to_string()))?;

    let mut images = Artifacts::default();
    images.push("phantom.pgm", truth.to_pgm());
    images.push("mask.pbm", mask.to_pbm());
    let zf = zero_filled(&b, &mask).map_err(solver_err)?;
    images.push("zero_filled.pgm", zf.to_pgm());

    let mut runs = Vec::new();
    let mut warnings = Vec::new();
    for &alpha in &cfg.alphas {
        let mut tc = TvConfig::for_shape(n, n, alpha, cfg.tv.lambda);
        tc.rho1 = cfg.tv.rho1;
        tc.rho2 = cfg.tv.rho2;
        tc.max_iters = cfg.tv.max_iters;
        if let Some(tol) = cfg.tv.primal_tol {
            tc.primal_tol = tol;
        }
        let (u, diag) = solve_tv_plad(&b, &mask, &tc, None).map_err(solver_err)?;
        for w in diag.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        let name = image_name(alpha);
        images.push(name.clone(), u.to_pgm());
        runs.push(AlphaRun {
            alpha,
            rms: rms(&u, &truth).map_err(solver_err)?,
            iters_used: diag.iters_used,
            converged: diag.converged,
            final_primal_residual: diag.primal_residual_history.last().copied().unwrap_or(0.0),
            final_objective: diag.objective_history.last().copied().unwrap_or(0.0),
            image_file: name,
        });
    }
    let report = MriReport {
        size: n,
        kept_frequencies: mask.count(),
        noise_seed,
        zero_filled_rms: rms(&zf, &truth).map_err(solver_err)?,
        runs,
        warnings,
    };
    Ok((report, images))
}

/// Images plus `report.json` for a config.
pub fn mri_artifacts(cfg: &MriConfig) -> Result<Artifacts, BenchError> {
    let (report, mut out) = run_mri(cfg)?;
    out.push(REPORT_FILE, to_json(&Report::Mri { config: cfg.clone(), result: report }));
    Ok(out)
}
