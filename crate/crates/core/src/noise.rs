//! Impulsive measurement noise: a two-term Gaussian mixture and symmetric
//! alpha-stable laws drawn with the Chambers-Mallows-Stuck transform.
//!
//! The stable scale is called `dispersion` throughout so it does not clash
//! with the ADMM penalty.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("invalid noise parameters: {0}")]
    InvalidParameters(String),
}

/// `(1 - xi) N(0, sigma^2) + xi N(0, kappa sigma^2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub xi: f64,
    pub kappa: f64,
    pub sigma: f64,
}

/// Zero-location symmetric stable law with characteristic function
/// `exp(-dispersion^tau |w|^tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricStable {
    pub tau: f64,
    pub dispersion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    #[serde(rename = "gauss_mix")]
    GaussianMixture {
        xi: f64,
        kappa: f64,
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    #[serde(rename = "stable")]
    SymmetricStable { tau: f64, dispersion: f64 },
    None,
}

fn default_sigma() -> f64 {
    1e-2
}

impl GaussianMixture {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..1.0).contains(&self.xi) {
            return Err(NoiseError::InvalidParameters("xi must lie in [0, 1)".into()));
        }
        if !(self.kappa > 1.0) || !self.kappa.is_finite() {
            return Err(NoiseError::InvalidParameters("kappa must exceed 1".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(NoiseError::InvalidParameters("sigma must be positive".into()));
        }
        Ok(())
    }

    /// `(1 - xi) sigma^2 + xi kappa sigma^2`
    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma * ((1.0 - self.xi) + self.xi * self.kappa)
    }

    pub fn sample(&self, len: usize, seed: u64) -> Vec<f64> {
        self.sample_with_branches(len, seed).0
    }

    /// Draws plus, per draw, whether it came from the wide component.
    pub fn sample_with_branches(&self, len: usize, seed: u64) -> (Vec<f64>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wide_sd = self.sigma * self.kappa.sqrt();
        let mut values = Vec::with_capacity(len);
        let mut wide = Vec::with_capacity(len);
        for _ in 0..len {
            let is_wide = rng.random::<f64>() < self.xi;
            let z: f64 = rng.sample(StandardNormal);
            values.push(if is_wide { wide_sd * z } else { self.sigma * z });
            wide.push(is_wide);
        }
        (values, wide)
    }
}

impl SymmetricStable {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.tau > 0.0 && self.tau <= 2.0) {
            return Err(NoiseError::InvalidParameters("tau must lie in (0, 2]".into()));
        }
        if !(self.dispersion > 0.0) || !self.dispersion.is_finite() {
            return Err(NoiseError::InvalidParameters("dispersion must be positive".into()));
        }
        Ok(())
    }

    pub fn sample(&self, len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| self.draw(&mut rng)).collect()
    }

    /// One Chambers-Mallows-Stuck draw (skewness zero).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let tau = self.tau;
        // V uniform on the open interval (-pi/2, pi/2)
        let v = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break FRAC_PI_2 * (2.0 * u - 1.0);
            }
        };
        let x = if tau == 1.0 {
            v.tan()
        } else {
            let w: f64 = rng.sample(Exp1);
            let head = (tau * v).sin() / v.cos().powf(1.0 / tau);
            head * (((1.0 - tau) * v).cos() / w).powf((1.0 - tau) / tau)
        };
        self.dispersion * x
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        match *self {
            NoiseSpec::GaussianMixture { xi, kappa, sigma } => {
                GaussianMixture { xi, kappa, sigma }.validate()
            }
            NoiseSpec::SymmetricStable { tau, dispersion } => {
                SymmetricStable { tau, dispersion }.validate()
            }
            NoiseSpec::None => Ok(()),
        }
    }

    pub fn cauchy(dispersion: f64) -> Self {
        NoiseSpec::SymmetricStable {
            tau: 1.0,
            dispersion,
        }
    }

    /// `len` i.i.d. draws, a pure function of `(self, len, seed)`.
    pub fn sample(&self, len: usize, seed: u64) -> Result<Vec<f64>, NoiseError> {
        self.validate()?;
        Ok(match *self {
            NoiseSpec::GaussianMixture { xi, kappa, sigma } => {
                GaussianMixture { xi, kappa, sigma }.sample(len, seed)
            }
            NoiseSpec::SymmetricStable { tau, dispersion } => {
                SymmetricStable { tau, dispersion }.sample(len, seed)
            }
            NoiseSpec::None => vec![0.0; len],
        })
    }
}

/// Samples from a [`NoiseSpec::GaussianMixture`]; other variants are rejected.
pub fn sample_gaussian_mixture(spec: &NoiseSpec, len: usize, seed: u64) -> Result<Vec<f64>, NoiseError> {
    match spec {
        NoiseSpec::GaussianMixture { .. } => spec.sample(len, seed),
        _ => Err(NoiseError::InvalidParameters("expected a gauss_mix spec".into())),
    }
}

/// Samples from a [`NoiseSpec::SymmetricStable`]; other variants are rejected.
pub fn sample_symmetric_stable(spec: &NoiseSpec, len: usize, seed: u64) -> Result<Vec<f64>, NoiseError> {
    match spec {
        NoiseSpec::SymmetricStable { .. } => spec.sample(len, seed),
        _ => Err(NoiseError::InvalidParameters("expected a stable spec".into())),
    }
}
