//! Image reconstruction from partial Fourier samples with an `l1 - alpha l2`
//! total-variation penalty and an `l1` data term, solved by ADMM.
//!
//! The model is
//! `min_u lambda (|D_x u|_1 + |D_y u|_1 - alpha |(D_x u, D_y u)|_{2,1}) + |R F u - b|_1`
//! with `F` the unitary 2-D DFT and `R` the row selection of the mask. The
//! splitting `v = R F u - b`, `d_x = D_x u`, `d_y = D_y u` uses scaled
//! multipliers, so every dual step has unit length.

pub mod fourier;
pub mod image;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::{NoiseError, NoiseSpec};
use crate::solver::shrink;
use fourier::{diff_x, diff_x_adjoint, diff_y, diff_y_adjoint, neg_laplacian_symbol, Fft2};

pub use fourier::{grad_x, grad_x_adjoint, grad_y, grad_y_adjoint, radial_mask, FourierMask};
pub use image::{rms, shepp_logan, Image2D, PhantomKind, MAX_SIDE};

/// Magnitudes at or below this give a zero TV subgradient.
pub const TV_ZERO_GUARD: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum TvError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value")]
    NonFinite,
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("singular u-system at frequency ({k1}, {k2})")]
    SingularSystem { k1: usize, k2: usize },
    #[error("non-finite iterate at iteration {iter}")]
    Diverged { iter: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub max_iters: usize,
    pub primal_tol: f64,
}

impl TvConfig {
    /// `rho1 = rho2 = 0.5`, 3000 iterations, `primal_tol = 1e-5 sqrt(n1 n2)`.
    pub fn for_shape(n1: usize, n2: usize, alpha: f64, lambda: f64) -> Self {
        Self {
            alpha,
            lambda,
            rho1: 0.5,
            rho2: 0.5,
            max_iters: 3000,
            primal_tol: 1e-5 * ((n1 * n2) as f64).sqrt(),
        }
    }

    /// Rejects out-of-range values and returns warnings for penalties of 1
    /// or more, which are allowed.
    pub fn validate(&self) -> Result<Vec<String>, TvError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(TvError::InvalidConfig(format!("alpha = {} outside [0, 1]", self.alpha)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(TvError::InvalidConfig(format!("lambda = {} must be positive", self.lambda)));
        }
        for (name, r) in [("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(TvError::InvalidConfig(format!("{name} = {r} must be positive")));
            }
        }
        if !(self.primal_tol >= 0.0) {
            return Err(TvError::InvalidConfig("primal_tol must be nonnegative".into()));
        }
        Ok([("rho1", self.rho1), ("rho2", self.rho2)]
            .into_iter()
            .filter(|(_, r)| *r >= 1.0)
            .map(|(name, r)| format!("{name} = {r} is outside the customary (0, 1) range"))
            .collect())
    }
}

/// Full ADMM state. `v` and `w` live on the kept frequencies in
/// [`FourierMask::kept_indices`] order; `w`, `hx`, `hy` are scaled multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvState {
    pub u: Image2D,
    pub v: Vec<Complex64>,
    pub dx: Image2D,
    pub dy: Image2D,
    pub w: Vec<Complex64>,
    pub hx: Image2D,
    pub hy: Image2D,
    pub iter: usize,
}

impl TvState {
    pub fn zeros(mask: &FourierMask) -> Self {
        let (n1, n2) = mask.shape();
        let k = mask.count();
        let zero = Complex64::new(0.0, 0.0);
        Self {
            u: Image2D::zeros(n1, n2),
            v: vec![zero; k],
            dx: Image2D::zeros(n1, n2),
            dy: Image2D::zeros(n1, n2),
            w: vec![zero; k],
            hx: Image2D::zeros(n1, n2),
            hy: Image2D::zeros(n1, n2),
            iter: 0,
        }
    }

    fn check(&self, mask: &FourierMask) -> Result<(), TvError> {
        let (n1, n2) = mask.shape();
        let k = mask.count();
        let images = [&self.u, &self.dx, &self.dy, &self.hx, &self.hy];
        if images.iter().any(|im| im.height() != n1 || im.width() != n2) || self.v.len() != k || self.w.len() != k {
            return Err(TvError::DimensionMismatch("initial state does not match the mask".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvDiagnostics {
    pub iters_used: usize,
    pub converged: bool,
    /// `|RFu - v - b|_2 + |D_x u - d_x|_2 + |D_y u - d_y|_2` after each iteration.
    pub primal_residual_history: Vec<f64>,
    pub objective_history: Vec<f64>,
    pub warnings: Vec<String>,
    pub final_state: TvState,
}

/// Pointwise `(dx, dy) / |(dx, dy)|`, or zero where the magnitude is at most
/// [`TV_ZERO_GUARD`].
pub fn tv_subgradient(dx: &Image2D, dy: &Image2D) -> Result<(Image2D, Image2D), TvError> {
    if !dx.same_shape(dy) {
        return Err(TvError::DimensionMismatch("gradient pair shapes differ".into()));
    }
    let mut qx = Image2D::zeros(dx.height(), dx.width());
    let mut qy = Image2D::zeros(dx.height(), dx.width());
    subgradient_into(dx.pixels(), dy.pixels(), qx.pixels_mut(), qy.pixels_mut());
    Ok((qx, qy))
}

fn subgradient_into(dx: &[f64], dy: &[f64], qx: &mut [f64], qy: &mut [f64]) {
    for k in 0..dx.len() {
        let mag = dx[k].hypot(dy[k]);
        if mag > TV_ZERO_GUARD {
            qx[k] = dx[k] / mag;
            qy[k] = dy[k] / mag;
        } else {
            qx[k] = 0.0;
            qy[k] = 0.0;
        }
    }
}

/// `sum |(D_x u, D_y u)|` over pixels.
pub fn isotropic_tv(u: &Image2D) -> f64 {
    let gx = grad_x(u);
    let gy = grad_y(u);
    gx.pixels().iter().zip(gy.pixels()).map(|(a, b)| a.hypot(*b)).sum()
}

/// `sum |D_x u| + |D_y u|` over pixels.
pub fn anisotropic_tv(u: &Image2D) -> f64 {
    let gx = grad_x(u);
    let gy = grad_y(u);
    gx.pixels().iter().chain(gy.pixels()).map(|v| v.abs()).sum()
}

/// `rho1 keep + rho2 (4 - 2cos - 2cos)` at every frequency.
fn u_divisor(mask: &FourierMask, rho1: f64, rho2: f64) -> Result<Vec<f64>, TvError> {
    let (n1, n2) = mask.shape();
    let mut out = Vec::with_capacity(n1 * n2);
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let keep = if mask.is_kept(k1, k2) { rho1 } else { 0.0 };
            let d = keep + rho2 * neg_laplacian_symbol(k1, k2, n1, n2);
            if !(d >= 1e-30) {
                return Err(TvError::SingularSystem { k1, k2 });
            }
            out.push(d);
        }
    }
    Ok(out)
}

fn divide_in_fourier(fft: &Fft2, rhs: &[f64], divisor: &[f64]) -> Vec<f64> {
    let mut spec: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    fft.forward_in_place(&mut spec);
    for (s, d) in spec.iter_mut().zip(divisor) {
        *s /= *d;
    }
    fft.inverse_real(&spec)
}

/// Solves `(rho1 F^* R^T R F - rho2 Delta) u = rhs` with the periodic Laplacian.
pub fn solve_u_subproblem(rhs: &Image2D, rho1: f64, rho2: f64, mask: &FourierMask) -> Result<Image2D, TvError> {
    let (n1, n2) = mask.shape();
    if rhs.height() != n1 || rhs.width() != n2 {
        return Err(TvError::DimensionMismatch("rhs does not match the mask".into()));
    }
    if !(rho1 > 0.0) || !(rho2 >= 0.0) {
        return Err(TvError::InvalidConfig("rho1 must be positive and rho2 nonnegative".into()));
    }
    let divisor = u_divisor(mask, rho1, rho2)?;
    let fft = Fft2::new(n1, n2);
    Image2D::new(n1, n2, divide_in_fourier(&fft, rhs.pixels(), &divisor))
}

/// Kept coefficients of the unitary spectrum of `u`, in mask order.
pub fn masked_spectrum(u: &Image2D, mask: &FourierMask) -> Result<Vec<Complex64>, TvError> {
    let (n1, n2) = mask.shape();
    if u.height() != n1 || u.width() != n2 {
        return Err(TvError::DimensionMismatch("image does not match the mask".into()));
    }
    let spec = Fft2::new(n1, n2).forward_real(u.pixels());
    Ok(mask.kept_indices().into_iter().map(|k| spec[k]).collect())
}

/// `Re(F^* R^T b)`: zero-filled inverse transform of masked samples.
pub fn zero_filled(b: &[Complex64], mask: &FourierMask) -> Result<Image2D, TvError> {
    let (n1, n2) = mask.shape();
    let full = scatter(b, mask)?;
    Image2D::new(n1, n2, Fft2::new(n1, n2).inverse_real(&full))
}

fn scatter(b: &[Complex64], mask: &FourierMask) -> Result<Vec<Complex64>, TvError> {
    let (n1, n2) = mask.shape();
    let idx = mask.kept_indices();
    if b.len() != idx.len() {
        return Err(TvError::DimensionMismatch(format!(
            "{} samples for {} kept frequencies",
            b.len(),
            idx.len()
        )));
    }
    let mut full = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for (k, val) in idx.into_iter().zip(b) {
        full[k] = *val;
    }
    Ok(full)
}

/// Adds independent noise draws to the real and imaginary parts of each
/// sample. Draw `2k` perturbs the real part of sample `k`, draw `2k+1` the
/// imaginary part.
pub fn add_spectrum_noise(b: &[Complex64], noise: &NoiseSpec, seed: u64) -> Result<Vec<Complex64>, TvError> {
    let z = noise.sample(2 * b.len(), seed)?;
    Ok(b.iter()
        .zip(z.chunks_exact(2))
        .map(|(c, p)| Complex64::new(c.re + p[0], c.im + p[1]))
        .collect())
}

/// `lambda (|D_x u|_1 + |D_y u|_1 - alpha TV_iso(u)) + sum |RFu - b|`
pub fn tv_objective(u: &Image2D, b: &[Complex64], mask: &FourierMask, alpha: f64, lambda: f64) -> Result<f64, TvError> {
    let ru = masked_spectrum(u, mask)?;
    if ru.len() != b.len() {
        return Err(TvError::DimensionMismatch("sample count".into()));
    }
    let fit: f64 = ru.iter().zip(b).map(|(a, c)| (a - c).norm()).sum();
    Ok(lambda * (anisotropic_tv(u) - alpha * isotropic_tv(u)) + fit)
}

/// Runs ADMM on the TV model until the combined primal residual drops to
/// `cfg.primal_tol` or `cfg.max_iters` iterations have run.
pub fn solve_tv_plad(
    b: &[Complex64],
    mask: &FourierMask,
    cfg: &TvConfig,
    init: Option<TvState>,
) -> Result<(Image2D, TvDiagnostics), TvError> {
    let warnings = cfg.validate()?;
    let (n1, n2) = mask.shape();
    let npix = n1 * n2;
    let idx = mask.kept_indices();
    if b.len() != idx.len() {
        return Err(TvError::DimensionMismatch(format!(
            "{} samples for {} kept frequencies",
            b.len(),
            idx.len()
        )));
    }
    if b.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(TvError::NonFinite);
    }
    let mut st = match init {
        Some(s) => {
            s.check(mask)?;
            s
        }
        None => TvState::zeros(mask),
    };

    let fft = Fft2::new(n1, n2);
    let divisor = u_divisor(mask, cfg.rho1, cfg.rho2)?;
    let (rho1, rho2) = (cfg.rho1, cfg.rho2);
    let d_shift = cfg.lambda * cfg.alpha / rho2;
    let d_thresh = cfg.lambda / rho2;
    let v_thresh = 1.0 / rho1;

    let zero = Complex64::new(0.0, 0.0);
    let mut spec = vec![zero; npix];
    let mut qx = vec![0.0; npix];
    let mut qy = vec![0.0; npix];
    let mut rhs = vec![0.0; npix];
    let mut tmp = vec![0.0; npix];
    let mut gx = vec![0.0; npix];
    let mut gy = vec![0.0; npix];
    let mut ru = vec![zero; idx.len()];

    let mut residuals = Vec::new();
    let mut objectives = Vec::new();
    let mut converged = false;
    let mut iters_used = 0;

    for it in 1..=cfg.max_iters {
        // subgradient of the isotropic term at the current splits
        subgradient_into(st.dx.pixels(), st.dy.pixels(), &mut qx, &mut qy);

        // u-update: rho1 Re(F^* R^T (b + v + w)) + rho2 (D_x^T (dx + hx) + D_y^T (dy + hy))
        spec.fill(zero);
        for (j, &k) in idx.iter().enumerate() {
            spec[k] = (b[j] + st.v[j] + st.w[j]) * rho1;
        }
        fft.inverse_in_place(&mut spec);
        for (r, s) in rhs.iter_mut().zip(&spec) {
            *r = s.re;
        }
        for (t, (d, h)) in gx.iter_mut().zip(st.dx.pixels().iter().zip(st.hx.pixels())) {
            *t = rho2 * (d + h);
        }
        diff_x_adjoint(&gx, n1, n2, &mut tmp);
        rhs.iter_mut().zip(&tmp).for_each(|(r, t)| *r += t);
        for (t, (d, h)) in gy.iter_mut().zip(st.dy.pixels().iter().zip(st.hy.pixels())) {
            *t = rho2 * (d + h);
        }
        diff_y_adjoint(&gy, n1, n2, &mut tmp);
        rhs.iter_mut().zip(&tmp).for_each(|(r, t)| *r += t);
        let u = divide_in_fourier(&fft, &rhs, &divisor);
        st.u.pixels_mut().copy_from_slice(&u);

        // RFu and gradients of the new u
        for (s, &p) in spec.iter_mut().zip(st.u.pixels()) {
            *s = Complex64::new(p, 0.0);
        }
        fft.forward_in_place(&mut spec);
        for (j, &k) in idx.iter().enumerate() {
            ru[j] = spec[k];
        }
        diff_x(st.u.pixels(), n1, n2, &mut gx);
        diff_y(st.u.pixels(), n1, n2, &mut gy);

        // v-update: complex shrink of RFu - b - w
        for j in 0..idx.len() {
            let z = ru[j] - b[j] - st.w[j];
            let mag = z.norm();
            st.v[j] = if mag > v_thresh { z * ((mag - v_thresh) / mag) } else { zero };
        }

        // d-updates with the DCA shift
        for k in 0..npix {
            st.dx.pixels_mut()[k] = shrink(gx[k] - st.hx.pixels()[k] + d_shift * qx[k], d_thresh);
            st.dy.pixels_mut()[k] = shrink(gy[k] - st.hy.pixels()[k] + d_shift * qy[k], d_thresh);
        }

        // scaled dual steps and primal residual
        let mut r_v = 0.0;
        for j in 0..idx.len() {
            let r = ru[j] - st.v[j] - b[j];
            r_v += r.norm_sqr();
            st.w[j] -= r;
        }
        let mut r_x = 0.0;
        let mut r_y = 0.0;
        for k in 0..npix {
            let ex = gx[k] - st.dx.pixels()[k];
            let ey = gy[k] - st.dy.pixels()[k];
            r_x += ex * ex;
            r_y += ey * ey;
            st.hx.pixels_mut()[k] -= ex;
            st.hy.pixels_mut()[k] -= ey;
        }
        let residual = r_v.sqrt() + r_x.sqrt() + r_y.sqrt();
        st.iter += 1;
        iters_used = it;

        if !residual.is_finite() || st.u.pixels().iter().any(|p| !p.is_finite()) {
            return Err(TvError::Diverged { iter: it });
        }

        let fit: f64 = ru.iter().zip(b).map(|(a, c)| (a - c).norm()).sum();
        let aniso: f64 = gx.iter().chain(&gy).map(|v| v.abs()).sum();
        let iso: f64 = gx.iter().zip(&gy).map(|(a, c)| a.hypot(*c)).sum();
        objectives.push(cfg.lambda * (aniso - cfg.alpha * iso) + fit);
        residuals.push(residual);

        if residual <= cfg.primal_tol {
            converged = true;
            break;
        }
    }

    let u = st.u.clone();
    Ok((
        u,
        TvDiagnostics {
            iters_used,
            converged,
            primal_residual_history: residuals,
            objective_history: objectives,
            warnings,
            final_state: st,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgradient_examples() {
        let dx = Image2D::new(1, 3, vec![3.0, 0.0, 1.0]).unwrap();
        let dy = Image2D::new(1, 3, vec![4.0, 0.0, 0.0]).unwrap();
        let (qx, qy) = tv_subgradient(&dx, &dy).unwrap();
        assert_eq!(qx.pixels(), &[0.6, 0.0, 1.0]);
        assert_eq!(qy.pixels(), &[0.8, 0.0, 0.0]);
    }

    #[test]
    fn u_subproblem_trivial_cases() {
        let mask = FourierMask::full(4, 4);
        let rhs = Image2D::from_fn(4, 4, |i, j| (i * 4 + j) as f64 - 3.0);
        let u = solve_u_subproblem(&rhs, 2.0, 0.0, &mask).unwrap();
        for (a, b) in u.pixels().iter().zip(rhs.pixels()) {
            assert!((a - b / 2.0).abs() < 1e-12);
        }
        let m = radial_mask(6, 6, 2).unwrap();
        let z = solve_u_subproblem(&Image2D::zeros(6, 6), 0.5, 0.5, &m).unwrap();
        assert!(z.pixels().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_data_gives_zero_image() {
        let mask = radial_mask(16, 16, 4).unwrap();
        let b = vec![Complex64::new(0.0, 0.0); mask.count()];
        let cfg = TvConfig::for_shape(16, 16, 0.5, 0.1);
        let (u, diag) = solve_tv_plad(&b, &mask, &cfg, None).unwrap();
        assert!(u.pixels().iter().all(|v| *v == 0.0));
        assert!(diag.converged);
    }

    #[test]
    fn config_ranges() {
        let mut cfg = TvConfig::for_shape(8, 8, 0.5, 1.0);
        assert!(cfg.validate().unwrap().is_empty());
        cfg.rho1 = 2.0;
        assert_eq!(cfg.validate().unwrap().len(), 1);
        cfg.alpha = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tv_of_constant_is_zero() {
        let c = Image2D::constant(5, 5, 1.3);
        assert_eq!(isotropic_tv(&c), 0.0);
        assert_eq!(anisotropic_tv(&c), 0.0);
    }
}
