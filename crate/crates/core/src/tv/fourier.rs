//! Unitary 2-D DFT, periodic finite differences and radial sampling masks.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::image::Image2D;
use super::TvError;

/// Orthonormally scaled 2-D FFT for one grid size, so `F^* F = I`.
#[derive(Clone)]
pub struct Fft2 {
    n1: usize,
    n2: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n1", &self.n1).field("n2", &self.n2).finish()
    }
}

impl Fft2 {
    pub fn new(n1: usize, n2: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n1,
            n2,
            row_fwd: planner.plan_fft_forward(n2),
            row_inv: planner.plan_fft_inverse(n2),
            col_fwd: planner.plan_fft_forward(n1),
            col_inv: planner.plan_fft_inverse(n1),
            scale: 1.0 / ((n1 * n2) as f64).sqrt(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    fn run(&self, data: &mut [Complex64], rows: &Arc<dyn Fft<f64>>, cols: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.n1 * self.n2);
        rows.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); self.n1];
        for j in 0..self.n2 {
            for (i, c) in col.iter_mut().enumerate() {
                *c = data[i * self.n2 + j];
            }
            cols.process(&mut col);
            for (i, c) in col.iter().enumerate() {
                data[i * self.n2 + j] = *c * self.scale;
            }
        }
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_fwd, &self.col_fwd);
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_inv, &self.col_inv);
    }

    /// Spectrum of a real image.
    pub fn forward_real(&self, u: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut data);
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut data = spec.to_vec();
        self.inverse_in_place(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }
}

pub(crate) fn diff_x(u: &[f64], h: usize, w: usize, out: &mut [f64]) {
    for i in 0..h {
        let row = &u[i * w..(i + 1) * w];
        for j in 0..w {
            out[i * w + j] = row[(j + 1) % w] - row[j];
        }
    }
}

pub(crate) fn diff_y(u: &[f64], h: usize, w: usize, out: &mut [f64]) {
    for i in 0..h {
        let next = ((i + 1) % h) * w;
        for j in 0..w {
            out[i * w + j] = u[next + j] - u[i * w + j];
        }
    }
}

pub(crate) fn diff_x_adjoint(p: &[f64], h: usize, w: usize, out: &mut [f64]) {
    for i in 0..h {
        let row = &p[i * w..(i + 1) * w];
        for j in 0..w {
            out[i * w + j] = row[(j + w - 1) % w] - row[j];
        }
    }
}

pub(crate) fn diff_y_adjoint(p: &[f64], h: usize, w: usize, out: &mut [f64]) {
    for i in 0..h {
        let prev = ((i + h - 1) % h) * w;
        for j in 0..w {
            out[i * w + j] = p[prev + j] - p[i * w + j];
        }
    }
}

fn apply(u: &Image2D, op: fn(&[f64], usize, usize, &mut [f64])) -> Image2D {
    let mut out = Image2D::zeros(u.height(), u.width());
    op(u.pixels(), u.height(), u.width(), out.pixels_mut());
    out
}

/// `(D_x u)[i, j] = u[i, j+1 mod n2] - u[i, j]`
pub fn grad_x(u: &Image2D) -> Image2D {
    apply(u, diff_x)
}

/// `(D_y u)[i, j] = u[i+1 mod n1, j] - u[i, j]`
pub fn grad_y(u: &Image2D) -> Image2D {
    apply(u, diff_y)
}

/// Adjoint of [`grad_x`]: `p[i, j-1] - p[i, j]`.
pub fn grad_x_adjoint(p: &Image2D) -> Image2D {
    apply(p, diff_x_adjoint)
}

/// Adjoint of [`grad_y`]: `p[i-1, j] - p[i, j]`.
pub fn grad_y_adjoint(p: &Image2D) -> Image2D {
    apply(p, diff_y_adjoint)
}

/// Eigenvalue of `-Delta = D_x^T D_x + D_y^T D_y` at DFT index `(k1, k2)`:
/// `4 - 2 cos(2 pi k1 / n1) - 2 cos(2 pi k2 / n2)`, always `>= 0`.
pub fn neg_laplacian_symbol(k1: usize, k2: usize, n1: usize, n2: usize) -> f64 {
    4.0 - 2.0 * (2.0 * PI * k1 as f64 / n1 as f64).cos() - 2.0 * (2.0 * PI * k2 as f64 / n2 as f64).cos()
}

/// Set of sampled DFT coefficients, in unshifted FFT order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierMask {
    n1: usize,
    n2: usize,
    keep: Vec<bool>,
    num_lines: usize,
}

impl FourierMask {
    /// Validates DC membership and conjugate symmetry.
    pub fn new(n1: usize, n2: usize, keep: Vec<bool>, num_lines: usize) -> Result<Self, TvError> {
        if keep.len() != n1 * n2 || n1 == 0 || n2 == 0 {
            return Err(TvError::DimensionMismatch(format!(
                "mask of length {} for a {n1}x{n2} grid",
                keep.len()
            )));
        }
        let m = Self { n1, n2, keep, num_lines };
        if !m.keep[0] {
            return Err(TvError::InvalidMask("DC coefficient must be sampled".into()));
        }
        if !m.is_conjugate_symmetric() {
            return Err(TvError::InvalidMask("mask is not conjugate symmetric".into()));
        }
        Ok(m)
    }

    pub fn full(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            keep: vec![true; n1 * n2],
            num_lines: 0,
        }
    }

    /// Symmetrizes an arbitrary selection and adds DC.
    pub fn symmetrized(n1: usize, n2: usize, mut keep: Vec<bool>, num_lines: usize) -> Result<Self, TvError> {
        if keep.len() != n1 * n2 {
            return Err(TvError::DimensionMismatch("mask length".into()));
        }
        keep[0] = true;
        for i in 0..n1 {
            for j in 0..n2 {
                if keep[i * n2 + j] {
                    keep[((n1 - i) % n1) * n2 + (n2 - j) % n2] = true;
                }
            }
        }
        Self::new(n1, n2, keep, num_lines)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn is_kept(&self, k1: usize, k2: usize) -> bool {
        self.keep[k1 * self.n2 + k2]
    }

    pub fn count(&self) -> usize {
        self.keep.iter().filter(|k| **k).count()
    }

    /// Flat indices of the kept coefficients in increasing order. Masked
    /// spectra are stored in this order.
    pub fn kept_indices(&self) -> Vec<usize> {
        self.keep
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.then_some(i))
            .collect()
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        let (n1, n2) = (self.n1, self.n2);
        (0..n1).all(|i| {
            (0..n2).all(|j| self.keep[i * n2 + j] == self.keep[((n1 - i) % n1) * n2 + (n2 - j) % n2])
        })
    }

    /// Binary PBM (P4) with the zero frequency moved to the centre; set bits
    /// (black) mark sampled coefficients.
    pub fn write_pbm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let (n1, n2) = (self.n1, self.n2);
        write!(w, "P4\n{n2} {n1}\n")?;
        let row_bytes = n2.div_ceil(8);
        for r in 0..n1 {
            let k1 = (r + n1 - n1 / 2) % n1;
            let mut row = vec![0u8; row_bytes];
            for c in 0..n2 {
                let k2 = (c + n2 - n2 / 2) % n2;
                if self.is_kept(k1, k2) {
                    row[c / 8] |= 0x80 >> (c % 8);
                }
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    pub fn to_pbm(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_pbm(&mut out).expect("writing to a Vec cannot fail");
        out
    }
}

/// `num_lines` lines through the zero frequency at angles `pi l / num_lines`,
/// rasterized by stepping one coefficient at a time along the dominant axis
/// and rounding the other coordinate, then made conjugate symmetric.
pub fn radial_mask(n1: usize, n2: usize, num_lines: usize) -> Result<FourierMask, TvError> {
    if num_lines == 0 {
        return Err(TvError::InvalidMask("need at least one line".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(TvError::DimensionMismatch("empty grid".into()));
    }
    let mut keep = vec![false; n1 * n2];
    let (h1, h2) = ((n1 / 2) as i64, (n2 / 2) as i64);
    let wrap = |c: i64, n: usize| c.rem_euclid(n as i64) as usize;
    let aspect = n1 as f64 / n2 as f64;
    for l in 0..num_lines {
        let theta = PI * l as f64 / num_lines as f64;
        // direction in normalized frequency: (cos, sin) along (k2, k1)
        let (s, c) = theta.sin_cos();
        if c.abs() * aspect >= s.abs() {
            let slope = s / c * aspect;
            for k2 in -h2..=(n2 as i64 - 1 - h2) {
                let k1 = (k2 as f64 * slope).round() as i64;
                if k1 >= -h1 && k1 <= n1 as i64 - 1 - h1 {
                    keep[wrap(k1, n1) * n2 + wrap(k2, n2)] = true;
                }
            }
        } else {
            let slope = c / s / aspect;
            for k1 in -h1..=(n1 as i64 - 1 - h1) {
                let k2 = (k1 as f64 * slope).round() as i64;
                if k2 >= -h2 && k2 <= n2 as i64 - 1 - h2 {
                    keep[wrap(k1, n1) * n2 + wrap(k2, n2)] = true;
                }
            }
        }
    }
    FourierMask::symmetrized(n1, n2, keep, num_lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_is_unitary() {
        let f = Fft2::new(4, 6);
        let u: Vec<f64> = (0..24).map(|i| (i as f64 * 0.7).sin()).collect();
        let spec = f.forward_real(&u);
        let e_u: f64 = u.iter().map(|v| v * v).sum();
        let e_s: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        assert!((e_u - e_s).abs() < 1e-12);
        let back = f.inverse_real(&spec);
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).abs() < 1e-13);
        }
        // DC of a constant image is sqrt(N) times the value
        let c = f.forward_real(&[1.0; 24]);
        assert!((c[0].re - 24f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gradients_of_simple_images() {
        let c = Image2D::constant(5, 4, 3.0);
        assert!(grad_x(&c).pixels().iter().all(|v| *v == 0.0));
        assert!(grad_y(&c).pixels().iter().all(|v| *v == 0.0));

        let delta = Image2D::from_fn(4, 4, |i, j| if (i, j) == (0, 0) { 1.0 } else { 0.0 });
        let gx = grad_x(&delta);
        let nz: Vec<(usize, f64)> = gx
            .pixels()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| (k, *v))
            .collect();
        assert_eq!(nz, vec![(0, -1.0), (3, 1.0)]);
    }

    #[test]
    fn one_line_mask() {
        let m = radial_mask(16, 16, 1).unwrap();
        // horizontal line k1 = 0 through every k2
        for k2 in 0..16 {
            assert!(m.is_kept(0, k2));
        }
        assert_eq!(m.count(), 16);
        assert_eq!(m.num_lines(), 1);
    }

    #[test]
    fn masks_are_symmetric_with_dc() {
        for lines in [1, 2, 5, 12, 30] {
            let m = radial_mask(20, 14, lines).unwrap();
            assert!(m.is_kept(0, 0));
            assert!(m.is_conjugate_symmetric());
        }
        let bad = vec![false; 4];
        assert!(FourierMask::new(2, 2, bad, 0).is_err());
        let mut asym = vec![false; 9];
        asym[0] = true;
        asym[1] = true;
        assert!(FourierMask::new(3, 3, asym, 0).is_err());
        assert!(radial_mask(8, 8, 0).is_err());
    }

    #[test]
    fn pbm_layout() {
        let m = radial_mask(8, 10, 1).unwrap();
        let pbm = m.to_pbm();
        assert!(pbm.starts_with(b"P4\n10 8\n"));
        assert_eq!(pbm.len(), b"P4\n10 8\n".len() + 8 * 2);
    }
}
