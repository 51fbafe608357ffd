//! WebAssembly bindings behind `www/index.html`. Each export takes plain
//! numbers and returns a small result object, so the page needs no glue
//! beyond what `wasm-bindgen` generates.

use plad_core::linalg::{random_sparse_signal, relative_error, SenseMatrix};
use plad_core::noise::NoiseSpec;
use plad_core::solver::{solve_plad, SolverConfig};
use plad_core::tv::{
    add_spectrum_noise, masked_spectrum, radial_mask, rms, shepp_logan, solve_tv_plad, zero_filled, Image2D,
    PhantomKind, TvConfig,
};
use wasm_bindgen::prelude::*;

/// Largest phantom side the page offers; bigger ones stall the tab.
pub const DEMO_MAX_SIDE: usize = 128;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Row-major 8-bit intensities, clamped to `[lo, hi]`.
fn to_gray(img: &Image2D, lo: f64, hi: f64) -> Vec<u8> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    img.pixels()
        .iter()
        .map(|v| (((v - lo) / span).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

#[wasm_bindgen]
pub struct Reconstruction {
    size: usize,
    kept: usize,
    rms: f64,
    zero_filled_rms: f64,
    iters: usize,
    image: Vec<u8>,
    zero_filled: Vec<u8>,
    truth: Vec<u8>,
}

#[wasm_bindgen]
impl Reconstruction {
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> usize {
        self.size
    }
    #[wasm_bindgen(getter)]
    pub fn kept(&self) -> usize {
        self.kept
    }
    #[wasm_bindgen(getter)]
    pub fn rms(&self) -> f64 {
        self.rms
    }
    #[wasm_bindgen(getter)]
    pub fn zero_filled_rms(&self) -> f64 {
        self.zero_filled_rms
    }
    #[wasm_bindgen(getter)]
    pub fn iters(&self) -> usize {
        self.iters
    }
    #[wasm_bindgen(getter)]
    pub fn image(&self) -> Vec<u8> {
        self.image.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn zero_filled(&self) -> Vec<u8> {
        self.zero_filled.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<u8> {
        self.truth.clone()
    }
}

/// Modified Shepp-Logan phantom sampled on `lines` radial lines with Cauchy
/// noise of the given dispersion (0 for none), reconstructed by TV-PLAD.
#[wasm_bindgen]
pub fn reconstruct_phantom(
    size: usize,
    lines: usize,
    alpha: f64,
    lambda: f64,
    dispersion: f64,
    iters: usize,
    seed: u64,
) -> Result<Reconstruction, String> {
    if size == 0 || size > DEMO_MAX_SIDE {
        return Err(format!("size must lie in 1..={DEMO_MAX_SIDE}"));
    }
    let truth = shepp_logan(size, PhantomKind::Modified).map_err(err)?;
    let mask = radial_mask(size, size, lines).map_err(err)?;
    let clean = masked_spectrum(&truth, &mask).map_err(err)?;
    let b = if dispersion > 0.0 {
        add_spectrum_noise(&clean, &NoiseSpec::cauchy(dispersion), seed).map_err(err)?
    } else {
        clean
    };
    let mut cfg = TvConfig::for_shape(size, size, alpha, lambda);
    cfg.max_iters = iters;
    let (u, diag) = solve_tv_plad(&b, &mask, &cfg, None).map_err(err)?;
    let zf = zero_filled(&b, &mask).map_err(err)?;
    Ok(Reconstruction {
        size,
        kept: mask.count(),
        rms: rms(&u, &truth).map_err(err)?,
        zero_filled_rms: rms(&zf, &truth).map_err(err)?,
        iters: diag.iters_used,
        image: to_gray(&u, 0.0, 1.0),
        zero_filled: to_gray(&zf, 0.0, 1.0),
        truth: to_gray(&truth, 0.0, 1.0),
    })
}

/// Histogram of `draws` symmetric stable samples over `[-range, range]`
/// with `bins` equal bins. Samples outside the range are counted in the
/// last element, which is one past the bins.
#[wasm_bindgen]
pub fn noise_histogram(tau: f64, dispersion: f64, draws: usize, bins: usize, range: f64, seed: u64) -> Result<Vec<u32>, String> {
    if bins == 0 || !(range > 0.0) {
        return Err("bins and range must be positive".into());
    }
    let spec = NoiseSpec::SymmetricStable { tau, dispersion };
    let x = spec.sample(draws, seed).map_err(err)?;
    let mut counts = vec![0u32; bins + 1];
    let width = 2.0 * range / bins as f64;
    for v in x {
        let slot = ((v + range) / width).floor();
        if slot >= 0.0 && (slot as usize) < bins {
            counts[slot as usize] += 1;
        } else {
            counts[bins] += 1;
        }
    }
    Ok(counts)
}

#[wasm_bindgen]
pub struct SparseRecovery {
    truth: Vec<f64>,
    estimate: Vec<f64>,
    relative_error: f64,
    iters: usize,
}

#[wasm_bindgen]
impl SparseRecovery {
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn relative_error(&self) -> f64 {
        self.relative_error
    }
    #[wasm_bindgen(getter)]
    pub fn iters(&self) -> usize {
        self.iters
    }
}

/// One `s`-sparse recovery from a Gaussian `m x n` matrix under Cauchy noise.
#[wasm_bindgen]
pub fn recover_sparse(
    m: usize,
    n: usize,
    s: usize,
    alpha: f64,
    lambda: f64,
    dispersion: f64,
    seed: u64,
) -> Result<SparseRecovery, String> {
    let a = SenseMatrix::gaussian(m, n, seed).map_err(err)?;
    let x = random_sparse_signal(n, s, seed.wrapping_add(1)).map_err(err)?.to_dense();
    let noise = if dispersion > 0.0 { NoiseSpec::cauchy(dispersion) } else { NoiseSpec::None };
    let z = noise.sample(m, seed.wrapping_add(2)).map_err(err)?;
    let b: Vec<f64> = a.apply(&x).iter().zip(&z).map(|(v, e)| v + e).collect();
    let mut cfg = SolverConfig::for_matrix(&a, alpha, lambda);
    cfg.gamma = 3.0;
    let res = solve_plad(&a, &b, &cfg, None).map_err(err)?;
    Ok(SparseRecovery {
        relative_error: relative_error(&res.x_hat, &x),
        iters: res.iters_used,
        truth: x,
        estimate: res.x_hat,
    })
}
