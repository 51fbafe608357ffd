use num_complex::Complex64;
use plad_core::linalg::{random_separated_sparse_signal, random_sparse_signal, relative_error, SenseMatrix};
use plad_core::noise::NoiseSpec;
use plad_core::solver::{objective_value, solve_plad, SolverConfig, UpdateOrder};
use plad_core::tv::*;

#[test]
fn gaussian_recovery_under_cauchy_noise() {
    let a = SenseMatrix::gaussian(64, 128, 1).unwrap();
    let x = random_sparse_signal(128, 4, 2).unwrap().to_dense();
    let z = NoiseSpec::cauchy(1e-4).sample(64, 3).unwrap();
    let b: Vec<f64> = a.apply(&x).iter().zip(&z).map(|(v, e)| v + e).collect();
    let mut cfg = SolverConfig::for_matrix(&a, 1.0, 0.5);
    cfg.gamma = 3.0;
    cfg.mu = 0.99 / a.op_norm_sq();
    let res = solve_plad(&a, &b, &cfg, None).unwrap();
    assert!(relative_error(&res.x_hat, &x) < 1e-2);
    assert!(res.best_objective <= objective_value(&a, &b, &x, 1.0, 0.5) + 1e-9);
}

#[test]
fn listing_order_also_recovers() {
    let a = SenseMatrix::gaussian(48, 96, 4).unwrap();
    let x = random_sparse_signal(96, 3, 5).unwrap().to_dense();
    let b = a.apply(&x);
    let mut cfg = SolverConfig::for_matrix(&a, 0.5, 0.5);
    cfg.update_order = UpdateOrder::PaperListing;
    let res = solve_plad(&a, &b, &cfg, None).unwrap();
    assert!(relative_error(&res.x_hat, &x) < 1e-2);
}

#[test]
fn solver_is_deterministic() {
    let a = SenseMatrix::oversampled_dct(20, 60, 5.0, 7).unwrap();
    let x = random_separated_sparse_signal(60, 3, 10, 8).unwrap().to_dense();
    let b = a.apply(&x);
    let cfg = SolverConfig::for_matrix(&a, 0.5, 0.3);
    let r1 = solve_plad(&a, &b, &cfg, None).unwrap();
    let r2 = solve_plad(&a, &b, &cfg, None).unwrap();
    assert_eq!(r1.to_json(), r2.to_json());
}

#[test]
fn warm_start_continues_from_state() {
    let a = SenseMatrix::gaussian(30, 60, 9).unwrap();
    let x = random_sparse_signal(60, 2, 10).unwrap().to_dense();
    let b = a.apply(&x);
    let mut cfg = SolverConfig::for_matrix(&a, 0.5, 0.5);
    cfg.max_iters = 40;
    cfg.primal_tol = 0.0;
    let first = solve_plad(&a, &b, &cfg, None).unwrap();
    let second = solve_plad(&a, &b, &cfg, Some(first.final_state.clone())).unwrap();
    cfg.max_iters = 80;
    let whole = solve_plad(&a, &b, &cfg, None).unwrap();
    assert_eq!(second.x_last, whole.x_last);
    assert_eq!(second.final_state.iter, 80);
}

#[test]
fn noiseless_full_mask_reproduces_image() {
    let p = shepp_logan(32, PhantomKind::Classical).unwrap();
    let mask = FourierMask::full(32, 32);
    let b = masked_spectrum(&p, &mask).unwrap();
    let inverse = zero_filled(&b, &mask).unwrap();
    for alpha in [0.0, 0.5, 1.0] {
        let mut cfg = TvConfig::for_shape(32, 32, alpha, 1e-3);
        cfg.primal_tol = 1e-9;
        let (u, diag) = solve_tv_plad(&b, &mask, &cfg, None).unwrap();
        assert!(diag.converged);
        let rel = rms(&u, &inverse).unwrap() / rms(&inverse, &Image2D::zeros(32, 32)).unwrap();
        assert!(rel <= 1e-6, "alpha {alpha}: relative {rel:e}");
    }
}

#[test]
fn tv_reconstruction_beats_zero_filling_and_is_deterministic() {
    let n = 32;
    let p = shepp_logan(n, PhantomKind::Classical).unwrap();
    let mask = radial_mask(n, n, 10).unwrap();
    let b = add_spectrum_noise(&masked_spectrum(&p, &mask).unwrap(), &NoiseSpec::cauchy(1e-4), 1).unwrap();
    let cfg = TvConfig { max_iters: 400, ..TvConfig::for_shape(n, n, 0.5, 0.1) };
    let (u, diag) = solve_tv_plad(&b, &mask, &cfg, None).unwrap();
    let (u2, diag2) = solve_tv_plad(&b, &mask, &cfg, None).unwrap();
    assert_eq!(u, u2);
    assert_eq!(diag, diag2);
    let zf = zero_filled(&b, &mask).unwrap();
    assert!(rms(&u, &p).unwrap() < rms(&zf, &p).unwrap());
    assert_eq!(diag.objective_history.len(), diag.iters_used);
}

#[test]
fn tv_rejects_mismatched_samples() {
    let mask = radial_mask(8, 8, 2).unwrap();
    let b = vec![Complex64::new(0.0, 0.0); mask.count() + 1];
    let cfg = TvConfig::for_shape(8, 8, 0.5, 0.1);
    assert!(matches!(solve_tv_plad(&b, &mask, &cfg, None), Err(TvError::DimensionMismatch(_))));
}
