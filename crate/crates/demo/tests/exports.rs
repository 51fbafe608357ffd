use plad_demo::{noise_histogram, recover_sparse, reconstruct_phantom, DEMO_MAX_SIDE};

#[test]
fn phantom_reconstruction_beats_zero_fill() {
    let r = reconstruct_phantom(32, 10, 0.5, 0.05, 1e-4, 300, 1).unwrap();
    assert_eq!(r.size(), 32);
    assert_eq!(r.image().len(), 32 * 32);
    assert_eq!(r.truth().len(), 32 * 32);
    assert!(r.kept() > 0 && r.kept() < 32 * 32);
    assert!(r.rms() < r.zero_filled_rms(), "{} vs {}", r.rms(), r.zero_filled_rms());
    assert!(r.iters() <= 300);
}

#[test]
fn phantom_rejects_oversized_requests() {
    assert!(reconstruct_phantom(DEMO_MAX_SIDE + 1, 8, 0.5, 0.1, 0.0, 10, 1).is_err());
    assert!(reconstruct_phantom(16, 0, 0.5, 0.1, 0.0, 10, 1).is_err());
}

#[test]
fn histogram_counts_every_draw() {
    let h = noise_histogram(1.0, 1.0, 10_000, 40, 10.0, 3).unwrap();
    assert_eq!(h.len(), 41);
    assert_eq!(h.iter().map(|&c| c as usize).sum::<usize>(), 10_000);
    // Cauchy mass beyond |x| = 10 is 2 atan(1/10) / pi ~ 6.3%
    let outside = h[40] as f64 / 10_000.0;
    assert!((outside - 0.063).abs() < 0.01, "{outside}");
    // the two central bins carry the peak
    let peak = h[..40].iter().enumerate().max_by_key(|(_, c)| **c).unwrap().0;
    assert!(peak == 19 || peak == 20);
    assert!(noise_histogram(1.0, 1.0, 10, 0, 1.0, 0).is_err());
    assert!(noise_histogram(3.0, 1.0, 10, 4, 1.0, 0).is_err());
}

#[test]
fn sparse_recovery_succeeds_on_easy_instances() {
    let r = recover_sparse(64, 128, 3, 1.0, 0.3, 1e-4, 5).unwrap();
    assert_eq!(r.truth().len(), 128);
    assert_eq!(r.estimate().len(), 128);
    assert!(r.relative_error() < 1e-2, "{}", r.relative_error());
    assert!(recover_sparse(4, 8, 9, 1.0, 0.3, 0.0, 5).is_err());
}
