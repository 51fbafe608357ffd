use plad_core::linalg::SenseMatrix;

#[test]
fn gaussian_coherence_ranges() {
    // i.i.d. entries land around 0.33..0.40 here; only row-orthonormalized draws stay below 0.35
    for seed in 0..5 {
        let small = SenseMatrix::gaussian(128, 256, seed).unwrap().coherence().unwrap();
        assert!(small < 0.45, "128x256 seed {seed}: {small}");
    }
    for seed in 0..3 {
        let mild = SenseMatrix::gaussian(64, 1024, seed).unwrap().coherence().unwrap();
        assert!(mild > 0.5 && mild < 0.65, "64x1024 seed {seed}: {mild}");
    }
}

#[test]
fn refinement_drives_dct_coherence() {
    for seed in 0..10 {
        let fine = SenseMatrix::oversampled_dct(32, 640, 10.0, seed).unwrap().coherence().unwrap();
        let coarse = SenseMatrix::oversampled_dct(32, 640, 1.0, seed).unwrap().coherence().unwrap();
        assert!(fine > 0.99, "seed {seed}: {fine}");
        assert!(coarse < fine, "seed {seed}: {coarse} vs {fine}");
    }
}

#[test]
fn first_dct_column_is_constant() {
    let a = SenseMatrix::oversampled_dct(50, 8, 10.0, 3).unwrap();
    assert!(a.column(0).iter().all(|v| (v - 50f64.sqrt().recip()).abs() < 1e-15));
}
