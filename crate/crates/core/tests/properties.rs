use plad_core::linalg::{norm2, SenseMatrix, SparseSignal};
use plad_core::solver::{dca_subgradient, soft_threshold};
use plad_core::theory::{check_cone_constraint, check_lemma2_bounds, l1_minus_alpha_l2};
use plad_core::tv::fourier::Fft2;
use plad_core::tv::{
    grad_x, grad_x_adjoint, grad_y, grad_y_adjoint, isotropic_tv, radial_mask, shepp_logan, tv_subgradient,
    Image2D, PhantomKind,
};
use proptest::prelude::*;

fn inner(a: &Image2D, b: &Image2D) -> f64 {
    a.pixels().iter().zip(b.pixels()).map(|(x, y)| x * y).sum()
}

fn image(h: usize, w: usize) -> impl Strategy<Value = Image2D> {
    prop::collection::vec(-5.0f64..5.0, h * w).prop_map(move |p| Image2D::new(h, w, p).unwrap())
}

fn sized_images() -> impl Strategy<Value = (Image2D, Image2D)> {
    (1usize..9, 1usize..9).prop_flat_map(|(h, w)| (image(h, w), image(h, w)))
}

proptest! {
    #[test]
    fn soft_threshold_is_nonexpansive(
        v in prop::collection::vec(-10.0f64..10.0, 1..20),
        r in 0.0f64..5.0,
        shift in -3.0f64..3.0,
    ) {
        let u: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let (sv, su) = (soft_threshold(&v, r), soft_threshold(&u, r));
        for i in 0..v.len() {
            prop_assert!((sv[i] - su[i]).abs() <= (v[i] - u[i]).abs() + 1e-12);
            prop_assert!(sv[i].abs() <= v[i].abs());
            prop_assert!(sv[i] == 0.0 || sv[i].signum() == v[i].signum());
        }
    }

    #[test]
    fn dca_subgradient_is_unit_or_zero(v in prop::collection::vec(-10.0f64..10.0, 1..20)) {
        let g = dca_subgradient(&v);
        let n = norm2(&g);
        prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lemma2_bounds_hold(
        vals in prop::collection::vec(prop_oneof![-10.0f64..-1e-3, 1e-3f64..10.0], 1..12),
        alpha in 0.0f64..=1.0,
        pad in 0usize..10,
    ) {
        let n = vals.len() + pad;
        let support: Vec<usize> = (0..vals.len()).map(|i| i + pad / 2).collect();
        let x = SparseSignal::new(n, support, vals).unwrap();
        let (lower, upper) = check_lemma2_bounds(&x, alpha);
        prop_assert!(lower && upper);
    }

    #[test]
    fn cone_constraint_holds_when_objective_drops(
        x in prop::collection::vec(-5.0f64..5.0, 2..16),
        dir in prop::collection::vec(-5.0f64..5.0, 16),
        alpha in 0.0f64..=1.0,
        s_frac in 0.0f64..1.0,
    ) {
        let n = x.len();
        let s = 1 + ((n - 1) as f64 * s_frac) as usize;
        let fx = l1_minus_alpha_l2(&x, alpha);
        // shrink a random candidate towards zero until its objective is at most ||x||_(alpha,1-2)
        let mut x_hat: Vec<f64> = dir[..n].to_vec();
        while l1_minus_alpha_l2(&x_hat, alpha) > fx {
            x_hat.iter_mut().for_each(|v| *v *= 0.5);
        }
        let c = check_cone_constraint(&x, &x_hat, s, alpha).unwrap();
        prop_assert!(c.first && c.second);
    }

    #[test]
    fn gradient_adjoints((u, p) in sized_images()) {
        let lhs_x = inner(&grad_x(&u), &p);
        let rhs_x = inner(&u, &grad_x_adjoint(&p));
        prop_assert!((lhs_x - rhs_x).abs() <= 1e-10);
        let lhs_y = inner(&grad_y(&u), &p);
        let rhs_y = inner(&u, &grad_y_adjoint(&p));
        prop_assert!((lhs_y - rhs_y).abs() <= 1e-10);
        let total: f64 = grad_x(&u).pixels().iter().sum();
        prop_assert!(total.abs() <= 1e-10);
    }

    #[test]
    fn subgradient_magnitudes((dx, dy) in sized_images()) {
        let (qx, qy) = tv_subgradient(&dx, &dy).unwrap();
        for k in 0..qx.len() {
            let m = qx.pixels()[k].hypot(qy.pixels()[k]);
            prop_assert!(m == 0.0 || (m - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn fft_preserves_energy((u, _) in sized_images()) {
        let f = Fft2::new(u.height(), u.width());
        let spec = f.forward_real(u.pixels());
        let e_img: f64 = u.pixels().iter().map(|v| v * v).sum();
        let e_spec: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((e_img - e_spec).abs() <= 1e-10 * e_img.max(1.0));
    }

    #[test]
    fn radial_masks_are_symmetric(n1 in 1usize..40, n2 in 1usize..40, lines in 1usize..50) {
        let m = radial_mask(n1, n2, lines).unwrap();
        prop_assert!(m.is_conjugate_symmetric());
        prop_assert!(m.is_kept(0, 0));
    }

    #[test]
    fn coherence_ignores_column_scale_and_order(
        seed in 0u64..1000,
        scales in prop::collection::vec(prop_oneof![-4.0f64..-0.25, 0.25f64..4.0], 9),
    ) {
        let a = SenseMatrix::gaussian(5, 9, seed).unwrap();
        let base = a.coherence().unwrap();
        let mut b = a.clone();
        for (j, f) in scales.iter().enumerate() {
            b.scale_column(j, *f);
        }
        prop_assert!((b.coherence().unwrap() - base).abs() <= 1e-12);
        let perm: Vec<usize> = (0..9).rev().collect();
        prop_assert!((a.permute_columns(&perm).coherence().unwrap() - base).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
    }

    #[test]
    fn smx_round_trip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..100) {
        let a = SenseMatrix::gaussian(rows, cols, seed).unwrap();
        let back = SenseMatrix::from_bytes(&a.to_bytes()).unwrap();
        prop_assert_eq!(back.as_slice(), a.as_slice());
    }

    #[test]
    fn img1_round_trip((u, _) in sized_images()) {
        prop_assert_eq!(Image2D::read_img1(&u.to_img1()[..]).unwrap(), u);
    }
}

#[test]
fn phantom_has_positive_tv() {
    let p = shepp_logan(64, PhantomKind::Classical).unwrap();
    assert!(isotropic_tv(&p) > 0.0);
    assert_eq!(isotropic_tv(&Image2D::constant(64, 64, 2.0)), 0.0);
}

#[test]
fn dense_radial_mask_covers_grid() {
    let m = radial_mask(64, 64, 256).unwrap();
    assert!(m.count() as f64 >= 0.95 * 4096.0, "kept {}", m.count());
    let one = radial_mask(64, 64, 1).unwrap();
    assert_eq!(one.count(), 64);
}
