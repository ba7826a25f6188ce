use proptest::prelude::*;
use rand::Rng;
use tcomplete::regularizer::l1_minus_l2_objective;
use tcomplete::rng::{gaussian_tensor, seeded};
use tcomplete::{
    fft_mode3, ifft_mode3, impose, project, prox_l1_minus_l2, random_tubal_mask, relative_error,
    spectral_shrink, synth_low_tubal_rank, t_pinv, t_product, t_svd, t_transpose, tubal_rank,
    Regularizer, Tensor3, TubalMask,
};

fn rel(x: &Tensor3, y: &Tensor3) -> f64 {
    x.distance(y).unwrap() / y.frobenius_norm().max(1e-300)
}

fn tensor(dims: (usize, usize, usize), seed: u64) -> Tensor3 {
    gaussian_tensor(&mut seeded(seed), dims)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn prox_beats_random_perturbations(
        v in prop::collection::vec(0.0..5.0f64, 1..6),
        mu in 0.01..5.0f64,
        seed in any::<u64>(),
    ) {
        let x = prox_l1_minus_l2(&v, mu);
        let fx = l1_minus_l2_objective(&x, &v, mu);
        let mut rng = seeded(seed);
        for _ in 0..1000 {
            let scale = [1e-3, 1e-1, 1.0][rng.random_range(0..3)];
            let y: Vec<f64> = x.iter().map(|xi| xi + scale * rng.random_range(-1.0..1.0)).collect();
            prop_assert!(fx <= l1_minus_l2_objective(&y, &v, mu) + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prox_is_nonnegative_and_sparse_below_threshold(
        v in prop::collection::vec(0.0..5.0f64, 1..8),
        mu in 0.01..5.0f64,
    ) {
        let x = prox_l1_minus_l2(&v, mu);
        prop_assert_eq!(x.len(), v.len());
        prop_assert!(x.iter().all(|&xi| xi >= 0.0));
        let vmax = v.iter().fold(0.0_f64, |m, &x| m.max(x));
        if vmax > mu {
            for (xi, vi) in x.iter().zip(&v) {
                if *vi <= mu {
                    prop_assert_eq!(*xi, 0.0);
                }
            }
        }
    }

    #[test]
    fn fft_round_trip(n1 in 1..6usize, n2 in 1..6usize, n3 in 1..9usize, seed in any::<u64>()) {
        let a = tensor((n1, n2, n3), seed);
        let back = ifft_mode3(&fft_mode3(&a)).unwrap();
        prop_assert!(rel(&back, &a) < 1e-12);
    }

    #[test]
    fn transpose_is_an_involution_and_reverses_products(
        n1 in 1..6usize, m in 1..6usize, n2 in 1..6usize, n3 in 1..7usize, seed in any::<u64>(),
    ) {
        let a = tensor((n1, m, n3), seed);
        let b = tensor((m, n2, n3), seed ^ 1);
        prop_assert_eq!(t_transpose(&t_transpose(&a)), a.clone());
        let lhs = t_transpose(&t_product(&a, &b).unwrap());
        let rhs = t_product(&t_transpose(&b), &t_transpose(&a)).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn product_is_associative(n in 1..5usize, n3 in 1..7usize, seed in any::<u64>()) {
        let (a, b, c) = (tensor((n, n + 1, n3), seed), tensor((n + 1, n, n3), seed ^ 1), tensor((n, 2, n3), seed ^ 2));
        let l = t_product(&t_product(&a, &b).unwrap(), &c).unwrap();
        let r = t_product(&a, &t_product(&b, &c).unwrap()).unwrap();
        prop_assert!(rel(&l, &r) < 1e-10);
    }

    #[test]
    fn pinv_satisfies_penrose(n1 in 1..7usize, n2 in 1..7usize, n3 in 1..7usize, seed in any::<u64>()) {
        let a = tensor((n1, n2, n3), seed);
        let p = t_pinv(&a).unwrap();
        let apa = t_product(&t_product(&a, &p).unwrap(), &a).unwrap();
        let pap = t_product(&t_product(&p, &a).unwrap(), &p).unwrap();
        prop_assert!(rel(&apa, &a) < 1e-8);
        prop_assert!(rel(&pap, &p) < 1e-8);
    }

    #[test]
    fn synthetic_tensors_have_the_requested_tubal_rank(
        n1 in 3..10usize, n2 in 3..10usize, n3 in 1..6usize, r in 1..3usize, seed in any::<u64>(),
    ) {
        let a = synth_low_tubal_rank(n1, n2, n3, r, seed).unwrap();
        prop_assert_eq!(tubal_rank(&a, 1e-9).unwrap().1, r);
    }

    #[test]
    fn projection_and_imposition(n1 in 1..8usize, n2 in 1..8usize, frac in 0.0..=1.0f64, seed in any::<u64>()) {
        let kept = 1 + (frac * (n1 * n2 - 1) as f64).round() as usize;
        let ratio = kept as f64 / (n1 * n2) as f64;
        let x = tensor((n1, n2, 3), seed);
        let y = tensor((n1, n2, 3), seed ^ 1);
        let mask = random_tubal_mask(n1, n2, ratio, seed).unwrap();
        let px = project(&x, &mask).unwrap();
        prop_assert_eq!(project(&px, &mask).unwrap(), px.clone());
        let z = impose(&x, &project(&y, &mask).unwrap(), &mask).unwrap();
        prop_assert_eq!(project(&z, &mask).unwrap(), project(&y, &mask).unwrap());
        let complement = TubalMask::new(n1, n2, &(0..n1).flat_map(|i| (0..n2).map(move |j| (i, j)))
            .filter(|&(i, j)| !mask.contains(i, j)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(project(&z, &complement).unwrap(), project(&x, &complement).unwrap());
    }

    #[test]
    fn shrinkage_never_increases_singular_values(
        n1 in 1..6usize, n2 in 1..6usize, n3 in 1..6usize, mu in 0.01..3.0f64, seed in any::<u64>(),
    ) {
        let x = tensor((n1, n2, n3), seed);
        for reg in [Regularizer::Tnn, Regularizer::Tl12] {
            let z = spectral_shrink(&x, mu, reg).unwrap();
            prop_assert!(z.frobenius_norm() <= x.frobenius_norm() * (1.0 + 1e-12));
        }
        prop_assert!(rel(&spectral_shrink(&x, 1e-14, Regularizer::Tnn).unwrap(), &x) < 1e-10);
    }

    #[test]
    fn relative_error_is_scale_invariant(seed in any::<u64>(), s in 0.1..10.0f64) {
        let (a, b) = (tensor((3, 4, 2), seed), tensor((3, 4, 2), seed ^ 1));
        let r1 = relative_error(&a, &b).unwrap();
        let r2 = relative_error(&a.scale(s), &b.scale(s)).unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-12 * r1.max(1.0));
    }
}

/// Reconstruction over 100 random shapes up to 16x16x8.
#[test]
fn t_svd_reconstructs_random_tensors() {
    let mut rng = seeded(77);
    for case in 0..100 {
        let dims = (
            rng.random_range(1..=16),
            rng.random_range(1..=16),
            rng.random_range(1..=8),
        );
        let a = tensor(dims, case);
        let s = t_svd(&a).unwrap();
        let back = t_product(&t_product(&s.u, &s.s).unwrap(), &t_transpose(&s.v)).unwrap();
        assert!(rel(&back, &a) < 1e-10, "{dims:?}");
    }
}
