use finsler_ceq::contact::{f_vector, f_vector_from_gradient, reconstruct_check};
use finsler_ceq::metrics::{build, random_germ, random_randers, MetricSpec};
use finsler_ceq::{f_matrix, jet_at, pick_pivot, span_rank, TolerancePolicy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn f_family_is_a_plane_or_nothing(
        (n, y) in (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0..1.0f64, n))),
        seed in 0u64..10_000,
        kind in 0usize..3
    ) {
        prop_assume!(y.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (spec, x) = match kind {
            0 => (MetricSpec::euclidean(n), vec![0.0; n]),
            1 => (random_randers(n, (0.1, 0.8), &mut rng), vec![0.0; n]),
            _ => {
                let g = random_germ(n, seed);
                (g.spec, g.point)
            }
        };
        let m = build::<f64>(&spec).unwrap();
        let tol = TolerancePolicy::default();
        let jet = jet_at(&m, &x, &y, false).unwrap();
        let fm = f_matrix(&jet);

        let r = span_rank(&fm, &tol).unwrap();
        prop_assert!(r == 0 || r == 2);

        for i in 0..n {
            let direct = f_vector(&fm, i);
            let assembled = f_vector_from_gradient(&fm, i);
            for (a, b) in direct.iter().zip(&assembled) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        if let Some(p) = pick_pivot(&fm, &tol) {
            let scale = 1.0 + fm.max_abs();
            prop_assert!(reconstruct_check(&fm, &p) <= 1e-10 * scale);
        } else {
            prop_assert_eq!(r, 0);
        }
    }
}
