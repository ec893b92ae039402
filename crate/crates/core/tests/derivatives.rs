use finsler_ceq::diff::{default_fd_step, fd_crosscheck};
use finsler_ceq::metrics::{build, random_germ, random_randers, MetricSpec, PolyTerm};
use finsler_ceq::{f_matrix, jet_at, FinslerMetric, Metric};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped(n: usize, seed: u64) -> Vec<(&'static str, Metric<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eye: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut powers = vec![0; n];
    powers[0] = 1;
    powers[n - 1] += 1;
    let curved = MetricSpec::Riemannian {
        a: eye,
        perturbation: vec![PolyTerm {
            row: 0,
            col: n - 1,
            coeff: 0.2,
            powers,
        }],
    };
    let germ = random_germ(n, seed);
    let x: Vec<f64> = (0..n).map(|k| 0.1 * (k as f64 + 1.0)).collect();
    let mut out = vec![
        ("euclidean", build(&MetricSpec::euclidean(n)).unwrap(), x.clone()),
        ("randers", build(&random_randers(n, (0.1, 0.8), &mut rng)).unwrap(), x.clone()),
        ("curved riemannian", build(&curved).unwrap(), x),
        ("germ", build(&germ.spec).unwrap(), germ.point.clone()),
    ];
    if n == 2 {
        out.push((
            "lobed",
            build(&MetricSpec::Lobed { amplitude: 0.05, lobes: 3 }).unwrap(),
            vec![0.0, 0.0],
        ));
    }
    out
}

fn direction() -> impl Strategy<Value = (usize, Vec<f64>, u64)> {
    (2usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0..1.0f64, n), 0u64..1000))
        .prop_filter("non-zero direction", |(_, y, _)| y.iter().map(|v| v * v).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_match_central_differences((n, y, seed) in direction()) {
        for (name, m, x) in shipped(n, seed) {
            let dev = fd_crosscheck(&m, &x, &y, default_fd_step(&y)).unwrap();
            let bound = if name == "euclidean" { 1e-8 } else { 1e-6 };
            prop_assert!(dev <= bound, "{} deviates by {}", name, dev);
        }
    }

    #[test]
    fn euler_and_homogeneity((n, y, seed) in direction(), lambda in 0.2..5.0f64) {
        for (name, m, x) in shipped(n, seed) {
            let a = jet_at(&m, &x, &y, false).unwrap();
            let ly: Vec<f64> = y.iter().map(|v| lambda * v).collect();
            let b = jet_at(&m, &x, &ly, false).unwrap();
            let scale = 1.0 + a.f_value.abs();
            prop_assert!(a.euler_defect().abs() <= 1e-10 * scale, "{}", name);
            prop_assert!((b.f_value - lambda * a.f_value).abs() <= 1e-10 * lambda * scale, "{}", name);
            for k in 0..n {
                prop_assert!((b.g_vec[k] - a.g_vec[k]).abs() <= 1e-10 * scale, "{} G", name);
                prop_assert!((b.h_vec[k] - lambda * a.h_vec[k]).abs() <= 1e-10 * lambda * scale, "{} H", name);
            }
            let (fa, fb) = (f_matrix(&a), f_matrix(&b));
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((fb.get(i, j) - lambda * fa.get(i, j)).abs() <= 1e-10 * lambda * scale);
                }
            }
        }
    }
}

#[test]
fn f32_jets_track_f64() {
    let spec = random_germ(3, 11).spec;
    let m64 = build::<f64>(&spec).unwrap();
    let m32 = build::<f32>(&spec).unwrap();
    let y = [0.3, -0.6, 0.7];
    let x64 = [0.1, 0.0, -0.2];
    let a = jet_at(&m64, &x64, &y, false).unwrap();
    let b = jet_at(&m32, &[0.1f32, 0.0, -0.2], &[0.3f32, -0.6, 0.7], false).unwrap();
    assert!((f64::from(b.f_value) - a.f_value).abs() < 1e-5);
    for k in 0..3 {
        assert!((f64::from(b.g_vec[k]) - a.g_vec[k]).abs() < 1e-5);
        assert!((f64::from(b.h_vec[k]) - a.h_vec[k]).abs() < 1e-5);
    }
    assert_eq!(FinslerMetric::dim(&m32), 3);
}
