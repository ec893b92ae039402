use finsler_ceq::averaged::{averaged_metric_at, normal_deviation, QuadratureScheme, QuadratureSpec};
use finsler_ceq::linalg::{cholesky, Matrix};
use finsler_ceq::metrics::{build, MetricSpec};
use proptest::prelude::*;

fn rot(t: f64) -> [[f64; 2]; 2] {
    [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
}

#[test]
fn constant_quadratic_averages_to_itself() {
    let a = vec![vec![2.0, 0.4, 0.0], vec![0.4, 1.0, 0.1], vec![0.0, 0.1, 0.7]];
    let m = build::<f64>(&MetricSpec::Riemannian {
        a: a.clone(),
        perturbation: Vec::new(),
    })
    .unwrap();
    let avg = averaged_metric_at(&m, &[0.0; 3], &QuadratureSpec::default_for(3)).unwrap();
    let want = Matrix::from_rows(&a).unwrap();
    assert!(avg.gamma.sub(&want).max_abs() < 1e-10);
    assert!((normal_deviation(&avg) - want.sub(&Matrix::identity(3)).max_abs()).abs() < 1e-10);
}

#[test]
fn monte_carlo_handles_higher_dimensions() {
    let m = build::<f64>(&MetricSpec::randers(
        (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect(),
        vec![0.2, 0.0, -0.1, 0.3],
    ))
    .unwrap();
    let q = QuadratureSpec::new(QuadratureScheme::MonteCarlo, 2000, 3);
    let avg = averaged_metric_at(&m, &[0.0; 4], &q).unwrap();
    assert_eq!(avg.gamma.asymmetry(), 0.0);
    assert!(cholesky(&avg.gamma).is_some());
    assert!(avg.error_estimate.is_finite());
    let again = averaged_metric_at(&m, &[0.0; 4], &q).unwrap();
    assert_eq!(avg.gamma, again.gamma);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planar_average_rotates_with_the_metric(t in 0.0..std::f64::consts::TAU, bx in -0.6..0.6f64, by in -0.6..0.6f64) {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let q = QuadratureSpec::new(QuadratureScheme::Angular, 256, 0);
        let base = build::<f64>(&MetricSpec::randers(eye.clone(), vec![bx, by])).unwrap();
        let r = rot(t);
        let rb = vec![r[0][0] * bx + r[0][1] * by, r[1][0] * bx + r[1][1] * by];
        let turned = build::<f64>(&MetricSpec::randers(eye, rb)).unwrap();
        let g0 = averaged_metric_at(&base, &[0.0, 0.0], &q).unwrap().gamma;
        let g1 = averaged_metric_at(&turned, &[0.0, 0.0], &q).unwrap().gamma;
        // g1 = R g0 R^T
        for i in 0..2 {
            for j in 0..2 {
                let mut want = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        want += r[i][k] * g0[(k, l)] * r[j][l];
                    }
                }
                prop_assert!((g1[(i, j)] - want).abs() <= 1e-6);
            }
        }
        prop_assert!(cholesky(&g1).is_some());
    }
}

#[test]
fn refinement_stays_within_the_estimate() {
    let m = build::<f64>(&MetricSpec::randers(vec![vec![1.0, 0.2], vec![0.2, 1.5]], vec![0.3, -0.2])).unwrap();
    let coarse = averaged_metric_at(&m, &[0.0, 0.0], &QuadratureSpec::new(QuadratureScheme::Angular, 32, 0)).unwrap();
    let fine = averaged_metric_at(&m, &[0.0, 0.0], &QuadratureSpec::new(QuadratureScheme::Angular, 64, 0)).unwrap();
    assert!(fine.gamma.sub(&coarse.gamma).max_abs() <= coarse.error_estimate + 1e-15);
}
