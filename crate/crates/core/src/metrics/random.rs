//! Seeded random metric specifications for sweeps and self-tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::{dual_norm, MetricSpec};
use crate::linalg::{cholesky, Matrix};

/// Random SPD matrix `I + S`, `S` symmetric with entries in `[-spread, spread]`,
/// redrawn until positive definite.
pub fn random_spd<R: Rng>(n: usize, spread: f64, rng: &mut R) -> Vec<Vec<f64>> {
    loop {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 1.0 + rng.random_range(-spread..=spread);
            for j in 0..i {
                let s = rng.random_range(-spread..=spread);
                a[i][j] = s;
                a[j][i] = s;
            }
        }
        let m = Matrix::from_rows(&a).expect("square");
        if cholesky(&m).is_some_and(|l| (0..n).all(|i| l[(i, i)] > 0.2)) {
            return a;
        }
    }
}

/// Randers metric description with a random SPD `a` and `||b||_a` drawn from `b_norm`.
pub fn random_randers<R: Rng>(n: usize, b_norm: (f64, f64), rng: &mut R) -> MetricSpec {
    let a = random_spd(n, 0.3, rng);
    let am = Matrix::from_rows(&a).expect("square");
    let target = rng.random_range(b_norm.0..=b_norm.1);
    let raw: Vec<f64> = loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            break v;
        }
    };
    let scale = target / dual_norm(&am, &raw).expect("positive definite");
    MetricSpec::randers(a, raw.into_iter().map(|x| x * scale).collect())
}

/// A compatible germ: random Randers base with `||b||_a` in `[0.1, 0.8]`,
/// `rho*` with entries in `[-1, 1]` and a base point in `[-1, 1]^n`.
#[derive(Debug, Clone)]
pub struct RandomGerm {
    pub spec: MetricSpec,
    pub rho_star: Vec<f64>,
    pub point: Vec<f64>,
}

pub fn random_germ(n: usize, seed: u64) -> RandomGerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_randers(n, (0.1, 0.8), &mut rng);
    let rho_star: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let point: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    RandomGerm {
        spec: MetricSpec::germ(base, rho_star.clone(), point.clone()),
        rho_star,
        point,
    }
}
