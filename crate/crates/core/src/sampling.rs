//! Deterministic direction sets on the unit sphere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::real::Real;

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    r
}

fn normalize<T: Real>(v: Vec<f64>) -> Vec<T> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| T::lit(x / norm)).collect()
}

/// `count` unit vectors in dimension `n`: first the `2n` signed axis
/// directions, then a seeded, randomly shifted Halton sequence mapped
/// through the inverse normal CDF.
pub fn sphere_samples<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    assert!(n >= 1 && n <= PRIMES.len(), "dimension {n} unsupported");
    let mut out = Vec::with_capacity(count);
    for k in 0..(2 * n).min(count) {
        let mut e = vec![T::zero(); n];
        e[k / 2] = if k % 2 == 0 { T::one() } else { -T::one() };
        out.push(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new(0.0f64, 1.0).expect("valid range");
    let shift: Vec<f64> = (0..n).map(|_| unit.sample(&mut rng)).collect();
    let normal = Normal::standard();
    let mut index = 1u64;
    while out.len() < count {
        let v: Vec<f64> = (0..n)
            .map(|d| {
                let u = (radical_inverse(index, PRIMES[d]) + shift[d]).fract();
                normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
            })
            .collect();
        index += 1;
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
            out.push(normalize(v));
        }
    }
    out
}

/// `count` pseudo-random unit vectors (Gaussian directions, ChaCha8 stream).
pub fn random_unit_vectors<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
            out.push(normalize(v));
        }
    }
    out
}
