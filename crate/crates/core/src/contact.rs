//! The antisymmetric coefficient matrix `f_ij = y^i G_j - y^j G_i`, the
//! vectors `f_i` it is built from, and contact classification.
//!
//! Every `f_i` lies in `span(G, C)` with `C = y`; the family spans either
//! `{0}` (vertical contact, `G` parallel to `y`) or the whole plane.

use serde::Serialize;

use crate::diff::PointJet;
use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix, TolerancePolicy};
use crate::real::{norm2, norm_inf, Real};

/// `f_ij` at one tangent vector together with the `y` and `G` it came from.
#[derive(Debug, Clone)]
pub struct FMatrix<T: Real> {
    entries: Matrix<T>,
    y: Vec<T>,
    g: Vec<T>,
}

impl<T: Real> FMatrix<T> {
    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn entries(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[(i, j)]
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn g(&self) -> &[T] {
        &self.g
    }

    pub fn max_abs(&self) -> T {
        self.entries.max_abs()
    }

    /// Magnitudes below this count as zero: `contact_tol * (1 + |y| |G|)`.
    pub fn vertical_threshold(&self, tol: &TolerancePolicy<T>) -> T {
        tol.contact_tol * (T::one() + norm2(&self.y) * norm2(&self.g))
    }

    pub fn is_vertical(&self, tol: &TolerancePolicy<T>) -> bool {
        self.max_abs() <= self.vertical_threshold(tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContactClass {
    pub vertical: bool,
    pub horizontal: bool,
}

/// Index pair `(i, j)`, `i < j`, with the largest `|f_ij|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PivotChoice<T> {
    pub i: usize,
    pub j: usize,
    pub magnitude: T,
}

/// Builds `f_ij = y^i G_j - y^j G_i`, antisymmetric by construction.
pub fn f_matrix<T: Real>(jet: &PointJet<T>) -> FMatrix<T> {
    let n = jet.dim();
    let (y, g) = (&jet.y, &jet.g_vec);
    let mut entries = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let f = y[i] * g[j] - y[j] * g[i];
            entries[(i, j)] = f;
            entries[(j, i)] = -f;
        }
    }
    FMatrix {
        entries,
        y: y.clone(),
        g: g.clone(),
    }
}

/// `f_i = [f_i1, ..., f_in]`.
pub fn f_vector<T: Real>(fm: &FMatrix<T>, i: usize) -> Vec<T> {
    fm.entries.row(i).to_vec()
}

/// `y^i G - G_i y`, the same vector assembled from the gradient directly.
pub fn f_vector_from_gradient<T: Real>(fm: &FMatrix<T>, i: usize) -> Vec<T> {
    fm.g
        .iter()
        .zip(&fm.y)
        .map(|(&gk, &yk)| fm.y[i] * gk - fm.g[i] * yk)
        .collect()
}

/// Vertical: `max |f_ij| <= contact_tol (1 + |y| |G|)`.
/// Horizontal: `|H|_inf <= contact_tol (1 + F)`.
pub fn classify<T: Real>(jet: &PointJet<T>, tol: &TolerancePolicy<T>) -> ContactClass {
    let fm = f_matrix(jet);
    ContactClass {
        vertical: fm.is_vertical(tol),
        horizontal: is_horizontal(jet, tol),
    }
}

pub fn is_horizontal<T: Real>(jet: &PointJet<T>, tol: &TolerancePolicy<T>) -> bool {
    norm_inf(&jet.h_vec) <= tol.contact_tol * (T::one() + jet.f_value.abs())
}

/// Largest `|f_ij|` over `i < j`, first pair in lexicographic order on
/// ties; `None` at vertically contact vectors.
pub fn pick_pivot<T: Real>(fm: &FMatrix<T>, tol: &TolerancePolicy<T>) -> Option<PivotChoice<T>> {
    let n = fm.dim();
    let mut best: Option<PivotChoice<T>> = None;
    for i in 0..n {
        for j in i + 1..n {
            let magnitude = fm.get(i, j).abs();
            if best.is_none_or(|b| magnitude > b.magnitude) {
                best = Some(PivotChoice { i, j, magnitude });
            }
        }
    }
    best.filter(|b| b.magnitude > fm.vertical_threshold(tol))
}

/// `max_k |f_k - (f_kj/f_ij) f_i - (f_ik/f_ij) f_j|_inf` over `k != i, j`.
pub fn reconstruct_check<T: Real>(fm: &FMatrix<T>, pivot: &PivotChoice<T>) -> T {
    let (i, j) = (pivot.i, pivot.j);
    let fij = fm.get(i, j);
    let fi = fm.entries.row(i);
    let fj = fm.entries.row(j);
    let mut worst = T::zero();
    for k in (0..fm.dim()).filter(|&k| k != i && k != j) {
        let (li, lj) = (fm.get(k, j) / fij, fm.get(i, k) / fij);
        for (c, &fk) in fm.entries.row(k).iter().enumerate() {
            worst = worst.max((fk - li * fi[c] - lj * fj[c]).abs());
        }
    }
    worst
}

/// Rank of the family `f_1, ..., f_n`; anything other than 0 or 2 is an anomaly.
pub fn span_rank<T: Real>(fm: &FMatrix<T>, tol: &TolerancePolicy<T>) -> Result<usize> {
    if fm.is_vertical(tol) {
        return Ok(0);
    }
    match rank(&fm.entries, tol) {
        2 => Ok(2),
        r => Err(Error::RankAnomaly { rank: r }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::jet_at;
    use crate::metrics::{build, MetricSpec};

    fn tol() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    fn randers2(b: f64) -> crate::metrics::Metric<f64> {
        build(&MetricSpec::randers(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![b, 0.0])).unwrap()
    }

    #[test]
    fn euclidean_is_all_contact() {
        let e = build::<f64>(&MetricSpec::euclidean(3)).unwrap();
        let jet = jet_at(&e, &[0.0; 3], &[0.3, -1.2, 0.7], false).unwrap();
        let fm = f_matrix(&jet);
        assert!(fm.max_abs() <= 1e-15);
        assert_eq!(
            classify(&jet, &tol()),
            ContactClass {
                vertical: true,
                horizontal: true
            }
        );
        assert!(pick_pivot(&fm, &tol()).is_none());
        assert_eq!(span_rank(&fm, &tol()).unwrap(), 0);
    }

    #[test]
    fn randers_hand_values() {
        let m = randers2(0.5);
        let jet = jet_at(&m, &[0.0, 0.0], &[0.0, 1.0], false).unwrap();
        let fm = f_matrix(&jet);
        assert!((fm.get(0, 1) + 0.5).abs() < 1e-15);
        assert!((fm.get(1, 0) - 0.5).abs() < 1e-15);
        assert_eq!(fm.get(0, 0), 0.0);
        let f1 = f_vector(&fm, 0);
        assert!(f1[0].abs() < 1e-15 && (f1[1] + 0.5).abs() < 1e-15);
        let p = pick_pivot(&fm, &tol()).unwrap();
        assert_eq!((p.i, p.j), (0, 1));
        assert!((p.magnitude - 0.5).abs() < 1e-15);
        assert_eq!(span_rank(&fm, &tol()).unwrap(), 2);
        assert_eq!(reconstruct_check(&fm, &p), 0.0);

        // Along the axis of b the direction is vertically contact.
        let jet = jet_at(&m, &[0.0, 0.0], &[1.0, 0.0], false).unwrap();
        assert_eq!(f_matrix(&jet).get(0, 1), 0.0);
        assert!(classify(&jet, &tol()).vertical);
    }

    #[test]
    fn randers_f12_is_minus_b_y2() {
        // f_12 = -b y^2 for G = y/|y| + (b, 0).
        let m = randers2(0.3);
        for y in [[0.4, 0.9], [-2.0, 1.5], [1.0, -0.25]] {
            let fm = f_matrix(&jet_at(&m, &[0.0, 0.0], &y, false).unwrap());
            assert!((fm.get(0, 1) + 0.3 * y[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn pivot_ties_break_lexicographically() {
        let jet = PointJet::<f64> {
            x: vec![0.0; 3],
            y: vec![1.0, 1.0, 1.0],
            f_value: 1.0,
            // f_01 = f_02 = 1, f_12 = 0
            g_vec: vec![0.0, 1.0, 1.0],
            h_vec: vec![0.0; 3],
            hess: None,
        };
        let fm = f_matrix(&jet);
        assert_eq!(fm.get(0, 1).abs(), fm.get(0, 2).abs());
        let p = pick_pivot(&fm, &tol()).unwrap();
        assert_eq!((p.i, p.j), (0, 1));
    }

    #[test]
    fn rank_one_family_is_an_anomaly() {
        // Entries forced by hand; no gradient pair produces them.
        let rows = |r: &[[f64; 3]; 3]| Matrix::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap();
        let mut fm = FMatrix {
            entries: rows(&[[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
            y: vec![1.0, 0.0, 0.0],
            g: vec![0.0, 1.0, 0.0],
        };
        assert_eq!(span_rank(&fm, &tol()).unwrap(), 2);
        fm.entries = rows(&[[0.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(matches!(span_rank(&fm, &tol()), Err(Error::RankAnomaly { rank: 1 })));
    }
}
