//! Pointwise compatibility equations for a semi-symmetric torsion
//! `T(X, Y) = rho(Y) X - rho(X) Y` in normal coordinates at `p`.
//!
//! At a tangent vector `v` the system reads `sum_k f_ik(v) rho_k = -dF/dx^i(v)`.
//! Besides assembling and checking it, this module recovers `rho` in closed
//! form: with a pivot `(i, j)`, `<v, rho> = f^h_ji / f_ji` holds at every
//! vector near `v`, and evaluating it at `w_l = v - eps e_l` gives the
//! linear system `(V - eps I) rho = r`, inverted explicitly.

mod solve;

pub use solve::{
    closed_form_candidates, select_epsilon, solve_at_point, Candidate, EpsilonChoice, SolveOutcome,
    SolveStatus, SolverConfig,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::contact::{f_matrix, pick_pivot, FMatrix, PivotChoice};
use crate::diff::{jet_at, PointJet};
use crate::error::{Error, Result};
use crate::linalg::{rank, shift_inverse, solve_least_squares, Matrix, TolerancePolicy};
use crate::metrics::FinslerMetric;
use crate::real::{norm2, norm_inf, Real};
use crate::sampling::sphere_samples;

/// The linear system in `rho` at one tangent vector: row `i` is `f_i(v)`,
/// right-hand side `-dF/dx^i(v)`.
#[derive(Debug, Clone, Serialize)]
pub struct VCeqSystem<T: Real> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub v: Vec<T>,
    pub x: Vec<T>,
    /// Vertical gradient at `v`, kept for the eliminated 2x2 system.
    pub g: Vec<T>,
}

impl<T: Real> VCeqSystem<T> {
    pub fn from_jet(jet: &PointJet<T>) -> Self {
        Self {
            a: f_matrix(jet).entries().clone(),
            b: jet.h_vec.iter().map(|&h| -h).collect(),
            v: jet.y.clone(),
            x: jet.x.clone(),
            g: jet.g_vec.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }
}

pub fn assemble<T: Real>(metric: &dyn FinslerMetric<T>, x: &[T], v: &[T]) -> Result<VCeqSystem<T>> {
    Ok(VCeqSystem::from_jet(&jet_at(metric, x, v, false)?))
}

/// `|a rho - b|_inf / (1 + |b|_inf + |a|_max |rho|_inf)`.
pub fn ceq_residual<T: Real>(system: &VCeqSystem<T>, rho: &[T]) -> T {
    let ar = system.a.mul_vec(rho).expect("rho has the system dimension");
    let r = ar
        .iter()
        .zip(&system.b)
        .fold(T::zero(), |acc, (&x, &b)| acc.max((x - b).abs()));
    r / (T::one() + norm_inf(&system.b) + system.a.max_abs() * norm_inf(rho))
}

/// Worst cyclic-sum violation `f_ij H_k + f_jk H_i + f_ki H_j` over index
/// triples at one (or, aggregated, several) tangent vectors.
#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicReport<T: Real> {
    /// Pivot at the vector where the worst residual occurred.
    pub pivot: PivotChoice<T>,
    pub worst_triple: Option<[usize; 3]>,
    /// Normalized by `max|f_ab| * max|H_c|`.
    pub worst_residual: T,
    pub n_checked: usize,
    /// Tangent vector of the worst residual.
    pub v: Vec<T>,
    /// Triples whose three `f` values all vanish; recorded, not judged.
    pub unjudged: usize,
}

/// Intrinsic solvability conditions at one jet.
pub fn intrinsic_at<T: Real>(jet: &PointJet<T>, tol: &TolerancePolicy<T>) -> Result<IntrinsicReport<T>> {
    let fm = f_matrix(jet);
    let pivot = pick_pivot(&fm, tol).ok_or(Error::VerticalContact)?;
    let h = &jet.h_vec;
    let n = jet.dim();
    let fmax = fm.max_abs();
    let threshold = fm.vertical_threshold(tol);
    // H below rounding level relative to F counts as zero.
    let denom = fmax * (norm_inf(h) + T::epsilon() * jet.f_value.abs()) + T::min_positive_value();

    let mut report = IntrinsicReport {
        pivot,
        worst_triple: None,
        worst_residual: T::zero(),
        n_checked: 0,
        v: jet.y.clone(),
        unjudged: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (fij, fjk, fki) = (fm.get(i, j), fm.get(j, k), fm.get(k, i));
                if fij.abs().max(fjk.abs()).max(fki.abs()) <= threshold {
                    report.unjudged += 1;
                    continue;
                }
                let cyclic = fij * h[k] + fjk * h[i] + fki * h[j];
                let r = cyclic.abs() / denom;
                report.n_checked += 1;
                if report.worst_triple.is_none() || r > report.worst_residual {
                    report.worst_residual = r;
                    report.worst_triple = Some([i, j, k]);
                }
            }
        }
    }
    Ok(report)
}

pub fn intrinsic_check<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    tol: &TolerancePolicy<T>,
) -> Result<IntrinsicReport<T>> {
    intrinsic_at(&jet_at(metric, x, v, false)?, tol)
}

/// Aggregates [`intrinsic_at`] over the non-vertically-contact jets;
/// `None` when every jet is vertically contact.
pub fn intrinsic_sweep<T: Real>(jets: &[PointJet<T>], tol: &TolerancePolicy<T>) -> Option<IntrinsicReport<T>> {
    let mut total: Option<IntrinsicReport<T>> = None;
    for jet in jets {
        let Ok(r) = intrinsic_at(jet, tol) else { continue };
        total = Some(match total {
            None => r,
            Some(mut acc) => {
                acc.n_checked += r.n_checked;
                acc.unjudged += r.unjudged;
                if r.worst_triple.is_some()
                    && (acc.worst_triple.is_none() || r.worst_residual > acc.worst_residual)
                {
                    acc.worst_residual = r.worst_residual;
                    acc.worst_triple = r.worst_triple;
                    acc.pivot = r.pivot;
                    acc.v = r.v;
                }
                acc
            }
        });
    }
    total
}

fn pivot_value<T: Real>(y: &[T], g: &[T], i: usize, j: usize) -> T {
    y[i] * g[j] - y[j] * g[i]
}

fn pivot_threshold<T: Real>(y: &[T], g: &[T], tol: &TolerancePolicy<T>) -> T {
    tol.contact_tol * (T::one() + norm2(y) * norm2(g))
}

/// Solves the two pivot rows for `(<G, rho>, <C, rho>)`, `C = v`.
pub fn eliminated_solve<T: Real>(
    system: &VCeqSystem<T>,
    pivot: &PivotChoice<T>,
    tol: &TolerancePolicy<T>,
) -> Result<(T, T)> {
    let (i, j) = (pivot.i, pivot.j);
    let (y, g, b) = (&system.v, &system.g, &system.b);
    let fij = pivot_value(y, g, i, j);
    if fij.abs() <= pivot_threshold(y, g, tol) {
        return Err(Error::PivotLost {
            i,
            j,
            shifted: None,
            magnitude: fij.abs().as_f64(),
        });
    }
    // [[y_i, -G_i], [y_j, -G_j]] [gr, cr]^T = [b_i, b_j]^T, det = f_ji
    let det = -fij;
    let g_dot_rho = (g[i] * b[j] - g[j] * b[i]) / det;
    let c_dot_rho = (y[i] * b[j] - y[j] * b[i]) / det;
    Ok((g_dot_rho, c_dot_rho))
}

/// `f^h_ji / f_ji` at one jet: the value of `<y, rho>` forced by the pivot rows.
pub fn contact_ratio<T: Real>(jet: &PointJet<T>, i: usize, j: usize) -> T {
    let (y, h, g) = (&jet.y, &jet.h_vec, &jet.g_vec);
    let fh_ji = y[j] * h[i] - y[i] * h[j];
    let f_ji = y[j] * g[i] - y[i] * g[j];
    fh_ji / f_ji
}

pub(crate) struct ShiftedRatios<T> {
    pub ratios: Vec<T>,
    /// Smallest `|f_ij(w_l)|` over the shifted vectors.
    pub min_pivot: T,
}

pub(crate) fn shifted_ratios_inner<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    pivot: &PivotChoice<T>,
    eps: T,
    tol: &TolerancePolicy<T>,
) -> Result<ShiftedRatios<T>> {
    let (i, j) = (pivot.i, pivot.j);
    let mut ratios = Vec::with_capacity(v.len());
    let mut min_pivot = T::infinity();
    for l in 0..v.len() {
        let mut w = v.to_vec();
        w[l] -= eps;
        let jet = jet_at(metric, x, &w, false)?;
        let fij = pivot_value(&jet.y, &jet.g_vec, i, j).abs();
        if fij <= pivot_threshold(&jet.y, &jet.g_vec, tol) {
            return Err(Error::PivotLost {
                i,
                j,
                shifted: Some(l),
                magnitude: fij.as_f64(),
            });
        }
        min_pivot = min_pivot.min(fij);
        ratios.push(contact_ratio(&jet, i, j));
    }
    Ok(ShiftedRatios { ratios, min_pivot })
}

/// `r_l = (f^h_ji / f_ji)(v - eps e_l)` for `l = 1..n`.
pub fn shift_ratios<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    pivot: &PivotChoice<T>,
    eps: T,
    tol: &TolerancePolicy<T>,
) -> Result<Vec<T>> {
    Ok(shifted_ratios_inner(metric, x, v, pivot, eps, tol)?.ratios)
}

/// Closed-form `rho = (V - eps I)^{-1} r`.
pub fn closed_form_rho<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    pivot: &PivotChoice<T>,
    eps: T,
    tol: &TolerancePolicy<T>,
) -> Result<Vec<T>> {
    let inverse = shift_inverse(v, eps, tol)?;
    let ratios = shift_ratios(metric, x, v, pivot, eps, tol)?;
    inverse.mul_vec(&ratios)
}

/// The same solution written out componentwise:
/// `rho_k = ( sum_l v^l r_l / (s - eps) - r_k ) / eps`, `s = sum v`.
pub fn rho_from_ratios_summation<T: Real>(v: &[T], eps: T, ratios: &[T]) -> Vec<T> {
    let s = v.iter().fold(T::zero(), |acc, &c| acc + c);
    let weighted = v.iter().zip(ratios).fold(T::zero(), |acc, (&vl, &rl)| acc + vl * rl);
    let common = weighted / (s - eps);
    ratios.iter().map(|&rk| (common - rk) / eps).collect()
}

pub(crate) fn evaluate_samples<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    samples: &[Vec<T>],
) -> Result<Vec<PointJet<T>>> {
    samples
        .par_iter()
        .map(|v| jet_at(metric, x, v, false))
        .collect()
}

/// Rows of all non-vertically-contact systems stacked; vertical rows are
/// exactly zero in exact arithmetic and are zeroed here.
fn stacked_system<T: Real>(jets: &[PointJet<T>], tol: &TolerancePolicy<T>) -> (Matrix<T>, Vec<T>) {
    let n = jets.first().map_or(0, PointJet::dim);
    let mut a = Matrix::zeros(jets.len() * n, n);
    let mut b = Vec::with_capacity(jets.len() * n);
    for (s, jet) in jets.iter().enumerate() {
        let fm: FMatrix<T> = f_matrix(jet);
        let keep = !fm.is_vertical(tol);
        for i in 0..n {
            if keep {
                for k in 0..n {
                    a[(s * n + i, k)] = fm.get(i, k);
                }
            }
            b.push(-jet.h_vec[i]);
        }
    }
    (a, b)
}

pub(crate) fn nullspace_dim_of<T: Real>(jets: &[PointJet<T>], tol: &TolerancePolicy<T>) -> usize {
    let n = jets.first().map_or(0, PointJet::dim);
    let (a, _) = stacked_system(jets, tol);
    n - rank(&a, tol)
}

/// Independent oracle: minimum-norm least squares over the stacked systems
/// of `config.n_sphere_samples` sphere directions. Returns `rho` and the
/// normalized stacked residual.
pub fn ls_oracle<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    config: &SolverConfig<T>,
) -> Result<(Vec<T>, T)> {
    let n = metric.dim();
    config.validate(n)?;
    let samples = sphere_samples::<T>(n, config.n_sphere_samples, config.seed);
    let jets = evaluate_samples(metric, x, &samples)?;
    let (a, b) = stacked_system(&jets, &config.tol);
    let (rho, _) = solve_least_squares(&a, &b, &config.tol)?;
    let r = a
        .mul_vec(&rho)?
        .iter()
        .zip(&b)
        .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()));
    let residual = r / (T::one() + norm_inf(&b) + a.max_abs() * norm_inf(&rho));
    Ok((rho, residual))
}

/// Dimension of the common solution space of the homogeneous systems over
/// the sampled directions: `n - rank` of the stacked `f` rows.
pub fn homogeneous_nullspace_dim<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    config: &SolverConfig<T>,
) -> Result<usize> {
    let n = metric.dim();
    config.validate(n)?;
    let samples = sphere_samples::<T>(n, config.n_sphere_samples, config.seed);
    let jets = evaluate_samples(metric, x, &samples)?;
    Ok(nullspace_dim_of(&jets, &config.tol))
}
