use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ceq_residual, evaluate_samples, intrinsic_sweep, nullspace_dim_of, shifted_ratios_inner,
    IntrinsicReport, VCeqSystem,
};
use crate::contact::{f_matrix, is_horizontal, pick_pivot, PivotChoice};
use crate::diff::{jet_at, PointJet};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{is_shift_regular, shift_inverse, TolerancePolicy};
use crate::metrics::{orthonormalizing_frame, FinslerMetric, Reframed};
use crate::real::{norm_inf, Real};
use crate::sampling::sphere_samples;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Real"))]
pub struct SolverConfig<T> {
    pub n_sphere_samples: usize,
    pub seed: u64,
    pub tol: TolerancePolicy<T>,
    /// Initial `eps` as a fraction of `|v|_inf`.
    pub eps_fraction: T,
    /// Number of halvings of `eps` after the first attempt.
    pub max_eps_retries: usize,
    /// Every `|f_ij(w_l)|` must keep at least this fraction of `|f_ij(v)|`.
    pub pivot_retention: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            n_sphere_samples: 64,
            seed: 1,
            tol: TolerancePolicy::default(),
            eps_fraction: T::lit(0.25),
            max_eps_retries: 6,
            pivot_retention: T::lit(0.25),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self, n: usize) -> Result<()> {
        self.tol.validate()?;
        if self.n_sphere_samples < 2 * n {
            return Err(Error::InvalidArgument(format!(
                "n_sphere_samples = {} is below 2n = {}",
                self.n_sphere_samples,
                2 * n
            )));
        }
        if !(self.eps_fraction > T::zero() && self.eps_fraction < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "eps_fraction must lie in (0, 1), got {}",
                self.eps_fraction
            )));
        }
        if !(self.pivot_retention > T::zero() && self.pivot_retention < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "pivot_retention must lie in (0, 1), got {}",
                self.pivot_retention
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Unique,
    RiemannianIndeterminate,
    Insolvable,
    DegenerateSampling,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome<T: Real> {
    pub status: SolveStatus,
    /// Present exactly when `status` is `UNIQUE`.
    pub rho: Option<Vec<T>>,
    /// The closed-form value, also kept when validation rejected it.
    pub candidate_rho: Option<Vec<T>>,
    pub max_ceq_residual: T,
    /// `None` when every sample is vertically contact.
    pub intrinsic: Option<IntrinsicReport<T>>,
    pub nullspace_dim: usize,
    pub samples_used: usize,
    pub epsilon_used: Option<T>,
    pub eps_attempts: usize,
    pub base_v: Option<Vec<T>>,
    pub pivot: Option<PivotChoice<T>>,
    /// Every sample is vertically contact in the frame orthonormal for `g`.
    pub quadratic_indicatrix: bool,
    pub vertical_samples: usize,
    pub horizontal_samples: usize,
    pub note: Option<String>,
}

/// An admissible shift and the ratios `(f^h_ji / f_ji)(w_l)` it produced.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonChoice<T> {
    pub eps: T,
    pub ratios: Vec<T>,
    pub attempts: usize,
}

/// Starts at `eps_fraction * |v|_inf` and halves until `V - eps I` is
/// regular and well conditioned and every `w_l = v - eps e_l` keeps the pivot.
pub fn select_epsilon<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    pivot: &PivotChoice<T>,
    config: &SolverConfig<T>,
) -> Result<EpsilonChoice<T>> {
    let tol = &config.tol;
    let sum = v.iter().fold(T::zero(), |acc, &c| acc + c);
    let floor = config.pivot_retention * pivot.magnitude;
    let mut eps = config.eps_fraction * norm_inf(v);
    let mut last = String::from("no attempt made");
    for attempt in 0..=config.max_eps_retries {
        if attempt > 0 {
            eps /= T::lit(2.0);
        }
        if !is_shift_regular(v, eps, tol) {
            last = format!("eps = {eps} is singular for component sum {sum}");
            continue;
        }
        if (sum - eps).abs() < T::lit(0.1) * eps {
            last = format!("eps = {eps} is too close to the component sum {sum}");
            continue;
        }
        match shifted_ratios_inner(metric, x, v, pivot, eps, tol) {
            Ok(r) if r.min_pivot >= floor => {
                return Ok(EpsilonChoice {
                    eps,
                    ratios: r.ratios,
                    attempts: attempt + 1,
                })
            }
            Ok(r) => last = format!("pivot magnitude fell to {} at eps = {eps}", r.min_pivot),
            Err(e @ (Error::PivotLost { .. } | Error::EvalDomain(_))) => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::EpsilonExhausted {
        attempts: config.max_eps_retries + 1,
        last,
    })
}

/// One closed-form evaluation: base vector, pivot, shift and result.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate<T> {
    pub v: Vec<T>,
    pub pivot: PivotChoice<T>,
    pub eps: T,
    pub rho: Vec<T>,
}

fn candidate_at<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    v: &[T],
    pivot: PivotChoice<T>,
    config: &SolverConfig<T>,
) -> Result<(Candidate<T>, usize)> {
    let choice = select_epsilon(metric, x, v, &pivot, config)?;
    let rho = shift_inverse(v, choice.eps, &config.tol)?.mul_vec(&choice.ratios)?;
    Ok((
        Candidate {
            v: v.to_vec(),
            pivot,
            eps: choice.eps,
            rho,
        },
        choice.attempts,
    ))
}

/// Up to `count` closed-form solutions from distinct base vectors, taken in
/// order of decreasing pivot magnitude over the sphere samples.
pub fn closed_form_candidates<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    config: &SolverConfig<T>,
    count: usize,
) -> Result<Vec<Candidate<T>>> {
    let n = metric.dim();
    config.validate(n)?;
    let samples = sphere_samples::<T>(n, config.n_sphere_samples, config.seed);
    let jets = evaluate_samples(metric, x, &samples)?;
    let mut ranked: Vec<(usize, PivotChoice<T>)> = jets
        .iter()
        .enumerate()
        .filter_map(|(s, jet)| pick_pivot(&f_matrix(jet), &config.tol).map(|p| (s, p)))
        .collect();
    ranked.sort_by(|a, b| b.1.magnitude.partial_cmp(&a.1.magnitude).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = Vec::with_capacity(count);
    for (s, pivot) in ranked {
        if out.len() == count {
            break;
        }
        if let Ok((c, _)) = candidate_at(metric, x, &samples[s], pivot, config) {
            out.push(c);
        }
    }
    Ok(out)
}

fn base_outcome<T: Real>(status: SolveStatus, samples_used: usize) -> SolveOutcome<T> {
    SolveOutcome {
        status,
        rho: None,
        candidate_rho: None,
        max_ceq_residual: T::zero(),
        intrinsic: None,
        nullspace_dim: 0,
        samples_used,
        epsilon_used: None,
        eps_attempts: 0,
        base_v: None,
        pivot: None,
        quadratic_indicatrix: false,
        vertical_samples: 0,
        horizontal_samples: 0,
        note: None,
    }
}

fn max_residual<T: Real>(jets: &[PointJet<T>], rho: &[T]) -> T {
    jets.par_iter()
        .map(|jet| ceq_residual(&VCeqSystem::from_jet(jet), rho))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(T::zero(), T::max)
}

/// Jets of the metric in the frame orthonormal for `g` at `e_1`, if every
/// sample is vertically contact there; stops at the first one that is not.
fn quadratic_frame_jets<T: Real>(
    metric: &dyn FinslerMetric<T>,
    p: &[T],
    samples: &[Vec<T>],
    tol: &TolerancePolicy<T>,
) -> Result<Option<Vec<PointJet<T>>>> {
    let Ok(frame) = orthonormalizing_frame(metric, p, &samples[0]) else {
        return Ok(None);
    };
    let reframed = Reframed::new(metric, frame)?;
    let p_hat = reframed.pull_point(p)?;
    let mut jets = Vec::with_capacity(samples.len());
    for v in samples {
        let jet = jet_at(&reframed, &p_hat, v, false)?;
        if !f_matrix(&jet).is_vertical(tol) {
            return Ok(None);
        }
        jets.push(jet);
    }
    Ok(Some(jets))
}

/// Full pointwise pipeline: sample, classify, branch on vertical contact,
/// recover `rho` in closed form and validate it on every sample.
///
/// Failure modes of the data are encoded in the status; errors are
/// reserved for invalid arguments and metric evaluation failures.
pub fn solve_at_point<T: Real>(
    metric: &dyn FinslerMetric<T>,
    p: &[T],
    config: &SolverConfig<T>,
) -> Result<SolveOutcome<T>> {
    let n = metric.dim();
    check_dim("point", n, p.len())?;
    config.validate(n)?;
    let tol = &config.tol;
    let samples = sphere_samples::<T>(n, config.n_sphere_samples, config.seed);
    let mut jets = evaluate_samples(metric, p, &samples)?;
    let count_vertical = |jets: &[PointJet<T>]| jets.iter().filter(|j| f_matrix(j).is_vertical(tol)).count();
    let mut vertical = count_vertical(&jets);
    let mut quadratic = vertical == jets.len();
    if !quadratic {
        if let Some(framed) = quadratic_frame_jets(metric, p, &samples, tol)? {
            jets = framed;
            vertical = jets.len();
            quadratic = true;
        }
    }
    let horizontal = jets.iter().filter(|j| is_horizontal(j, tol)).count();
    let nullspace_dim = nullspace_dim_of(&jets, tol);

    if vertical == jets.len() {
        let zero = vec![T::zero(); n];
        let status = if horizontal == jets.len() {
            SolveStatus::RiemannianIndeterminate
        } else {
            SolveStatus::Insolvable
        };
        return Ok(SolveOutcome {
            max_ceq_residual: max_residual(&jets, &zero),
            nullspace_dim,
            quadratic_indicatrix: quadratic,
            vertical_samples: vertical,
            horizontal_samples: horizontal,
            note: Some(match status {
                SolveStatus::Insolvable => "vertically contact sample with nonzero dF/dx".into(),
                _ => "quadratic indicatrix: every rho is compatible".into(),
            }),
            ..base_outcome(status, jets.len())
        });
    }

    let mut best: Option<(usize, PivotChoice<T>)> = None;
    for (s, jet) in jets.iter().enumerate() {
        if let Some(pv) = pick_pivot(&f_matrix(jet), tol) {
            if best.is_none_or(|(_, b)| pv.magnitude > b.magnitude) {
                best = Some((s, pv));
            }
        }
    }
    let (s, pivot) = best.expect("some sample is not vertically contact");
    let base_v = samples[s].clone();
    let intrinsic = intrinsic_sweep(&jets, tol);
    let mut outcome = SolveOutcome {
        intrinsic,
        nullspace_dim,
        base_v: Some(base_v.clone()),
        pivot: Some(pivot),
        vertical_samples: vertical,
        horizontal_samples: horizontal,
        ..base_outcome(SolveStatus::DegenerateSampling, jets.len())
    };

    let (candidate, attempts) = match candidate_at(metric, p, &base_v, pivot, config) {
        Ok(c) => c,
        Err(e @ (Error::EpsilonExhausted { .. } | Error::ShiftSingular { .. })) => {
            outcome.eps_attempts = config.max_eps_retries + 1;
            outcome.note = Some(e.to_string());
            return Ok(outcome);
        }
        Err(e) => return Err(e),
    };
    outcome.epsilon_used = Some(candidate.eps);
    outcome.eps_attempts = attempts;
    outcome.max_ceq_residual = max_residual(&jets, &candidate.rho);
    let intrinsic_ok = outcome
        .intrinsic
        .as_ref()
        .is_none_or(|r| r.worst_residual <= tol.residual_tol);
    if outcome.max_ceq_residual <= tol.residual_tol && intrinsic_ok {
        outcome.status = SolveStatus::Unique;
        outcome.rho = Some(candidate.rho.clone());
    } else {
        outcome.status = SolveStatus::Insolvable;
        outcome.note = Some(if intrinsic_ok {
            "closed-form rho fails the compatibility equations at some sample".into()
        } else {
            "intrinsic cyclic conditions violated".into()
        });
    }
    outcome.candidate_rho = Some(candidate.rho);
    Ok(outcome)
}
