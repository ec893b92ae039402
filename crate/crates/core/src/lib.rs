//! Compatibility equations for semi-symmetric linear connections on
//! Finsler manifolds.
//!
//! A linear connection with torsion `T(X, Y) = rho(Y) X - rho(X) Y` is
//! compatible with a Finsler metric `F` when parallel transport preserves
//! `F`. In normal coordinates at a point this becomes a linear system in
//! the one-form `rho` at every non-zero tangent vector. The crate assembles
//! that system, classifies tangent vectors by contact type, tests the
//! intrinsic solvability conditions and recovers `rho` in closed form,
//! cross-checked against a stacked least-squares oracle.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod averaged;
pub mod ceq;
pub mod contact;
pub mod diff;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod real;
pub mod sampling;

pub use averaged::{averaged_metric_at, normal_deviation, AveragedMetric, QuadratureScheme, QuadratureSpec};
pub use ceq::{
    assemble, ceq_residual, closed_form_rho, eliminated_solve, homogeneous_nullspace_dim, intrinsic_check,
    ls_oracle, solve_at_point, IntrinsicReport, SolveOutcome, SolveStatus, SolverConfig, VCeqSystem,
};
pub use contact::{classify, f_matrix, pick_pivot, span_rank, ContactClass, FMatrix, PivotChoice};
pub use diff::{jet_at, Jet, PointJet, Scalar};
pub use error::{Error, Result};
pub use linalg::{Matrix, TolerancePolicy};
pub use metrics::{build, FinslerMetric, GenericMetric, Metric, MetricSpec};
pub use real::Real;

pub type Matrix64 = Matrix<f64>;
pub type Jet64 = Jet<f64>;
pub type PointJet64 = PointJet<f64>;
pub type Metric64 = Metric<f64>;
pub type TolerancePolicy64 = TolerancePolicy<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolveOutcome64 = SolveOutcome<f64>;
pub type VCeqSystem64 = VCeqSystem<f64>;
pub type AveragedMetric64 = AveragedMetric<f64>;

pub type Matrix32 = Matrix<f32>;
pub type Metric32 = Metric<f32>;
pub type SolverConfig32 = SolverConfig<f32>;
