//! Machine-readable report types.

use finsler_ceq::averaged::AveragedMetric;
use finsler_ceq::ceq::IntrinsicReport;
use finsler_ceq::{MetricSpec, SolveOutcome};
use serde::Serialize;

use crate::config::{Command, JobConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: JobConfig,
    pub metric: String,
    pub result: CommandResult,
    /// The only field that varies between identical runs.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandResult {
    Solve(SolveOutcome<f64>),
    Analyze(Census),
    Check(CheckSummary),
    Synth(SynthSummary),
}

/// Contact classification of the sampled directions at the point.
#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub samples: usize,
    pub vertical: usize,
    pub horizontal: usize,
    /// Vertically but not horizontally contact: each one rules out a solution.
    pub vertical_not_horizontal: usize,
    pub span_rank_0: usize,
    pub span_rank_2: usize,
    pub rank_anomalies: usize,
    pub max_pivot: Option<f64>,
    pub min_pivot: Option<f64>,
    pub max_euler_defect: f64,
    pub min_hessian_eigenvalue: f64,
    pub averaged: Option<AveragedSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragedSummary {
    #[serde(flatten)]
    pub metric: AveragedMetric<f64>,
    pub normal_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub samples: usize,
    pub vertical: usize,
    pub intrinsic: Option<IntrinsicReport<f64>>,
    /// `true` when the worst cyclic residual is within `residual_tol`.
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthSummary {
    pub germ: MetricSpec,
    pub outcome: SolveOutcome<f64>,
    /// `|rho - rho*|_inf`, absent when no unique `rho` was found.
    pub recovery_error: Option<f64>,
}

impl Report {
    /// The report with the wall time zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }
}
