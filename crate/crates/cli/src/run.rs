use std::time::Instant;

use finsler_ceq::averaged::{averaged_metric_at, normal_deviation};
use finsler_ceq::ceq::intrinsic_sweep;
use finsler_ceq::contact::{classify, f_matrix, pick_pivot, span_rank};
use finsler_ceq::metrics::{build, min_hessian_eigenvalue, MetricSpec};
use finsler_ceq::sampling::sphere_samples;
use finsler_ceq::{jet_at, solve_at_point, Metric, PointJet, SolveStatus};
use rayon::prelude::*;

use crate::config::{Command, ConfigError, JobConfig};
use crate::report::{AveragedSummary, Census, CheckSummary, CommandResult, Report, SynthSummary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Library {
        context: &'static str,
        #[source]
        source: finsler_ceq::Error,
    },
    #[error("cannot build thread pool: {0}")]
    Threads(String),
}

trait Context<T> {
    fn context(self, context: &'static str) -> Result<T, RunError>;
}

impl<T> Context<T> for finsler_ceq::Result<T> {
    fn context(self, context: &'static str) -> Result<T, RunError> {
        self.map_err(|source| RunError::Library { context, source })
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const RUNTIME: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INSOLVABLE: u8 = 3;
    pub const DEGENERATE_SAMPLING: u8 = 4;
    pub const CONFIG_INVALID: u8 = 5;
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(ConfigError::Invalid { .. }) => exit::CONFIG_INVALID,
            _ => exit::RUNTIME,
        }
    }
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        match &self.result {
            CommandResult::Solve(o) => match o.status {
                SolveStatus::Unique | SolveStatus::RiemannianIndeterminate => exit::OK,
                SolveStatus::Insolvable => exit::INSOLVABLE,
                SolveStatus::DegenerateSampling => exit::DEGENERATE_SAMPLING,
            },
            _ => exit::OK,
        }
    }
}

fn sample_jets(metric: &Metric<f64>, cfg: &JobConfig) -> Result<Vec<PointJet<f64>>, RunError> {
    let n = cfg.dim();
    sphere_samples::<f64>(n, cfg.solver.n_sphere_samples, cfg.solver.seed)
        .par_iter()
        .map(|v| jet_at(metric, &cfg.point, v, false))
        .collect::<finsler_ceq::Result<_>>()
        .context("evaluating the metric at the sample directions")
}

fn analyze(metric: &Metric<f64>, cfg: &JobConfig) -> Result<Census, RunError> {
    let tol = &cfg.solver.tol;
    let jets = sample_jets(metric, cfg)?;
    let mut c = Census {
        samples: jets.len(),
        vertical: 0,
        horizontal: 0,
        vertical_not_horizontal: 0,
        span_rank_0: 0,
        span_rank_2: 0,
        rank_anomalies: 0,
        max_pivot: None,
        min_pivot: None,
        max_euler_defect: 0.0,
        min_hessian_eigenvalue: min_hessian_eigenvalue(metric, &cfg.point, cfg.solver.n_sphere_samples, cfg.solver.seed)
            .context("probing convexity")?,
        averaged: None,
    };
    for jet in &jets {
        let class = classify(jet, tol);
        c.vertical += usize::from(class.vertical);
        c.horizontal += usize::from(class.horizontal);
        c.vertical_not_horizontal += usize::from(class.vertical && !class.horizontal);
        let fm = f_matrix(jet);
        match span_rank(&fm, tol) {
            Ok(0) => c.span_rank_0 += 1,
            Ok(_) => c.span_rank_2 += 1,
            Err(_) => c.rank_anomalies += 1,
        }
        if let Some(p) = pick_pivot(&fm, tol) {
            c.max_pivot = Some(c.max_pivot.map_or(p.magnitude, |m| m.max(p.magnitude)));
            c.min_pivot = Some(c.min_pivot.map_or(p.magnitude, |m| m.min(p.magnitude)));
        }
        c.max_euler_defect = c.max_euler_defect.max(jet.euler_defect().abs());
    }
    if let Some(q) = &cfg.quad {
        let avg = averaged_metric_at(metric, &cfg.point, q).context("averaging the metric")?;
        c.averaged = Some(AveragedSummary {
            normal_deviation: normal_deviation(&avg),
            metric: avg,
        });
    }
    Ok(c)
}

fn check(metric: &Metric<f64>, cfg: &JobConfig) -> Result<CheckSummary, RunError> {
    let tol = &cfg.solver.tol;
    let jets = sample_jets(metric, cfg)?;
    let intrinsic = intrinsic_sweep(&jets, tol);
    Ok(CheckSummary {
        samples: jets.len(),
        vertical: jets.iter().filter(|j| f_matrix(j).is_vertical(tol)).count(),
        passed: intrinsic.as_ref().is_none_or(|r| r.worst_residual <= tol.residual_tol),
        intrinsic,
    })
}

fn synth(cfg: &JobConfig) -> Result<SynthSummary, RunError> {
    let rho_star = cfg.rho_star.clone().expect("validated");
    let germ = MetricSpec::germ(cfg.metric.clone(), rho_star.clone(), cfg.point.clone());
    let metric = build::<f64>(&germ).context("building the germ")?;
    let outcome = solve_at_point(&metric, &cfg.point, &cfg.solver).context("solving the germ")?;
    let recovery_error = outcome.rho.as_ref().map(|rho| {
        rho.iter()
            .zip(&rho_star)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    Ok(SynthSummary {
        germ,
        outcome,
        recovery_error,
    })
}

/// Validates `cfg` and runs `command` on it.
pub fn run(command: Command, cfg: JobConfig) -> Result<Report, RunError> {
    let start = Instant::now();
    cfg.validate(command)?;
    let (description, result) = if command == Command::Synth {
        let s = synth(&cfg)?;
        let d = finsler_ceq::FinslerMetric::description(&build::<f64>(&s.germ).context("building the germ")?);
        (d, CommandResult::Synth(s))
    } else {
        let metric = build::<f64>(&cfg.metric).context("building the metric")?;
        let result = match command {
            Command::Solve => CommandResult::Solve(
                solve_at_point(&metric, &cfg.point, &cfg.solver).context("solving at the point")?,
            ),
            Command::Analyze => CommandResult::Analyze(analyze(&metric, &cfg)?),
            Command::Check => CommandResult::Check(check(&metric, &cfg)?),
            Command::Synth => unreachable!(),
        };
        (finsler_ceq::FinslerMetric::description(&metric), result)
    };
    Ok(Report {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        metric: description,
        result,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// [`run`] inside a dedicated pool of `threads` workers (all cores if `None`).
pub fn run_with_threads(command: Command, cfg: JobConfig, threads: Option<usize>) -> Result<Report, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Threads(e.to_string()))?;
    pool.install(|| run(command, cfg))
}
