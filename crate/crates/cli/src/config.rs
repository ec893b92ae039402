//! Job configuration: file parsing, flag overrides and validation.

use std::path::Path;

use finsler_ceq::averaged::QuadratureSpec;
use finsler_ceq::metrics::{build, MetricSpec, Norm};
use finsler_ceq::SolverConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Analyze,
    Check,
    Synth,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Analyze => "analyze",
            Command::Check => "check",
            Command::Synth => "synth",
        }
    }
}

/// Contents of a job file. For `synth`, `metric` is the base norm and
/// `rho_star` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub metric: MetricSpec,
    pub point: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Values given on the command line; each replaces the file's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub samples: Option<usize>,
    pub residual_tol: Option<f64>,
    pub contact_tol: Option<f64>,
    pub rank_tol: Option<f64>,
    pub seed: Option<u64>,
    pub eps_fraction: Option<f64>,
    pub out: Option<String>,
}

impl JobConfig {
    /// TOML, or JSON when the extension is `.json`.
    pub fn parse(text: &str, json: bool) -> Result<Self, ConfigError> {
        let value: serde_json::Value = if json {
            serde_json::from_str(text).map_err(|e| invalid("<document>", e))?
        } else {
            toml::from_str(text).map_err(|e| invalid("<document>", e.message()))?
        };
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            invalid(if path == "." { "<document>".into() } else { path }, e.into_inner())
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        Self::parse(&text, json)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.solver;
        if let Some(v) = o.samples {
            s.n_sphere_samples = v;
        }
        if let Some(v) = o.residual_tol {
            s.tol.residual_tol = v;
        }
        if let Some(v) = o.contact_tol {
            s.tol.contact_tol = v;
        }
        if let Some(v) = o.rank_tol {
            s.tol.rank_rel_tol = v;
        }
        if let Some(v) = o.seed {
            s.seed = v;
        }
        if let Some(v) = o.eps_fraction {
            s.eps_fraction = v;
        }
        if let Some(v) = &o.out {
            self.output_path = Some(v.clone());
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn validate(&self, command: Command) -> Result<(), ConfigError> {
        if command == Command::Synth {
            Norm::<f64>::from_spec(&self.metric).map_err(|e| invalid("metric", e))?;
        } else {
            build::<f64>(&self.metric).map_err(|e| invalid("metric", e))?;
        }
        let n = self.dim();
        if self.point.len() != n {
            return Err(invalid(
                "point",
                format!("has length {}, metric dimension is {n}", self.point.len()),
            ));
        }
        if self.point.iter().any(|x| !x.is_finite()) {
            return Err(invalid("point", "entries must be finite"));
        }
        match (&self.rho_star, command) {
            (None, Command::Synth) => return Err(invalid("rho_star", "required by synth")),
            (Some(r), _) if r.len() != n => {
                return Err(invalid("rho_star", format!("has length {}, expected {n}", r.len())))
            }
            (Some(r), _) if r.iter().any(|x| !x.is_finite()) => {
                return Err(invalid("rho_star", "entries must be finite"))
            }
            _ => {}
        }
        self.solver.validate(n).map_err(|e| invalid("solver", e))?;
        if let Some(q) = &self.quad {
            q.validate(n).map_err(|e| invalid("quad", e))?;
        }
        Ok(())
    }
}
