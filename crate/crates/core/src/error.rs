use thiserror::Error;

/// Failures surfaced by the library. Numeric payloads are widened to `f64`
/// so the error type stays independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric evaluation failed: {0}")]
    EvalDomain(String),

    #[error("invalid metric specification: {0}")]
    SpecInvalid(String),

    #[error("V - eps*I is singular: eps = {eps}, component sum = {sum}")]
    ShiftSingular { eps: f64, sum: f64 },

    #[error("pivot ({i}, {j}) lost{}: |f_ij| = {magnitude}", match .shifted { Some(l) => format!(" at shifted vector w_{l}"), None => String::new() })]
    PivotLost {
        i: usize,
        j: usize,
        shifted: Option<usize>,
        magnitude: f64,
    },

    #[error("tangent vector is vertically contact; no pivot exists")]
    VerticalContact,

    #[error("f-vector family has numerical rank {rank}; expected 0 or 2")]
    RankAnomaly { rank: usize },

    #[error("energy Hessian is not positive definite (smallest eigenvalue {min_eigenvalue})")]
    NotConvex { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("no admissible shift eps after {attempts} attempts: {last}")]
    EpsilonExhausted { attempts: usize, last: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}
