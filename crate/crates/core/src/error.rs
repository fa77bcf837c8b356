use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, DickeError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DickeError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A sub-ohmic rate was evaluated at zero frequency.
    #[error("damping rate is singular at omega = 0 for exponent {exponent}")]
    Singularity { exponent: f64 },

    #[error("{context}: no convergence (last iterate {last_iterate}, residual {residual:e})")]
    NonConvergence {
        context: String,
        last_iterate: Complex64,
        residual: f64,
    },

    #[error("no sign change of the constant term on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("port {port} has zero coupling at omega = {omega}")]
    SingularPort { port: char, omega: f64 },

    #[error("no reflection minimum found for the {0} branch")]
    NoMinimum(&'static str),

    #[error("operation requires ohmic baths (s = 0)")]
    NotOhmic,

    #[error("at sweep value {value}: {source}")]
    AtSweepPoint {
        value: f64,
        #[source]
        source: Box<DickeError>,
    },
}

impl DickeError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        DickeError::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn at(self, value: f64) -> Self {
        DickeError::AtSweepPoint {
            value,
            source: Box::new(self),
        }
    }

    /// True for failures of an iterative solver, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            DickeError::NonConvergence { .. } | DickeError::NoMinimum(_) => true,
            DickeError::AtSweepPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
