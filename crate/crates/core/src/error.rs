use thiserror::Error;

/// Errors raised by the form calculus, the gauge layer and the drivers built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree overflow: {op} would produce a form of degree {degree} on a {dim}-dimensional domain")]
    DegreeOverflow {
        op: &'static str,
        degree: usize,
        dim: usize,
    },

    #[error("degree mismatch: {op} expected degree {expected}, got {got}")]
    DegreeMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{op} is not defined on degree {degree} forms in dimension {dim}")]
    UnsupportedDegree {
        op: &'static str,
        degree: usize,
        dim: usize,
    },

    #[error("forms live on different domains")]
    DomainMismatch,

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("{op} requires a torus domain")]
    RequiresTorus { op: &'static str },

    #[error("point-cloud form has no analytic derivative table attached")]
    MissingAnalyticDerivative,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("metric coefficient {value} on axis {axis} at sample {point} is not positive")]
    NonPositiveMetric { axis: usize, point: usize, value: f64 },

    #[error("dimension {dim} is too small for {op}")]
    DimensionTooSmall { op: &'static str, dim: usize },

    #[error("input of {op} is not primitive (|Lambda eta| = {defect:e})")]
    NonPrimitive { op: &'static str, defect: f64 },

    #[error("zeta vanishes at sample {point}")]
    DegenerateZeta { point: usize },

    #[error("invalid connection: {0}")]
    InvalidConnection(String),

    #[error("gauge field sample {point} is not in SU(2) (defect {defect:e})")]
    NonUnitaryGauge { point: usize, defect: f64 },

    #[error("{0} is only implemented for abelian connections")]
    AbelianOnly(&'static str),

    #[error("flow step size underflow after {halvings} halvings at t = {time}")]
    StepUnderflow { halvings: usize, time: f64 },

    #[error("non-finite value encountered in {0}")]
    NotFinite(&'static str),

    #[error("conjugate gradients did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
