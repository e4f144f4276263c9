use thiserror::Error;

use crate::expr::{DomainError, ParseError};
use crate::lorentz::LorentzError;

/// Every failure the toolkit reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error("not spacelike at (u, v) = ({u}, {v})")]
    NotSpacelike { u: f64, v: f64 },
    #[error("normal space degenerate at (u, v) = ({u}, {v}): no timelike direction among seeds")]
    DegenerateNormal { u: f64, v: f64 },
    #[error("grid index ({i}, {j}) is within two nodes of the boundary")]
    NearBoundary { i: usize, j: usize },
    #[error("(u, v) = ({u}, {v}) is not a node of the sampled grid")]
    OffGrid { u: f64, v: f64 },
    #[error("flat point: {what} undefined")]
    FlatPoint { what: &'static str },
    #[error("minimal point: frame undefined at (u, v) = ({u}, {v})")]
    MinimalPoint { u: f64, v: f64 },
    #[error("lightlike mean curvature unsupported (out of paper scope) at (u, v) = ({u}, {v})")]
    LightlikeMeanCurvature { u: f64, v: f64 },
    #[error("internal inconsistency at (u, v) = ({u}, {v}): mu = {mu:.3e} vanishes at a non-minimal point")]
    MuInconsistent { u: f64, v: f64, mu: f64 },
    #[error("constraint {constraint} violated at u = {u} (value {value:.6e})")]
    Constraint {
        constraint: &'static str,
        u: f64,
        value: f64,
    },
    #[error("degenerate denominator in {what} at (u, v) = ({u}, {v})")]
    DegenerateDenominator { what: &'static str, u: f64, v: f64 },
    #[error("metric positivity violated for {what} at (u, v) = ({u}, {v})")]
    MetricPositivity { what: &'static str, u: f64, v: f64 },
    #[error("Jacobian of the parameter change vanishes at ({u}, {v})")]
    SingularChange { u: f64, v: f64 },
    #[error("mean curvature changes causal type between nodes ({i0}, {j0}) and ({i1}, {j1})")]
    CausalChange {
        i0: usize,
        j0: usize,
        i1: usize,
        j1: usize,
    },
    #[error("frame drift {drift:.3e} exceeds 1e-3 in the step ending at (u, v) = ({u}, {v})")]
    Drift { drift: f64, u: f64, v: f64 },
    #[error("integrability residual {residual:.3e} exceeds gate {gate:.3e} ({condition} at (u, v) = ({u}, {v}))")]
    IntegrabilityGate {
        residual: f64,
        gate: f64,
        condition: String,
        u: f64,
        v: f64,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl GeomError {
    /// True for failures of a numerical diagnostic rather than of input validity.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            GeomError::Drift { .. } | GeomError::IntegrabilityGate { .. }
        )
    }
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
