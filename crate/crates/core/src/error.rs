use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Inputs are geometrically degenerate (coincident/collinear points,
    /// dependent planes, zero vectors, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A grid operation was asked of a grid that is too small for it.
    #[error("grid too small: need at least {need}, got {got}")]
    GridTooSmall { need: String, got: String },

    /// Frame extraction found a structural component that should vanish but
    /// does not: the net is not asymptotic at this vertex.
    #[error("not asymptotic at vertex ({i},{j}): structural residual {residual:.3e}")]
    NotAsymptotic { i: usize, j: usize, residual: f64 },

    /// A frame coefficient that must be nonzero vanished.
    #[error("frame degenerate at vertex ({i},{j}): coefficient {name} is zero")]
    FrameDegenerate { i: usize, j: usize, name: &'static str },

    /// Division by a quantity that the theory requires to be nonzero.
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    /// The two lattice paths to a diagonal quadric disagree.
    #[error("quadric propagation inconsistent at face ({i},{j}): |p12-p21| = {residual:.3e}")]
    PathDisagreement { i: usize, j: usize, residual: f64 },

    /// The gauge normalisation would require a complex gauge.
    #[error("real-gauge condition violated at vertex ({i},{j}): 1 - b1*d2/(b2*d1) = {value:.6e}")]
    RealGaugeViolation { i: usize, j: usize, value: f64 },

    /// Envelope propagation failed to close around a vertex.
    #[error("envelope does not close at vertex ({i},{j}): mismatch {residual:.3e}")]
    ClosureFailure { i: usize, j: usize, residual: f64 },

    /// The Cauchy evolution found no admissible root.
    #[error("evolution breakdown at vertex ({i},{j}): {detail}")]
    EvolutionBreakdown { i: usize, j: usize, detail: String },

    /// The Cauchy evolution found more than one admissible root.
    #[error("ambiguous evolution at vertex ({i},{j}): {count} admissible roots")]
    AmbiguousRoot { i: usize, j: usize, count: usize },

    /// Exact arithmetic cannot represent the requested quantity.
    #[error("not representable exactly: {0}")]
    Inexact(&'static str),

    /// An internal consistency check failed (indicates a bug or broken input).
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// Optimisation did not converge; the requested instance could not be
    /// constructed at this scale.
    #[error("construction infeasible: {0}")]
    Infeasible(String),

    /// Serialization / file format problems.
    #[error("parse error: {0}")]
    Parse(String),

    /// Unsupported document version.
    #[error("unsupported format version {0}")]
    Version(u32),

    /// I/O failure wrapped with context.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
