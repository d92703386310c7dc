use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is degenerate (zero-length side, point on a boundary where an interior
    /// point was required, and so on).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The search region of the angular excess is empty.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("internal error: {0}")]
    Internal(String),

    /// The flow integrator could no longer make progress.
    #[error("step collapse at t = {t}: {reason}")]
    Stiffness { t: f64, reason: String },

    /// A Riccati solution left every bounded region; the focal time lies in `[t_lo, t_hi]`.
    #[error("focal point reached, blow-up time in [{t_lo}, {t_hi}]")]
    FocalPoint { t_lo: f64, t_hi: f64 },

    #[error("no unique soul: {0}")]
    NoUniqueSoul(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl GeomError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GeomError::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        GeomError::Precondition(msg.into())
    }
}
