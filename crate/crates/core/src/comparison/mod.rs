//! Numerical verifiers for the comparison statements behind the soul construction.

mod checks;
mod spherical;
mod trapezoid;

use serde::{Deserialize, Serialize};

pub use checks::*;
pub use spherical::*;
pub use trapezoid::*;

/// Machine-readable outcome of a sampled verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub trials: usize,
    pub worst_slack: f64,
    pub failures: Vec<serde_json::Value>,
}
