//! Error rates, false-accept security and record linkage.

mod correlation;
mod fas;
mod linkage;
mod rates;

pub use correlation::{correlation_attack, CorrelationResult};
pub use fas::{bfs_floor, fas_bits, fas_extrapolate, FasEntry};
pub use linkage::{linkage_probability, linkage_probability_f64, log2_rational};
pub use rates::{
    decidability, error_curve, eer, vault_error_rates, ErrorCurve, MetricsOptions, MetricsReport, MetricsRow,
    RateRow, TrialOutcome,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SecurityError {
    #[error("no {0} samples")]
    EmptyClass(&'static str),
    #[error("pooled variance is zero")]
    ZeroVariance,
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("records do not share parameters")]
    ParamMismatch,
}
