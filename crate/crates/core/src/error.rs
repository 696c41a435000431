use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate geometry: d ({d}) must exceed r ({r})")]
    DegenerateGeometry { r: f64, d: f64 },

    #[error("tension must be positive, got {0} N")]
    NonPositiveTension(f64),

    #[error("resonance singularity: zero damping at omega^2 = k (omega = {omega} rad/s)")]
    ResonanceSingularity { omega: f64 },

    #[error("kernel order {order} exceeds context maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("kernel order {order} expects {expected} frequencies, got {got}")]
    FrequencyCount { order: usize, expected: usize, got: usize },

    #[error("input spectrum is not conjugate-symmetric at harmonic {index}")]
    NotConjugateSymmetric { index: i32 },

    #[error("tuple enumeration would visit {needed} tuples, above the cap of {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("optimizer did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("response not steady: envelope spread {spread:.4} exceeds {limit}")]
    NotSteady { spread: f64, limit: f64 },

    #[error("signal error: {0}")]
    Signal(String),

    #[error("empty range for `{0}`")]
    EmptyRange(&'static str),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}
