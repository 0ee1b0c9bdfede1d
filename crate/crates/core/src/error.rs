use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A chain, charger or grid parameter violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation that requires the analytic collective-mode basis was
    /// asked to run on a coupling profile it does not cover.
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    /// The time integrator failed to reach the requested accuracy.
    #[error("integration failed: {message} (achieved error estimate {estimate:.3e})")]
    Integration { message: String, estimate: f64 },

    /// An input value lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The unsymmetrized two-photon populations turned nonphysical; this is
    /// reported instead of being clipped.
    #[error("unsymmetrized two-photon state has negative ground population p0 = {p0:.3e}")]
    NonphysicalPopulation { p0: f64 },

    /// A quantity that must be nonnegative up to rounding came out
    /// significantly negative; surfaced instead of hidden.
    #[error("internal consistency violation: {0}")]
    Internal(String),

    /// The search window ended while the scanned quantity was still rising.
    #[error("window too small: {0}")]
    WindowTooSmall(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
