//! Numerical tolerances used across the crate.
//!
//! These are fixed defaults; the propagator ones can be overridden through
//! [`crate::propagator::IntegratorOpts`].

/// Max-norm bound on ‖U·U† − I‖ for any propagator handed to callers.
pub const UNITARITY: f64 = 1e-10;

/// Entrywise agreement required between the analytic and numeric propagators
/// on uniform profiles.
pub const CROSS_VALIDATION: f64 = 1e-8;

/// Max-norm Hermiticity bound for density matrices.
pub const HERMITICITY: f64 = 1e-12;

/// Allowed deviation of a density-matrix trace from one.
pub const TRACE: f64 = 1e-10;

/// Density-matrix eigenvalues may dip this far below zero before the state
/// is rejected.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Ergotropy this far below zero is treated as rounding and clipped; anything
/// lower raises an internal-consistency error.
pub const ERGOTROPY_FLOOR: f64 = -1e-12;

/// Ergotropy below this (in units of the cavity frequency) counts as zero in
/// critical-length scans.
pub const ZERO_ERGOTROPY: f64 = 1e-12;

/// Ground population of the unsymmetrized two-photon state below this value
/// is reported as a formula breakdown rather than clipped.
pub const POPULATION_FLOOR: f64 = -1e-8;

/// Energies below this (units of the cavity frequency) make the
/// ergotropy/energy ratio meaningless; the ratio is defined as zero there.
pub const RATIO_ENERGY_FLOOR: f64 = 1e-14;
