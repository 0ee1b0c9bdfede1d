//! Simulation core for a cavity quantum battery charged through a chain of
//! coupled single-mode cavities.
//!
//! The chain Hamiltonian is a real symmetric tridiagonal matrix: a common
//! cavity frequency on the diagonal and nearest-neighbour couplings off it.
//! Uniform chains are diagonalized exactly by a sine transform; arbitrary
//! coupling profiles are propagated numerically, with the matrix exponential
//! as a cross-validating reference. On top of the single-particle propagator
//! sit the battery reduced states of three charging scenarios (one photon in
//! the charger, a vacuum/photon superposition, an entangled charging line),
//! their ergotropy, and the protocol drivers that locate the maximum-power
//! charging time and scan chain lengths.
//!
//! All quantities are reported in units of the cavity frequency (energies)
//! and of the inverse base coupling (times), so the interesting physics
//! depends only on the ratio `omega / J`.

pub mod basis;
pub mod chain;
pub mod error;
pub mod linalg;
pub mod propagator;
pub mod protocols;
pub mod states;
pub mod tol;

pub use basis::{mode_basis, ModeBasis};
pub use chain::{build_hamiltonian, ChainConfig, CouplingProfile};
pub use error::{CoreError, Result};
pub use propagator::{
    analytic_propagator, numeric_propagator, numeric_propagator_with, IntegratorOpts,
    PropagationMethod, PropagatorMatrix,
};
pub use protocols::{
    beta_sweep, coarse_step, critical_n, default_window, max_power_time, scan_n, time_series,
    BetaPoint, ChargerTemplate, Grid, PowerPeak, ProfileKind, ScanParams, ScanSummary, TauRule,
    TimeSeries, WindowRule,
};
pub use states::{
    battery_state_single_photon, battery_state_superposition, battery_state_wstate, energy,
    ergotropy, ergotropy_closed_form_single, ergotropy_closed_form_superposition, passive_state,
    BatteryState, Charger, PassiveState, SuperpositionParams, WLineParams, WMode,
};
