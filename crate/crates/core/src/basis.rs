//! Collective-mode basis that diagonalizes the uniform chain.
//!
//! The uniform tridiagonal Hamiltonian is diagonalized by the sine transform
//! `S(m, n) = sqrt(2 / (N + 1)) * sin(m n pi / (N + 1))` with eigenfrequencies
//! `Omega_r = omega + 2 J cos(r pi / (N + 1))`.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::chain::ChainConfig;
use crate::error::{CoreError, Result};

/// Orthogonal sine basis and mode frequencies of a uniform chain.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    s: Array2<f64>,
    omega_r: Vec<f64>,
}

impl ModeBasis {
    /// The symmetric orthogonal matrix `S`; `S[[m, n]]` uses 0-based indices
    /// for the 1-based sites/modes `m+1`, `n+1`.
    pub fn s(&self) -> &Array2<f64> {
        &self.s
    }

    /// Mode frequencies `Omega_r`, `r = 1..=n` (index 0 holds `r = 1`).
    pub fn omega_r(&self) -> &[f64] {
        &self.omega_r
    }

    pub fn n(&self) -> usize {
        self.omega_r.len()
    }
}

/// Build the sine eigenbasis of a uniform chain.
///
/// Errors with [`CoreError::UnsupportedProfile`] for nonuniform profiles,
/// which have no closed-form diagonalization here.
pub fn mode_basis(config: &ChainConfig) -> Result<ModeBasis> {
    if !config.profile().is_uniform() {
        return Err(CoreError::UnsupportedProfile(format!(
            "analytic mode basis requires a uniform profile, got {}",
            config.profile().label()
        )));
    }
    let n = config.n();
    let norm = (2.0 / (n as f64 + 1.0)).sqrt();
    let s = Array2::from_shape_fn((n, n), |(m, p)| {
        let arg = (m as f64 + 1.0) * (p as f64 + 1.0) * PI / (n as f64 + 1.0);
        norm * arg.sin()
    });
    let omega_r = (1..=n)
        .map(|r| config.omega() + 2.0 * config.j() * (r as f64 * PI / (n as f64 + 1.0)).cos())
        .collect();
    Ok(ModeBasis { s, omega_r })
}
