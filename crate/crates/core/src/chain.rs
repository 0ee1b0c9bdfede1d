//! Chain geometry: cavity count, frequency, coupling profile and the
//! single-particle Hamiltonian built from them.

use ndarray::Array2;

use crate::error::{CoreError, Result};

/// Nearest-neighbour coupling profile along the chain.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingProfile {
    /// Every bond carries the same coupling `j`.
    Uniform,
    /// Bond `p` (1-based) carries `j * sqrt(p * (n - p))`; this profile
    /// relocates an excitation from site 1 to site n with unit probability
    /// at time `pi / (2 j)`.
    Parabolic,
    /// Explicit bond couplings, one per nearest-neighbour pair.
    Custom(Vec<f64>),
}

impl CouplingProfile {
    pub fn is_uniform(&self) -> bool {
        matches!(self, CouplingProfile::Uniform)
    }

    /// Short lowercase tag for metadata and error messages.
    pub fn label(&self) -> &'static str {
        match self {
            CouplingProfile::Uniform => "uniform",
            CouplingProfile::Parabolic => "parabolic",
            CouplingProfile::Custom(_) => "custom",
        }
    }
}

/// A chain of `n` single-mode cavities: site 1 is the charger, site `n` the
/// battery, and the `n - 2` sites in between form the charging line.
///
/// `omega` is the common cavity frequency and `j` the base coupling; `1/j`
/// sets the time unit, so all times in this crate are the dimensionless `J t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    n: usize,
    omega: f64,
    j: f64,
    profile: CouplingProfile,
}

impl ChainConfig {
    pub fn new(n: usize, omega: f64, j: f64, profile: CouplingProfile) -> Result<Self> {
        if n < 2 {
            return Err(CoreError::Config(format!(
                "chain needs at least 2 cavities, got {n}"
            )));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(CoreError::Config(format!(
                "cavity frequency must be positive and finite, got {omega}"
            )));
        }
        if !j.is_finite() || j <= 0.0 {
            return Err(CoreError::Config(format!(
                "base coupling must be positive and finite, got {j}"
            )));
        }
        if let CouplingProfile::Custom(c) = &profile {
            if c.len() != n - 1 {
                return Err(CoreError::Config(format!(
                    "custom profile needs exactly {} couplings, got {}",
                    n - 1,
                    c.len()
                )));
            }
            if let Some(bad) = c.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(CoreError::Config(format!(
                    "couplings must be nonnegative and finite, got {bad}"
                )));
            }
        }
        Ok(Self { n, omega, j, profile })
    }

    /// Uniform chain with `omega = j = 1`, the default working point.
    pub fn uniform_unit(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 1.0, CouplingProfile::Uniform)
    }

    /// Parabolic chain with `omega = j = 1`.
    pub fn parabolic_unit(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 1.0, CouplingProfile::Parabolic)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    /// Bond couplings `J_p` for `p = 1..n-1`, in the same units as `j`.
    pub fn couplings(&self) -> Vec<f64> {
        match &self.profile {
            CouplingProfile::Uniform => vec![self.j; self.n - 1],
            CouplingProfile::Parabolic => (1..self.n)
                .map(|p| {
                    let p = p as f64;
                    self.j * (p * (self.n as f64 - p)).sqrt()
                })
                .collect(),
            CouplingProfile::Custom(c) => c.clone(),
        }
    }

    /// Largest bond coupling; controls the integrator step.
    pub fn max_coupling(&self) -> f64 {
        self.couplings().into_iter().fold(0.0, f64::max)
    }
}

/// Single-particle Hamiltonian of the chain: `omega` on the diagonal and the
/// profile couplings on the first off-diagonals. Real symmetric tridiagonal,
/// returned dense.
pub fn build_hamiltonian(config: &ChainConfig) -> Array2<f64> {
    let n = config.n();
    let couplings = config.couplings();
    let mut h = Array2::zeros((n, n));
    for p in 0..n {
        h[[p, p]] = config.omega();
    }
    for (p, &c) in couplings.iter().enumerate() {
        h[[p, p + 1]] = c;
        h[[p + 1, p]] = c;
    }
    h
}
