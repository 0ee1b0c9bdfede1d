//! Battery reduced states and work extraction.
//!
//! Each charging scenario reduces to a small diagonal-or-2x2 battery density
//! matrix built from single-particle amplitudes. Ergotropy is the stored
//! energy minus the energy of the passive state, the population-reordered
//! state from which no work is unitarily extractable.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::propagator::PropagatorMatrix;
use crate::tol;

/// Initial state of the charger (and, for `WLine`, of the charging line).
#[derive(Debug, Clone, PartialEq)]
pub enum Charger {
    /// One photon in the charger, everything else empty.
    SinglePhoton,
    /// Charger in `(|1> + beta e^{i phi} |0>) / sqrt(1 + beta^2)`.
    Superposition(SuperpositionParams),
    /// One photon in the charger and one shared across the charging line
    /// with amplitudes `d`.
    WLine(WLineParams),
}

/// Vacuum/one-photon superposition weights for the charger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionParams {
    beta: f64,
    phi: f64,
}

impl SuperpositionParams {
    pub fn new(beta: f64, phi: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(CoreError::Config(format!(
                "superposition weight beta must be nonnegative, got {beta}"
            )));
        }
        if !phi.is_finite() || !(0.0..=2.0 * std::f64::consts::PI + 1e-12).contains(&phi) {
            return Err(CoreError::Config(format!(
                "phase phi must lie in [0, 2*pi], got {phi}"
            )));
        }
        Ok(Self { beta, phi })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Vacuum amplitude `c0 = beta e^{i phi} / sqrt(1 + beta^2)`.
    pub fn c0(&self) -> Complex64 {
        Complex64::from_polar(self.beta / (1.0 + self.beta * self.beta).sqrt(), self.phi)
    }

    /// One-photon amplitude `c1 = 1 / sqrt(1 + beta^2)` (real by convention).
    pub fn c1(&self) -> f64 {
        1.0 / (1.0 + self.beta * self.beta).sqrt()
    }
}

/// Normalized single-excitation amplitudes over the `n - 2` line cavities.
#[derive(Debug, Clone, PartialEq)]
pub struct WLineParams {
    d: Vec<Complex64>,
}

impl WLineParams {
    pub fn new(d: Vec<Complex64>) -> Result<Self> {
        if d.is_empty() {
            return Err(CoreError::Config(
                "charging line amplitudes must not be empty".to_string(),
            ));
        }
        let norm: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(CoreError::Config(format!(
                "line amplitudes must be normalized: sum |d|^2 = {norm}"
            )));
        }
        Ok(Self { d })
    }

    /// Equal-amplitude entangled line state for a chain of `n` cavities.
    pub fn w_state(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(CoreError::Config(format!(
                "a W-state line needs at least one line cavity (n >= 3), got n = {n}"
            )));
        }
        let amp = 1.0 / ((n - 2) as f64).sqrt();
        Self::new(vec![Complex64::new(amp, 0.0); n - 2])
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.d
    }

    /// Number of line cavities covered (`n - 2`).
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Treatment of the two-photon amplitudes in the `WLine` scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WMode {
    /// Ordered-pair amplitudes `f_p g_q` used as-is, without bosonic
    /// symmetrization: `p1 = sum_{m != N} |f_m g_N|^2`, `p2 = |f_N g_N|^2`.
    Unsymmetrized,
    /// Bosonic amplitudes: `p2 = 2 |f_N g_N|^2`,
    /// `p1 = sum_{p != N} |f_p g_N + f_N g_p|^2`; exactly normalized.
    Exact,
}

impl WMode {
    pub fn label(&self) -> &'static str {
        match self {
            WMode::Unsymmetrized => "unsymmetrized",
            WMode::Exact => "exact",
        }
    }
}

impl std::str::FromStr for WMode {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsymmetrized" => Ok(WMode::Unsymmetrized),
            "exact" => Ok(WMode::Exact),
            other => Err(CoreError::Config(format!("unknown w-mode `{other}`"))),
        }
    }
}

/// Battery reduced density matrix on a 2- or 3-level Fock truncation with
/// level energies `(0, omega)` or `(0, omega, 2 omega)`.
#[derive(Debug, Clone)]
pub struct BatteryState {
    rho: Array2<Complex64>,
    levels: Vec<f64>,
}

impl BatteryState {
    /// Validates Hermiticity, unit trace and spectrum nonnegativity.
    pub fn new(rho: Array2<Complex64>, levels: Vec<f64>) -> Result<Self> {
        let d = rho.nrows();
        if rho.ncols() != d || !(2..=3).contains(&d) {
            return Err(CoreError::Config(format!(
                "battery state must be 2x2 or 3x3, got {d}x{}",
                rho.ncols()
            )));
        }
        if levels.len() != d {
            return Err(CoreError::Config(format!(
                "need {d} level energies, got {}",
                levels.len()
            )));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) || levels[0] != 0.0 {
            return Err(CoreError::Config(
                "level energies must start at 0 and be ascending".to_string(),
            ));
        }
        let state = Self { rho, levels };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let dev = (self.rho[[i, j]] - self.rho[[j, i]].conj()).norm();
                if dev > tol::HERMITICITY {
                    return Err(CoreError::Internal(format!(
                        "battery state not Hermitian: |rho[{i}][{j}] - rho[{j}][{i}]*| = {dev:.3e}"
                    )));
                }
            }
        }
        let trace: f64 = (0..d).map(|i| self.rho[[i, i]].re).sum();
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(CoreError::Internal(format!(
                "battery state trace {trace} deviates from 1"
            )));
        }
        for lambda in self.eigenvalues() {
            if lambda < tol::EIGENVALUE_FLOOR {
                return Err(CoreError::Internal(format!(
                    "battery state has negative eigenvalue {lambda:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn rho(&self) -> &Array2<Complex64> {
        &self.rho
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Diagonal populations (real parts).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[[i, i]].re).collect()
    }

    /// Eigenvalues in no particular order: closed form for 2x2, the diagonal
    /// for diagonal 3x3, and the trigonometric characteristic-polynomial
    /// solution otherwise.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim() {
            2 => eigvals_hermitian_2(&self.rho).to_vec(),
            3 => {
                let off = [self.rho[[0, 1]], self.rho[[0, 2]], self.rho[[1, 2]]];
                if off.iter().all(|z| z.norm() < 1e-15) {
                    self.populations()
                } else {
                    eigvals_hermitian_3(&self.rho).to_vec()
                }
            }
            _ => unreachable!("dimension checked at construction"),
        }
    }

    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.rho[[i, j]] * self.rho[[j, i]]).re;
            }
        }
        acc
    }
}

/// Eigenvalues of a Hermitian 2x2 matrix from trace and determinant.
fn eigvals_hermitian_2(m: &Array2<Complex64>) -> [f64; 2] {
    let a = m[[0, 0]].re;
    let d = m[[1, 1]].re;
    let half_diff = 0.5 * (a - d);
    let disc = (half_diff * half_diff + m[[0, 1]].norm_sqr()).sqrt();
    let mean = 0.5 * (a + d);
    [mean + disc, mean - disc]
}

/// Eigenvalues of a Hermitian 3x3 matrix via the trigonometric solution of
/// the characteristic cubic.
fn eigvals_hermitian_3(m: &Array2<Complex64>) -> [f64; 3] {
    let p1 = m[[0, 1]].norm_sqr() + m[[0, 2]].norm_sqr() + m[[1, 2]].norm_sqr();
    let d0 = m[[0, 0]].re;
    let d1 = m[[1, 1]].re;
    let d2 = m[[2, 2]].re;
    let q = (d0 + d1 + d2) / 3.0;
    let p2 = (d0 - q).powi(2) + (d1 - q).powi(2) + (d2 - q).powi(2) + 2.0 * p1;
    if p2 <= 0.0 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let inv_p = 1.0 / p;
    // B = (M - q I) / p, det(B) real for Hermitian M
    let b = m.map(|z| *z * inv_p);
    let bq = q * inv_p;
    let b00 = b[[0, 0]] - bq;
    let b11 = b[[1, 1]] - bq;
    let b22 = b[[2, 2]] - bq;
    let det = b00 * (b11 * b22 - b[[1, 2]] * b[[2, 1]])
        - b[[0, 1]] * (b[[1, 0]] * b22 - b[[1, 2]] * b[[2, 0]])
        + b[[0, 2]] * (b[[1, 0]] * b[[2, 1]] - b11 * b[[2, 0]]);
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e0 = q + 2.0 * p * phi.cos();
    let e2 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e1 = 3.0 * q - e0 - e2;
    [e0, e1, e2]
}

/// Two-level state from the charger-to-battery amplitude of a single photon:
/// populations `(1 - |g|^2, |g|^2)`, no coherences.
pub(crate) fn single_photon_state(g: Complex64, omega: f64) -> Result<BatteryState> {
    let p1 = g.norm_sqr();
    let mut rho = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
    rho[[0, 0]] = Complex64::new(1.0 - p1, 0.0);
    rho[[1, 1]] = Complex64::new(p1, 0.0);
    BatteryState::new(rho, vec![0.0, omega])
}

/// Two-level state for the vacuum/one-photon superposition charger.
pub(crate) fn superposition_state(
    g: Complex64,
    params: &SuperpositionParams,
    omega: f64,
) -> Result<BatteryState> {
    let c0 = params.c0();
    let c1 = params.c1();
    let g2 = g.norm_sqr();
    let mut rho = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
    rho[[0, 0]] = Complex64::new(c0.norm_sqr() + c1 * c1 * (1.0 - g2), 0.0);
    rho[[0, 1]] = c0 * c1 * g.conj();
    rho[[1, 0]] = c0.conj() * c1 * g;
    rho[[1, 1]] = Complex64::new(c1 * c1 * g2, 0.0);
    BatteryState::new(rho, vec![0.0, omega])
}

/// Three-level diagonal state from the full single-particle amplitude
/// vectors of the charger photon (`f`) and the line photon (`g`).
pub(crate) fn w_state_from_amplitudes(
    f: &[Complex64],
    g: &[Complex64],
    mode: WMode,
    omega: f64,
) -> Result<BatteryState> {
    let n = f.len();
    assert_eq!(g.len(), n);
    let fb = f[n - 1];
    let gb = g[n - 1];
    let (p0, p1, p2) = match mode {
        WMode::Unsymmetrized => {
            let p1: f64 = (0..n - 1).map(|m| (f[m] * gb).norm_sqr()).sum();
            let p2 = (fb * gb).norm_sqr();
            let p0 = 1.0 - p1 - p2;
            if p0 < tol::POPULATION_FLOOR {
                return Err(CoreError::NonphysicalPopulation { p0 });
            }
            (p0, p1, p2)
        }
        WMode::Exact => {
            let p1: f64 = (0..n - 1).map(|p| (f[p] * gb + fb * g[p]).norm_sqr()).sum();
            let p2 = 2.0 * (fb * gb).norm_sqr();
            (1.0 - p1 - p2, p1, p2)
        }
    };
    let mut rho = Array2::from_elem((3, 3), Complex64::new(0.0, 0.0));
    rho[[0, 0]] = Complex64::new(p0, 0.0);
    rho[[1, 1]] = Complex64::new(p1, 0.0);
    rho[[2, 2]] = Complex64::new(p2, 0.0);
    BatteryState::new(rho, vec![0.0, omega, 2.0 * omega])
}

/// Battery state when the charger starts with exactly one photon.
pub fn battery_state_single_photon(u: &PropagatorMatrix, omega: f64) -> Result<BatteryState> {
    single_photon_state(u.battery_from_charger(), omega)
}

/// Battery state for the superposition charger; `g = u[n-1][0]` enters both
/// the populations and the coherences.
pub fn battery_state_superposition(
    u: &PropagatorMatrix,
    params: &SuperpositionParams,
    omega: f64,
) -> Result<BatteryState> {
    superposition_state(u.battery_from_charger(), params, omega)
}

/// Battery state when the charging line starts in the entangled state `d`
/// and the charger holds one photon. Needs `n >= 3`.
pub fn battery_state_wstate(
    u: &PropagatorMatrix,
    params: &WLineParams,
    mode: WMode,
    omega: f64,
) -> Result<BatteryState> {
    let n = u.dim();
    if n < 3 {
        return Err(CoreError::Config(format!(
            "the entangled-line scenario needs n >= 3, got n = {n}"
        )));
    }
    if params.len() != n - 2 {
        return Err(CoreError::Config(format!(
            "line amplitudes cover {} cavities but the chain has {} line sites",
            params.len(),
            n - 2
        )));
    }
    // f: propagated charger photon; g: propagated line photon
    let f: Vec<Complex64> = (0..n).map(|p| u.amplitude(p, 0)).collect();
    let g: Vec<Complex64> = (0..n)
        .map(|q| {
            params
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(r, d)| d * u.amplitude(q, r + 1))
                .sum()
        })
        .collect();
    w_state_from_amplitudes(&f, &g, mode, omega)
}

/// Stored energy `sum_k levels[k] rho[k][k]`, in the same units as `levels`.
pub fn energy(state: &BatteryState) -> f64 {
    state
        .levels()
        .iter()
        .zip(state.populations())
        .map(|(lvl, pop)| lvl * pop)
        .sum()
}

/// Population-reordered state: eigenvalues sorted descending against energies
/// sorted ascending. No work is unitarily extractable from it.
#[derive(Debug, Clone)]
pub struct PassiveState {
    populations: Vec<f64>,
    levels: Vec<f64>,
}

impl PassiveState {
    /// Populations in descending order, paired with `levels()` ascending.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Diagonal matrix in the energy eigenbasis.
    pub fn sigma(&self) -> Array2<Complex64> {
        let d = self.populations.len();
        let mut m = Array2::from_elem((d, d), Complex64::new(0.0, 0.0));
        for i in 0..d {
            m[[i, i]] = Complex64::new(self.populations[i], 0.0);
        }
        m
    }

    pub fn energy(&self) -> f64 {
        self.levels
            .iter()
            .zip(&self.populations)
            .map(|(lvl, pop)| lvl * pop)
            .sum()
    }
}

/// Passive state of a battery state.
pub fn passive_state(state: &BatteryState) -> PassiveState {
    let mut populations = state.eigenvalues();
    populations.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut levels = state.levels().to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    PassiveState { populations, levels }
}

/// Maximum unitarily extractable energy: `energy(rho) - energy(sigma)`,
/// clipped to zero within rounding. A result below the clipping floor is an
/// internal-consistency error, not silently hidden.
pub fn ergotropy(state: &BatteryState) -> Result<f64> {
    let value = energy(state) - passive_state(state).energy();
    if value < tol::ERGOTROPY_FLOOR {
        return Err(CoreError::Internal(format!(
            "ergotropy {value:.3e} fell below the clipping floor"
        )));
    }
    Ok(value.max(0.0))
}

/// Closed-form single-photon ergotropy
/// `omega (2 g2 - 1) Theta(g2 - 1/2)`, with `Theta(0) = 0`.
pub fn ergotropy_closed_form_single(g2: f64, omega: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g2) {
        return Err(CoreError::Domain(format!(
            "|g|^2 must lie in [0, 1], got {g2}"
        )));
    }
    Ok(if g2 > 0.5 { omega * (2.0 * g2 - 1.0) } else { 0.0 })
}

/// Closed-form superposition ergotropy
/// `omega c1^2 |g|^2 + omega/2 (sqrt(1 - 4 c1^4 |g|^2 (1 - |g|^2)) - 1)`.
pub fn ergotropy_closed_form_superposition(g: Complex64, c1: f64, omega: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c1) {
        return Err(CoreError::Domain(format!("c1 must lie in [0, 1], got {c1}")));
    }
    let g2 = g.norm_sqr();
    if g2 > 1.0 + 1e-12 {
        return Err(CoreError::Domain(format!("|g| must not exceed 1, got {}", g.norm())));
    }
    let c1sq = c1 * c1;
    let radicand = (1.0 - 4.0 * c1sq * c1sq * g2 * (1.0 - g2)).max(0.0);
    Ok(omega * c1sq * g2 + 0.5 * omega * (radicand.sqrt() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainConfig;
    use crate::propagator::analytic_propagator;
    use approx::assert_abs_diff_eq;

    fn diag_state(pops: &[f64], omega: f64) -> BatteryState {
        let d = pops.len();
        let mut rho = Array2::from_elem((d, d), Complex64::new(0.0, 0.0));
        for (i, &p) in pops.iter().enumerate() {
            rho[[i, i]] = Complex64::new(p, 0.0);
        }
        let levels = (0..d).map(|k| k as f64 * omega).collect();
        BatteryState::new(rho, levels).unwrap()
    }

    #[test]
    fn single_photon_examples() {
        let cfg = ChainConfig::uniform_unit(3).unwrap();
        let empty = battery_state_single_photon(&analytic_propagator(&cfg, 0.0).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(empty.populations()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(empty.populations()[1], 0.0, epsilon = 1e-14);

        let t_full = std::f64::consts::PI / 2f64.sqrt();
        let full = battery_state_single_photon(&analytic_propagator(&cfg, t_full).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(full.populations()[1], 1.0, epsilon = 1e-12);

        // off-diagonals exactly zero
        assert_eq!(full.rho()[[0, 1]], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_photon_energy_is_transfer_probability() {
        let cfg = ChainConfig::uniform_unit(5).unwrap();
        for t in [0.7, 2.1, 6.4] {
            let u = analytic_propagator(&cfg, t).unwrap();
            let state = battery_state_single_photon(&u, 1.0).unwrap();
            assert_abs_diff_eq!(
                energy(&state),
                u.battery_from_charger().norm_sqr(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn superposition_reduces_to_single_photon_at_beta_zero() {
        let cfg = ChainConfig::uniform_unit(4).unwrap();
        let params = SuperpositionParams::new(0.0, 0.0).unwrap();
        for t in [0.9, 3.3] {
            let u = analytic_propagator(&cfg, t).unwrap();
            let a = battery_state_single_photon(&u, 1.0).unwrap();
            let b = battery_state_superposition(&u, &params, 1.0).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    // exact reduction; signed zeros in the dead coherence
                    // entries are the only permitted representation change
                    assert_eq!(a.rho()[[i, j]], b.rho()[[i, j]]);
                }
            }
        }
    }

    #[test]
    fn superposition_edge_cases() {
        // |g| = 0 leaves the battery empty whatever the charger weights
        let params = SuperpositionParams::new(1.7, 1.0).unwrap();
        let state = superposition_state(Complex64::new(0.0, 0.0), &params, 1.0).unwrap();
        assert_abs_diff_eq!(state.populations()[0], 1.0, epsilon = 1e-14);

        // beta = 1, |g| = 1: pure half/half state with coherence 1/2
        let params = SuperpositionParams::new(1.0, 0.0).unwrap();
        let state = superposition_state(Complex64::new(1.0, 0.0), &params, 1.0).unwrap();
        assert_abs_diff_eq!(state.populations()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(state.populations()[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(state.rho()[[0, 1]].norm(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(state.purity(), 1.0, epsilon = 1e-13);
        // pure state: ergotropy equals the full energy above ground
        assert_abs_diff_eq!(ergotropy(&state).unwrap(), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn w_state_empty_battery_at_time_zero() {
        let cfg = ChainConfig::uniform_unit(6).unwrap();
        let u = analytic_propagator(&cfg, 0.0).unwrap();
        let params = WLineParams::w_state(6).unwrap();
        for mode in [WMode::Unsymmetrized, WMode::Exact] {
            let state = battery_state_wstate(&u, &params, mode, 1.0).unwrap();
            assert_abs_diff_eq!(state.populations()[0], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_mode_ground_population_matches_pair_enumeration() {
        // independent oracle: enumerate the symmetrized two-photon basis over
        // pairs that exclude the battery site
        let cfg = ChainConfig::uniform_unit(7).unwrap();
        let params = WLineParams::w_state(7).unwrap();
        for t in [0.6, 1.9, 5.2, 11.0] {
            let u = analytic_propagator(&cfg, t).unwrap();
            let n = u.dim();
            let f: Vec<Complex64> = (0..n).map(|p| u.amplitude(p, 0)).collect();
            let g: Vec<Complex64> = (0..n)
                .map(|q| {
                    params
                        .amplitudes()
                        .iter()
                        .enumerate()
                        .map(|(r, d)| d * u.amplitude(q, r + 1))
                        .sum()
                })
                .collect();
            let mut p0_direct = 0.0;
            for p in 0..n - 1 {
                p0_direct += 2.0 * (f[p] * g[p]).norm_sqr();
                for q in (p + 1)..n - 1 {
                    p0_direct += (f[p] * g[q] + f[q] * g[p]).norm_sqr();
                }
            }
            let state = battery_state_wstate(&u, &params, WMode::Exact, 1.0).unwrap();
            let pops = state.populations();
            assert_abs_diff_eq!(pops[0], p0_direct, epsilon = 1e-10);
            assert_abs_diff_eq!(p0_direct + pops[1] + pops[2], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn unsymmetrized_population_guard_trips() {
        let f = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let g = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let err = w_state_from_amplitudes(&f, &g, WMode::Unsymmetrized, 1.0).unwrap_err();
        assert!(matches!(err, CoreError::NonphysicalPopulation { .. }));
    }

    #[test]
    fn energy_examples() {
        assert_abs_diff_eq!(energy(&diag_state(&[1.0, 0.0], 1.0)), 0.0, epsilon = 1e-15);
        // hand sum: 0.5 * 1 + 0.3 * 2 = 1.1
        assert_abs_diff_eq!(
            energy(&diag_state(&[0.2, 0.5, 0.3], 1.0)),
            1.1,
            epsilon = 1e-15
        );
    }

    #[test]
    fn passive_state_examples() {
        // brute force over all 6 permutations confirms minimality
        let state = diag_state(&[0.2, 0.5, 0.3], 1.0);
        let sigma = passive_state(&state);
        assert_eq!(sigma.populations(), &[0.5, 0.3, 0.2]);
        assert_abs_diff_eq!(sigma.energy(), 0.7, epsilon = 1e-15);

        let eigs = state.eigenvalues();
        let levels = state.levels();
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
        ];
        for perm in perms {
            let e: f64 = perm.iter().zip(levels).map(|(&k, lvl)| eigs[k] * lvl).sum();
            assert!(sigma.energy() <= e + 1e-14);
        }

        // a pure state relaxes to the ground state
        let pure = diag_state(&[0.0, 1.0], 1.0);
        assert_abs_diff_eq!(passive_state(&pure).energy(), 0.0, epsilon = 1e-15);

        // the maximally mixed state is already passive
        let mixed = diag_state(&[0.5, 0.5], 1.0);
        assert_abs_diff_eq!(ergotropy(&mixed).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn theta_form_examples() {
        assert_abs_diff_eq!(ergotropy_closed_form_single(1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ergotropy_closed_form_single(0.5, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ergotropy_closed_form_single(0.75, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ergotropy_closed_form_single(0.4, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(ergotropy_closed_form_single(1.2, 1.0).is_err());
    }

    #[test]
    fn single_photon_populations_periodic_on_three_chain() {
        // the three-cavity spectrum is commensurate: period pi * sqrt(2)
        let cfg = ChainConfig::uniform_unit(3).unwrap();
        let period = std::f64::consts::PI * 2f64.sqrt();
        for t in [0.3, 1.1, 2.6] {
            let a = battery_state_single_photon(&analytic_propagator(&cfg, t).unwrap(), 1.0)
                .unwrap();
            let b = battery_state_single_photon(
                &analytic_propagator(&cfg, t + period).unwrap(),
                1.0,
            )
            .unwrap();
            assert_abs_diff_eq!(a.populations()[1], b.populations()[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn superposition_form_vanishes_without_transfer() {
        let erg =
            ergotropy_closed_form_superposition(Complex64::new(0.0, 0.0), 0.8, 1.0).unwrap();
        assert_abs_diff_eq!(erg, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn superposition_form_reduces_to_theta_form_at_c1_one() {
        for k in 0..=40 {
            let g = Complex64::new((k as f64 / 40.0).sqrt(), 0.0);
            let a = ergotropy_closed_form_superposition(g, 1.0, 1.0).unwrap();
            let b = ergotropy_closed_form_single(g.norm_sqr(), 1.0).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn superposition_eigenvalues_match_closed_form() {
        let params = SuperpositionParams::new(0.8, 1.3).unwrap();
        let g = Complex64::from_polar(0.77, -0.4);
        let state = superposition_state(g, &params, 1.0).unwrap();
        let mut eigs = state.eigenvalues();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let c1sq = params.c1() * params.c1();
        let g2 = g.norm_sqr();
        let disc = (1.0 - 4.0 * c1sq * c1sq * g2 * (1.0 - g2)).sqrt();
        assert_abs_diff_eq!(eigs[0], 0.5 * (1.0 + disc), epsilon = 1e-13);
        assert_abs_diff_eq!(eigs[1], 0.5 * (1.0 - disc), epsilon = 1e-13);
    }

    #[test]
    fn closed_forms_match_engine() {
        let cfg = ChainConfig::uniform_unit(6).unwrap();
        let params = SuperpositionParams::new(0.6, 2.1).unwrap();
        for t in [0.5, 1.7, 4.0, 9.3] {
            let u = analytic_propagator(&cfg, t).unwrap();
            let g = u.battery_from_charger();

            let engine = ergotropy(&battery_state_single_photon(&u, 1.0).unwrap()).unwrap();
            let formula = ergotropy_closed_form_single(g.norm_sqr(), 1.0).unwrap();
            assert_abs_diff_eq!(engine, formula, epsilon = 1e-12);

            let engine =
                ergotropy(&battery_state_superposition(&u, &params, 1.0).unwrap()).unwrap();
            let formula = ergotropy_closed_form_superposition(g, params.c1(), 1.0).unwrap();
            assert_abs_diff_eq!(engine, formula, epsilon = 1e-12);
        }
    }

    #[test]
    fn ergotropy_is_phase_invariant() {
        let cfg = ChainConfig::uniform_unit(8).unwrap();
        let u = analytic_propagator(&cfg, 3.1).unwrap();
        let phases = [
            0.0,
            std::f64::consts::PI / 3.0,
            std::f64::consts::PI,
            1.5 * std::f64::consts::PI,
        ];
        let reference = {
            let params = SuperpositionParams::new(0.9, phases[0]).unwrap();
            let state = battery_state_superposition(&u, &params, 1.0).unwrap();
            (energy(&state), ergotropy(&state).unwrap())
        };
        for phi in phases {
            let params = SuperpositionParams::new(0.9, phi).unwrap();
            let state = battery_state_superposition(&u, &params, 1.0).unwrap();
            assert_abs_diff_eq!(energy(&state), reference.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ergotropy(&state).unwrap(), reference.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn three_level_eigenvalues_with_coherences() {
        // compare the trigonometric solver against a hand-checkable matrix:
        // rho = (1/3) I + c (|0><1| + |1><0|) has eigenvalues 1/3, 1/3 +- c
        let c = 0.21;
        let mut rho = Array2::from_elem((3, 3), Complex64::new(0.0, 0.0));
        for i in 0..3 {
            rho[[i, i]] = Complex64::new(1.0 / 3.0, 0.0);
        }
        rho[[0, 1]] = Complex64::new(c, 0.0);
        rho[[1, 0]] = Complex64::new(c, 0.0);
        let state = BatteryState::new(rho, vec![0.0, 1.0, 2.0]).unwrap();
        let mut eigs = state.eigenvalues();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(eigs[0], 1.0 / 3.0 - c, epsilon = 1e-13);
        assert_abs_diff_eq!(eigs[1], 1.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eigs[2], 1.0 / 3.0 + c, epsilon = 1e-13);
    }

    #[test]
    fn rejects_invalid_states() {
        // trace off
        let mut rho = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
        rho[[0, 0]] = Complex64::new(0.7, 0.0);
        rho[[1, 1]] = Complex64::new(0.7, 0.0);
        assert!(BatteryState::new(rho, vec![0.0, 1.0]).is_err());

        // not Hermitian
        let mut rho = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
        rho[[0, 0]] = Complex64::new(0.5, 0.0);
        rho[[1, 1]] = Complex64::new(0.5, 0.0);
        rho[[0, 1]] = Complex64::new(0.3, 0.0);
        rho[[1, 0]] = Complex64::new(-0.3, 0.0);
        assert!(BatteryState::new(rho, vec![0.0, 1.0]).is_err());

        // negative eigenvalue
        let mut rho = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
        rho[[0, 0]] = Complex64::new(1.2, 0.0);
        rho[[1, 1]] = Complex64::new(-0.2, 0.0);
        assert!(BatteryState::new(rho, vec![0.0, 1.0]).is_err());
    }
}
