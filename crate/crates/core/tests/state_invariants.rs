//! Scenario-level invariants: ergotropy bounds, coherence benefit, and the
//! normalization of the symmetrized two-photon populations.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qb_core::{
    analytic_propagator, battery_state_single_photon, battery_state_superposition,
    battery_state_wstate, beta_sweep, energy, ergotropy, ChainConfig, SuperpositionParams,
    TauRule, WLineParams, WMode,
};

#[test]
fn ergotropy_bounded_by_energy_for_every_scenario() {
    let mut rng = StdRng::seed_from_u64(0xb0111d);
    for _ in 0..300 {
        let n = rng.random_range(3..=25usize);
        let t = rng.random_range(0.0f64..40.0);
        let config = ChainConfig::uniform_unit(n).unwrap();
        let u = analytic_propagator(&config, t).unwrap();

        let mut states = vec![battery_state_single_photon(&u, 1.0).unwrap()];
        let params = SuperpositionParams::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
        .unwrap();
        states.push(battery_state_superposition(&u, &params, 1.0).unwrap());
        let w = WLineParams::w_state(n).unwrap();
        states.push(battery_state_wstate(&u, &w, WMode::Unsymmetrized, 1.0).unwrap());
        states.push(battery_state_wstate(&u, &w, WMode::Exact, 1.0).unwrap());

        for state in &states {
            let e = energy(state);
            let erg = ergotropy(state).unwrap();
            assert!(erg >= 0.0);
            assert!(erg <= e + 1e-12, "ergotropy {erg} above energy {e}");
            assert!(e <= state.levels()[state.dim() - 1] + 1e-9);
        }
    }
}

#[test]
fn exact_mode_populations_normalized_without_subtraction() {
    // p0 recomputed from the explicit pair amplitudes, not via 1 - p1 - p2
    let mut rng = StdRng::seed_from_u64(0x2f0c);
    for _ in 0..60 {
        let n = rng.random_range(3..=20usize);
        let t = rng.random_range(0.0f64..30.0);
        let config = ChainConfig::uniform_unit(n).unwrap();
        let u = analytic_propagator(&config, t).unwrap();
        let params = WLineParams::w_state(n).unwrap();

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
        let mut p0 = 0.0;
        for p in 0..n - 1 {
            p0 += 2.0 * (f[p] * g[p]).norm_sqr();
            for q in (p + 1)..n - 1 {
                p0 += (f[p] * g[q] + f[q] * g[p]).norm_sqr();
            }
        }

        let state = battery_state_wstate(&u, &params, WMode::Exact, 1.0).unwrap();
        let pops = state.populations();
        for (k, &p) in pops.iter().enumerate() {
            assert!(
                (-1e-10..=1.0 + 1e-10).contains(&p),
                "population {k} out of range: {p}"
            );
        }
        assert!((p0 + pops[1] + pops[2] - 1.0).abs() < 1e-10);
        assert!((p0 - pops[0]).abs() < 1e-10);
    }
}

#[test]
fn coherence_benefit_ratio_nondecreasing_in_beta() {
    // at fixed length, more charger coherence never lowers the usable
    // fraction of the stored energy
    let config = ChainConfig::uniform_unit(20).unwrap();
    let betas: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
    let rows = beta_sweep(&config, &betas, 0.0, TauRule::GlobalMax).unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1].ratio >= pair[0].ratio - 1e-12,
            "ratio dropped between beta = {} and beta = {}: {} -> {}",
            pair[0].beta,
            pair[1].beta,
            pair[0].ratio,
            pair[1].ratio
        );
    }
}

#[test]
fn superposition_energy_never_exceeds_single_photon_energy() {
    // the vacuum weight can only reduce what the battery stores
    let config = ChainConfig::uniform_unit(12).unwrap();
    for t in [0.5, 3.0, 8.5, 19.0] {
        let u = analytic_propagator(&config, t).unwrap();
        let single = energy(&battery_state_single_photon(&u, 1.0).unwrap());
        for beta in [0.3, 1.0, 1.8] {
            let params = SuperpositionParams::new(beta, 0.7).unwrap();
            let sup = energy(&battery_state_superposition(&u, &params, 1.0).unwrap());
            assert!(sup <= single + 1e-14);
        }
    }
}
