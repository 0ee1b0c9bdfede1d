//! Preset datasets. Each preset pins every parameter and writes one or more
//! CSV files (plus metadata sidecars) with fixed names into the output
//! directory, so two runs of the same preset are byte-identical.

use std::path::{Path, PathBuf};

use serde_json::json;

use qb_core::{
    coarse_step, scan_n, time_series, ChainConfig, Charger, ChargerTemplate, Grid, ProfileKind,
    ScanParams, ScanSummary, TauRule, WMode, WindowRule,
};

use crate::commands::scan_table;
use crate::error::CliError;
use crate::table::{write_csv, Column, RunMeta, Table};

pub fn cmd_figure(which: u8, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    match which {
        2 => figure2(dir),
        3 => figure3(dir),
        4 => figure4(dir),
        5 => figure5(dir),
        6 => figure6(dir),
        other => Err(CliError::Usage(format!("no preset dataset {other}"))),
    }
}

fn meta(which: u8, params: serde_json::Value) -> RunMeta {
    RunMeta::new("figure", format!("qbsim figure {which}"), params)
}

/// Long-format time series over several lengths.
fn series_long(
    lengths: &[usize],
    profile: ProfileKind,
    charger_for: impl Fn(usize) -> Result<Charger, CliError>,
    w_mode: WMode,
    t_max: f64,
    dt_for: impl Fn(&ChainConfig) -> f64,
) -> Result<Table, CliError> {
    let mut ns = Vec::new();
    let mut jt = Vec::new();
    let mut e = Vec::new();
    let mut erg = Vec::new();
    let mut p = Vec::new();
    for &n in lengths {
        let config = ChainConfig::new(n, 1.0, 1.0, profile.to_profile())?;
        let grid = Grid::new(t_max, dt_for(&config))?;
        let series = time_series(&config, &charger_for(n)?, &grid, w_mode)?;
        ns.extend(std::iter::repeat_n(n as i64, series.len()));
        jt.extend_from_slice(series.jt());
        e.extend_from_slice(series.e());
        erg.extend_from_slice(series.erg());
        p.extend_from_slice(series.p());
    }
    Table::new(vec![
        Column::int("n", ns),
        Column::float("jt", jt),
        Column::float("e_over_omega", e),
        Column::float("erg_over_omega", erg),
        Column::float("p_over_omega_j", p),
    ])
}

/// Energy, ergotropy and power versus time for the single-photon scenario on
/// the uniform chain, lengths 3, 15 and 30.
fn figure2(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let table = series_long(
        &[3, 15, 30],
        ProfileKind::Uniform,
        |_| Ok(Charger::SinglePhoton),
        WMode::Exact,
        20.0,
        |_| 0.01,
    )?;
    let m = meta(
        2,
        json!({
            "figure": 2,
            "scenario": "single",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "lengths": [3, 15, 30],
            "t_max": 20.0,
            "dt": 0.01,
        }),
    );
    write_csv(&table, &m, &dir.join("figure2.csv"))
}

/// Energy and ergotropy at the maximum-power time versus chain length,
/// single photon, uniform couplings.
fn figure3(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let params = ScanParams::baseline();
    let rows = scan_n(&params, 3..=50)?;
    let table = Table::new(vec![
        Column::int("n", rows.iter().map(|s| s.n as i64).collect()),
        Column::float("tau_bar", rows.iter().map(|s| s.tau_bar).collect()),
        Column::float("e_over_omega", rows.iter().map(|s| s.e_at_tau).collect()),
        Column::float("erg_over_omega", rows.iter().map(|s| s.erg_at_tau).collect()),
    ])?;
    let m = meta(
        3,
        json!({
            "figure": 3,
            "scenario": "single",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "n_min": 3,
            "n_max": 50,
            "rule": TauRule::GlobalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    write_csv(&table, &m, &dir.join("figure3.csv"))
}

fn scan_rows_for_betas(betas: &[f64], n_max: usize) -> Result<Vec<(f64, Vec<ScanSummary>)>, CliError> {
    betas
        .iter()
        .map(|&beta| {
            let params = ScanParams {
                charger: ChargerTemplate::Superposition { beta, phi: 0.0 },
                ..ScanParams::baseline()
            };
            Ok((beta, scan_n(&params, 3..=n_max)?))
        })
        .collect()
}

fn beta_scan_table(blocks: &[(f64, Vec<ScanSummary>)]) -> Result<Table, CliError> {
    let mut beta_col = Vec::new();
    let mut n = Vec::new();
    let mut tau = Vec::new();
    let mut e = Vec::new();
    let mut erg = Vec::new();
    let mut ratio = Vec::new();
    for (beta, rows) in blocks {
        for s in rows {
            beta_col.push(*beta);
            n.push(s.n as i64);
            tau.push(s.tau_bar);
            e.push(s.e_at_tau);
            erg.push(s.erg_at_tau);
            ratio.push(s.ratio);
        }
    }
    Table::new(vec![
        Column::float("beta", beta_col),
        Column::int("n", n),
        Column::float("tau_bar", tau),
        Column::float("e_at_tau", e),
        Column::float("erg_at_tau", erg),
        Column::float("ratio", ratio),
    ])
}

/// Superposition charger: ratio and ergotropy versus length for a few
/// weights, the small-weight persistence blocks, and ergotropy versus weight
/// at fixed lengths.
fn figure4(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();

    let blocks = scan_rows_for_betas(&[0.0, 0.5, 1.0], 50)?;
    let table = beta_scan_table(&blocks)?;
    let m = meta(
        4,
        json!({
            "figure": 4,
            "panel": "ab",
            "scenario": "superposition",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "betas": [0.0, 0.5, 1.0],
            "phi": 0.0,
            "n_min": 3,
            "n_max": 50,
            "rule": TauRule::GlobalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure4ab.csv"))?);

    let blocks = scan_rows_for_betas(&[0.01, 0.05, 0.1], 50)?;
    let table = beta_scan_table(&blocks)?;
    let m = meta(
        4,
        json!({
            "figure": 4,
            "panel": "c",
            "scenario": "superposition",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "betas": [0.01, 0.05, 0.1],
            "phi": 0.0,
            "n_min": 3,
            "n_max": 50,
            "rule": TauRule::GlobalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure4c.csv"))?);

    // ergotropy versus weight at fixed lengths
    let betas: Vec<f64> = (0..=30).map(|k| k as f64 * 0.05).collect();
    let mut n_col = Vec::new();
    let mut beta_col = Vec::new();
    let mut e = Vec::new();
    let mut erg = Vec::new();
    let mut ratio = Vec::new();
    for &n in &[20usize, 35, 50] {
        let config = ChainConfig::uniform_unit(n)?;
        let rows = qb_core::beta_sweep(&config, &betas, 0.0, TauRule::GlobalMax)?;
        for r in rows {
            n_col.push(n as i64);
            beta_col.push(r.beta);
            e.push(r.e_at_tau);
            erg.push(r.erg_at_tau);
            ratio.push(r.ratio);
        }
    }
    let table = Table::new(vec![
        Column::int("n", n_col),
        Column::float("beta", beta_col),
        Column::float("e_at_tau", e),
        Column::float("erg_at_tau", erg),
        Column::float("ratio", ratio),
    ])?;
    let m = meta(
        4,
        json!({
            "figure": 4,
            "panel": "d",
            "scenario": "superposition",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "lengths": [20, 35, 50],
            "phi": 0.0,
            "beta_min": 0.0,
            "beta_max": 1.5,
            "beta_step": 0.05,
            "rule": TauRule::GlobalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure4d.csv"))?);
    Ok(files)
}

/// Entangled charging line: time series for lengths 6 and 8, and the
/// first-peak times of power and ergotropy for lengths 6, 8 and 10. The
/// two-photon populations use the unsymmetrized amplitudes here.
fn figure5(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();

    for (panel, n, name) in [("a", 6usize, "figure5a.csv"), ("b", 8, "figure5b.csv")] {
        let config = ChainConfig::uniform_unit(n)?;
        let charger = Charger::WLine(qb_core::WLineParams::w_state(n)?);
        let grid = Grid::new(20.0, 0.01)?;
        let series = time_series(&config, &charger, &grid, WMode::Unsymmetrized)?;
        let table = crate::commands::series_table(&series)?;
        let m = meta(
            5,
            json!({
                "figure": 5,
                "panel": panel,
                "scenario": "w",
                "profile": "uniform",
                "omega": 1.0,
                "j": 1.0,
                "n": n,
                "w_mode": WMode::Unsymmetrized.label(),
                "t_max": 20.0,
                "dt": 0.01,
            }),
        );
        files.extend(write_csv(&table, &m, &dir.join(name))?);
    }

    let mut rows = Vec::new();
    for n in [6usize, 8, 10] {
        let params = ScanParams {
            charger: ChargerTemplate::WState,
            rule: TauRule::FirstLocalMax,
            w_mode: WMode::Unsymmetrized,
            ..ScanParams::baseline()
        };
        rows.extend(scan_n(&params, n..=n)?);
    }
    let table = Table::new(vec![
        Column::int("n", rows.iter().map(|s| s.n as i64).collect()),
        Column::float("tau_bar", rows.iter().map(|s| s.tau_bar).collect()),
        Column::opt_float("tau_erg", rows.iter().map(|s| s.tau_erg).collect()),
    ])?;
    let m = meta(
        5,
        json!({
            "figure": 5,
            "panel": "c",
            "scenario": "w",
            "profile": "uniform",
            "omega": 1.0,
            "j": 1.0,
            "lengths": [6, 8, 10],
            "w_mode": WMode::Unsymmetrized.label(),
            "rule": TauRule::FirstLocalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure5c.csv"))?);
    Ok(files)
}

/// Parabolic couplings: ergotropy/energy ratio at the maximum-power time
/// versus length, plus time-series insets for lengths 3, 15 and 30.
fn figure6(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();

    let params = ScanParams {
        profile: ProfileKind::Parabolic,
        ..ScanParams::baseline()
    };
    let rows = scan_n(&params, 3..=30)?;
    let table = scan_table(&rows)?;
    let m = meta(
        6,
        json!({
            "figure": 6,
            "panel": "main",
            "scenario": "single",
            "profile": "parabolic",
            "omega": 1.0,
            "j": 1.0,
            "n_min": 3,
            "n_max": 30,
            "rule": TauRule::GlobalMax.label(),
            "window": WindowRule::Auto.label(),
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure6.csv"))?);

    let table = series_long(
        &[3, 15, 30],
        ProfileKind::Parabolic,
        |_| Ok(Charger::SinglePhoton),
        WMode::Exact,
        5.0,
        coarse_step,
    )?;
    let m = meta(
        6,
        json!({
            "figure": 6,
            "panel": "insets",
            "scenario": "single",
            "profile": "parabolic",
            "omega": 1.0,
            "j": 1.0,
            "lengths": [3, 15, 30],
            "t_max": 5.0,
            "dt": "coarse step per length",
        }),
    );
    files.extend(write_csv(&table, &m, &dir.join("figure6_insets.csv"))?);
    Ok(files)
}
