//! Execution of the individual subcommands: resolve parameters, run the
//! simulation, shape the result into a table, write it out.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use qb_core::{
    beta_sweep, critical_n, mode_basis, scan_n, time_series, ChainConfig, Charger,
    ChargerTemplate, CouplingProfile, Grid, ProfileKind, ScanParams, ScanSummary,
    SuperpositionParams, TimeSeries, WLineParams, WindowRule,
};

use crate::args::{
    BetaSweepArgs, CriticalNArgs, OutFormat, ProfileArg, RuleArg, ScanArgs, Scenario,
    SpectrumArgs, SweepArgs,
};
use crate::config::{dest_path, Ctx};
use crate::error::CliError;
use crate::table::{write_csv, write_json, Column, RunMeta, Table};

pub(crate) fn parse_couplings(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad coupling value `{tok}`")))
        })
        .collect()
}

fn build_profile(
    profile: ProfileArg,
    couplings: &Option<String>,
) -> Result<CouplingProfile, CliError> {
    match profile {
        ProfileArg::Uniform | ProfileArg::Parabolic => {
            if couplings.is_some() {
                return Err(CliError::Usage(
                    "--couplings only applies to --profile custom".to_string(),
                ));
            }
            Ok(match profile {
                ProfileArg::Uniform => CouplingProfile::Uniform,
                _ => CouplingProfile::Parabolic,
            })
        }
        ProfileArg::Custom => {
            let list = couplings.as_ref().ok_or_else(|| {
                CliError::Usage("--profile custom needs --couplings".to_string())
            })?;
            Ok(CouplingProfile::Custom(parse_couplings(list)?))
        }
    }
}

fn profile_label(profile: ProfileArg) -> &'static str {
    match profile {
        ProfileArg::Uniform => "uniform",
        ProfileArg::Parabolic => "parabolic",
        ProfileArg::Custom => "custom",
    }
}

fn rule_kebab(rule: RuleArg) -> &'static str {
    match rule {
        RuleArg::GlobalMax => "global-max",
        RuleArg::FirstLocalMax => "first-local-max",
    }
}

fn scan_profile_kind(profile: ProfileArg) -> Result<ProfileKind, CliError> {
    match profile {
        ProfileArg::Uniform => Ok(ProfileKind::Uniform),
        ProfileArg::Parabolic => Ok(ProfileKind::Parabolic),
        ProfileArg::Custom => Err(CliError::Usage(
            "per-length scans support uniform and parabolic profiles only".to_string(),
        )),
    }
}

fn build_charger(scenario: Scenario, n: usize, beta: f64, phi: f64) -> Result<Charger, CliError> {
    Ok(match scenario {
        Scenario::Single => Charger::SinglePhoton,
        Scenario::Superposition => Charger::Superposition(SuperpositionParams::new(beta, phi)?),
        Scenario::W => Charger::WLine(WLineParams::w_state(n)?),
    })
}

fn charger_template(scenario: Scenario, beta: f64, phi: f64) -> ChargerTemplate {
    match scenario {
        Scenario::Single => ChargerTemplate::SinglePhoton,
        Scenario::Superposition => ChargerTemplate::Superposition { beta, phi },
        Scenario::W => ChargerTemplate::WState,
    }
}

pub(crate) fn series_table(series: &TimeSeries) -> Result<Table, CliError> {
    Table::new(vec![
        Column::float("jt", series.jt().to_vec()),
        Column::float("e_over_omega", series.e().to_vec()),
        Column::float("erg_over_omega", series.erg().to_vec()),
        Column::float("p_over_omega_j", series.p().to_vec()),
    ])
}

pub(crate) fn scan_table(rows: &[ScanSummary]) -> Result<Table, CliError> {
    Table::new(vec![
        Column::int("n", rows.iter().map(|s| s.n as i64).collect()),
        Column::float("tau_bar", rows.iter().map(|s| s.tau_bar).collect()),
        Column::opt_float("tau_erg", rows.iter().map(|s| s.tau_erg).collect()),
        Column::float("e_at_tau", rows.iter().map(|s| s.e_at_tau).collect()),
        Column::float("erg_at_tau", rows.iter().map(|s| s.erg_at_tau).collect()),
        Column::float("ratio", rows.iter().map(|s| s.ratio).collect()),
    ])
}

fn write_table(
    table: &Table,
    meta: &RunMeta,
    format: OutFormat,
    out: Option<&Path>,
    default_stem: &str,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let default_name = format!("{default_stem}.{}", format.extension());
    let path = dest_path(out, &default_name, dir);
    match format {
        OutFormat::Csv => write_csv(table, meta, &path),
        OutFormat::Json => write_json(table, meta, &path),
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs, ctx: &Ctx, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let n = ctx.usize("n", args.n)?;
    let omega = ctx.f64("omega", args.omega)?;
    let j = ctx.f64("j", args.j)?;
    let profile = ctx.choice("profile", args.profile)?;
    let couplings = ctx.opt_string("couplings", args.couplings.clone())?;
    let with_basis = ctx.bool("with_basis", args.with_basis)?;
    let format = ctx.choice("format", args.format)?;
    let out = ctx.opt_path("out", args.out.clone())?;

    if with_basis && format != OutFormat::Json {
        return Err(CliError::Usage(
            "--with-basis needs --format json".to_string(),
        ));
    }

    let config = ChainConfig::new(n, omega, j, build_profile(profile, &couplings)?)?;
    let basis = mode_basis(&config)?;

    let table = Table::new(vec![
        Column::int("r", (1..=n as i64).collect()),
        Column::float("omega_r", basis.omega_r().to_vec()),
    ])?;
    let params = json!({
        "n": n,
        "omega": omega,
        "j": j,
        "profile": profile_label(profile),
        "with_basis": with_basis,
    });
    let rerun = format!(
        "qbsim spectrum --n {n} --omega {omega} --j {j} --profile {}{} --format {}",
        profile_label(profile),
        if with_basis { " --with-basis" } else { "" },
        format.extension(),
    );
    let meta = RunMeta::new("spectrum", rerun, params);

    if with_basis {
        let path = dest_path(out.as_deref(), "spectrum.json", dir);
        let mut data = table.json_data();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|m| (0..n).map(|p| basis.s()[[m, p]]).collect())
            .collect();
        data.as_object_mut()
            .expect("data block is an object")
            .insert("s".to_string(), json!(rows));
        let doc = json!({ "meta": meta, "data": data });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        crate::table::write_text(&path, &text)?;
        return Ok(vec![path]);
    }
    write_table(&table, &meta, format, out.as_deref(), "spectrum", dir)
}

pub fn cmd_sweep(args: &SweepArgs, ctx: &Ctx, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = ctx.choice("scenario", args.scenario)?;
    let n = ctx.usize("n", args.n)?;
    let omega = ctx.f64("omega", args.omega)?;
    let j = ctx.f64("j", args.j)?;
    let profile = ctx.choice("profile", args.profile)?;
    let couplings = ctx.opt_string("couplings", args.couplings.clone())?;
    let beta = ctx.f64("beta", args.beta)?;
    let phi = ctx.f64("phi", args.phi)?;
    let w_mode = ctx.choice("w_mode", args.w_mode)?;
    let t_max = ctx.f64("t_max", args.t_max)?;
    let dt = ctx.f64("dt", args.dt)?;
    let format = ctx.choice("format", args.format)?;
    let out = ctx.opt_path("out", args.out.clone())?;

    let config = ChainConfig::new(n, omega, j, build_profile(profile, &couplings)?)?;
    let charger = build_charger(scenario, n, beta, phi)?;
    let grid = Grid::new(t_max, dt)?;
    let series = time_series(&config, &charger, &grid, w_mode.to_core())?;

    let table = series_table(&series)?;
    let params = json!({
        "scenario": scenario.label(),
        "n": n,
        "omega": omega,
        "j": j,
        "profile": profile_label(profile),
        "couplings": couplings,
        "beta": beta,
        "phi": phi,
        "w_mode": w_mode.to_core().label(),
        "t_max": t_max,
        "dt": dt,
    });
    let rerun = format!(
        "qbsim sweep --scenario {} --n {n} --omega {omega} --j {j} --profile {}{} --beta {beta} --phi {phi} --w-mode {} --t-max {t_max} --dt {dt} --format {}",
        scenario.label(),
        profile_label(profile),
        couplings
            .as_ref()
            .map(|c| format!(" --couplings {c}"))
            .unwrap_or_default(),
        w_mode.to_core().label(),
        format.extension(),
    );
    let meta = RunMeta::new("sweep", rerun, params);
    write_table(&table, &meta, format, out.as_deref(), "sweep", dir)
}

pub fn cmd_scan(args: &ScanArgs, ctx: &Ctx, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = ctx.choice("scenario", args.scenario)?;
    let n_min = ctx.usize("n_min", args.n_min)?;
    let n_max = ctx.usize("n_max", args.n_max)?;
    let omega = ctx.f64("omega", args.omega)?;
    let j = ctx.f64("j", args.j)?;
    let profile = ctx.choice("profile", args.profile)?;
    let beta = ctx.f64("beta", args.beta)?;
    let phi = ctx.f64("phi", args.phi)?;
    let w_mode = ctx.choice("w_mode", args.w_mode)?;
    let rule = ctx.choice("rule", args.rule)?;
    let t_max = ctx.opt_f64("t_max", args.t_max)?;
    let format = ctx.choice("format", args.format)?;
    let out = ctx.opt_path("out", args.out.clone())?;

    let window = match t_max {
        Some(t) => WindowRule::Fixed(t),
        None => WindowRule::Auto,
    };
    let params_core = ScanParams {
        omega,
        j,
        profile: scan_profile_kind(profile)?,
        charger: charger_template(scenario, beta, phi),
        rule: rule.to_core(),
        w_mode: w_mode.to_core(),
        window,
    };
    let rows = scan_n(&params_core, n_min..=n_max)?;

    let table = scan_table(&rows)?;
    let params = json!({
        "scenario": scenario.label(),
        "n_min": n_min,
        "n_max": n_max,
        "omega": omega,
        "j": j,
        "profile": profile_label(profile),
        "beta": beta,
        "phi": phi,
        "w_mode": w_mode.to_core().label(),
        "rule": rule.to_core().label(),
        "window": window.label(),
    });
    let rerun = format!(
        "qbsim scan --scenario {} --n-min {n_min} --n-max {n_max} --omega {omega} --j {j} --profile {} --beta {beta} --phi {phi} --w-mode {} --rule {}{} --format {}",
        scenario.label(),
        profile_label(profile),
        w_mode.to_core().label(),
        rule_kebab(rule),
        t_max.map(|t| format!(" --t-max {t}")).unwrap_or_default(),
        format.extension(),
    );
    let meta = RunMeta::new("scan", rerun, params);
    write_table(&table, &meta, format, out.as_deref(), "scan", dir)
}

#[derive(Serialize)]
struct CriticalReport {
    n_c: Option<usize>,
    rule: String,
    t_max_rule: String,
    scenario: String,
    n_max: usize,
    omega: f64,
    j: f64,
    profile: String,
    beta: f64,
    phi: f64,
    w_mode: String,
    zero_threshold: f64,
}

pub fn cmd_critical_n(
    args: &CriticalNArgs,
    ctx: &Ctx,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let scenario = ctx.choice("scenario", args.scenario)?;
    let n_max = ctx.usize("n_max", args.n_max)?;
    let omega = ctx.f64("omega", args.omega)?;
    let j = ctx.f64("j", args.j)?;
    let profile = ctx.choice("profile", args.profile)?;
    let beta = ctx.f64("beta", args.beta)?;
    let phi = ctx.f64("phi", args.phi)?;
    let w_mode = ctx.choice("w_mode", args.w_mode)?;
    let rule = ctx.choice("rule", args.rule)?;
    let out = ctx.opt_path("out", args.out.clone())?;

    let params_core = ScanParams {
        omega,
        j,
        profile: scan_profile_kind(profile)?,
        charger: charger_template(scenario, beta, phi),
        rule: rule.to_core(),
        w_mode: w_mode.to_core(),
        window: WindowRule::Auto,
    };
    let (n_c, _rows) = critical_n(&params_core, n_max)?;

    let report = CriticalReport {
        n_c,
        rule: rule.to_core().label().to_string(),
        t_max_rule: WindowRule::Auto.label(),
        scenario: scenario.label().to_string(),
        n_max,
        omega,
        j,
        profile: profile_label(profile).to_string(),
        beta,
        phi,
        w_mode: w_mode.to_core().label().to_string(),
        zero_threshold: qb_core::tol::ZERO_ERGOTROPY,
    };
    let line = serde_json::to_string(&report).expect("serializable");
    println!("{line}");

    let path = dest_path(out.as_deref(), "critical_n.json", dir);
    crate::table::write_text(&path, &format!("{line}\n"))?;
    Ok(vec![path])
}

pub fn cmd_beta_sweep(
    args: &BetaSweepArgs,
    ctx: &Ctx,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let n = ctx.usize("n", args.n)?;
    let omega = ctx.f64("omega", args.omega)?;
    let j = ctx.f64("j", args.j)?;
    let profile = ctx.choice("profile", args.profile)?;
    let couplings = ctx.opt_string("couplings", args.couplings.clone())?;
    let phi = ctx.f64("phi", args.phi)?;
    let beta_min = ctx.f64("beta_min", args.beta_min)?;
    let beta_max = ctx.f64("beta_max", args.beta_max)?;
    let beta_step = ctx.f64("beta_step", args.beta_step)?;
    let rule = ctx.choice("rule", args.rule)?;
    let format = ctx.choice("format", args.format)?;
    let out = ctx.opt_path("out", args.out.clone())?;

    if !beta_step.is_finite() || beta_step <= 0.0 || beta_max < beta_min || beta_min < 0.0 {
        return Err(CliError::Usage(format!(
            "need 0 <= beta_min <= beta_max and beta_step > 0, got [{beta_min}, {beta_max}] step {beta_step}"
        )));
    }
    let count = ((beta_max - beta_min) / beta_step + 1e-9).floor() as usize + 1;
    let betas: Vec<f64> = (0..count).map(|k| beta_min + k as f64 * beta_step).collect();

    let config = ChainConfig::new(n, omega, j, build_profile(profile, &couplings)?)?;
    let rows = beta_sweep(&config, &betas, phi, rule.to_core())?;

    let table = Table::new(vec![
        Column::float("beta", rows.iter().map(|r| r.beta).collect()),
        Column::float("erg_at_tau", rows.iter().map(|r| r.erg_at_tau).collect()),
        Column::float("e_at_tau", rows.iter().map(|r| r.e_at_tau).collect()),
        Column::float("ratio", rows.iter().map(|r| r.ratio).collect()),
    ])?;
    let params = json!({
        "n": n,
        "omega": omega,
        "j": j,
        "profile": profile_label(profile),
        "couplings": couplings,
        "phi": phi,
        "beta_min": beta_min,
        "beta_max": beta_max,
        "beta_step": beta_step,
        "rule": rule.to_core().label(),
        "window": WindowRule::Auto.label(),
    });
    let rerun = format!(
        "qbsim beta-sweep --n {n} --omega {omega} --j {j} --profile {}{} --phi {phi} --beta-min {beta_min} --beta-max {beta_max} --beta-step {beta_step} --rule {} --format {}",
        profile_label(profile),
        couplings
            .as_ref()
            .map(|c| format!(" --couplings {c}"))
            .unwrap_or_default(),
        rule_kebab(rule),
        format.extension(),
    );
    let meta = RunMeta::new("beta-sweep", rerun, params);
    write_table(&table, &meta, format, out.as_deref(), "beta_sweep", dir)
}
