//! Command-line definitions. Every flag has a documented default, the
//! defaults reproduce the reference working point (`omega / J = 1`, uniform
//! couplings, equal-weight entangled line).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qbsim",
    version,
    about = "Charging a cavity quantum battery through a chain of coupled cavities",
    long_about = "Computes time evolution, stored energy, averaged charging power and \
                  ergotropy of the end cavity of a coupled-cavity chain, for several \
                  initial states and coupling profiles, and writes CSV/JSON tables."
)]
pub struct Cli {
    /// JSON config file whose keys mirror the long flags (underscored);
    /// explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory; defaults to $QBSIM_OUT_DIR, then the working
    /// directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Collective-mode frequencies (and optionally the sine basis) of the
    /// uniform chain
    Spectrum(SpectrumArgs),
    /// Energy, ergotropy and averaged power on a time grid
    Sweep(SweepArgs),
    /// Per-length scan evaluated at the maximum-power time
    Scan(ScanArgs),
    /// Smallest length beyond which no work is extractable at the
    /// maximum-power time
    #[command(name = "critical-n")]
    CriticalN(CriticalNArgs),
    /// Ergotropy at the maximum-power time versus the charger superposition
    /// weight
    #[command(name = "beta-sweep")]
    BetaSweep(BetaSweepArgs),
    /// Preset datasets (2, 3, 4, 5 or 6)
    Figure(FigureArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// One photon in the charger.
    Single,
    /// Charger in a vacuum/one-photon superposition.
    Superposition,
    /// Entangled equal-weight charging line plus one charger photon.
    W,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::Single => "single",
            Scenario::Superposition => "superposition",
            Scenario::W => "w",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileArg {
    Uniform,
    Parabolic,
    Custom,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WModeArg {
    /// Ordered two-photon amplitudes without bosonic symmetrization.
    Unsymmetrized,
    /// Bosonic symmetrized amplitudes (exactly normalized).
    Exact,
}

impl WModeArg {
    pub fn to_core(self) -> qb_core::WMode {
        match self {
            WModeArg::Unsymmetrized => qb_core::WMode::Unsymmetrized,
            WModeArg::Exact => qb_core::WMode::Exact,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleArg {
    /// Largest averaged power in the window.
    GlobalMax,
    /// Earliest interior local power maximum.
    FirstLocalMax,
}

impl RuleArg {
    pub fn to_core(self) -> qb_core::TauRule {
        match self {
            RuleArg::GlobalMax => qb_core::TauRule::GlobalMax,
            RuleArg::FirstLocalMax => qb_core::TauRule::FirstLocalMax,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
}

impl OutFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutFormat::Csv => "csv",
            OutFormat::Json => "json",
        }
    }
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Chain length.
    #[arg(long, default_value_t = 10)]
    pub n: usize,

    /// Cavity frequency (units of the base coupling).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Base coupling strength; its inverse is the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,

    /// Coupling profile (only `uniform` has a closed-form spectrum).
    #[arg(long, value_enum, default_value_t = ProfileArg::Uniform)]
    pub profile: ProfileArg,

    /// Comma-separated bond couplings for --profile custom (n-1 values).
    #[arg(long, value_name = "LIST")]
    pub couplings: Option<String>,

    /// Also emit the sine-basis matrix (JSON format only).
    #[arg(long, default_value_t = false)]
    pub with_basis: bool,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,

    /// Output file name; relative names land in the output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Single)]
    pub scenario: Scenario,

    /// Chain length (charger = site 1, battery = site n).
    #[arg(long, default_value_t = 3)]
    pub n: usize,

    /// Cavity frequency (units of the base coupling).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Base coupling strength; its inverse is the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,

    #[arg(long, value_enum, default_value_t = ProfileArg::Uniform)]
    pub profile: ProfileArg,

    /// Comma-separated bond couplings for --profile custom (n-1 values).
    #[arg(long, value_name = "LIST")]
    pub couplings: Option<String>,

    /// Charger vacuum weight (superposition scenario).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,

    /// Charger superposition phase in [0, 2*pi].
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,

    /// Two-photon population treatment for the w scenario.
    #[arg(long, value_enum, default_value_t = WModeArg::Exact)]
    pub w_mode: WModeArg,

    /// End of the time grid (dimensionless Jt).
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,

    /// Grid step (dimensionless Jt).
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,

    /// Output file name; relative names land in the output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Single)]
    pub scenario: Scenario,

    #[arg(long, default_value_t = 3)]
    pub n_min: usize,

    #[arg(long, default_value_t = 50)]
    pub n_max: usize,

    /// Cavity frequency (units of the base coupling).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Base coupling strength; its inverse is the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,

    /// Coupling profile (`custom` cannot follow a changing length).
    #[arg(long, value_enum, default_value_t = ProfileArg::Uniform)]
    pub profile: ProfileArg,

    /// Charger vacuum weight (superposition scenario).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,

    /// Charger superposition phase in [0, 2*pi].
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,

    /// Two-photon population treatment for the w scenario.
    #[arg(long, value_enum, default_value_t = WModeArg::Exact)]
    pub w_mode: WModeArg,

    /// Which power maximum defines the charging time.
    #[arg(long, value_enum, default_value_t = RuleArg::GlobalMax)]
    pub rule: RuleArg,

    /// Fixed search window; omit for the default max(20, 4n).
    #[arg(long, value_name = "JT")]
    pub t_max: Option<f64>,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,

    /// Output file name; relative names land in the output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CriticalNArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Single)]
    pub scenario: Scenario,

    /// Largest length scanned.
    #[arg(long, default_value_t = 50)]
    pub n_max: usize,

    /// Cavity frequency (units of the base coupling).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Base coupling strength; its inverse is the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,

    #[arg(long, value_enum, default_value_t = ProfileArg::Uniform)]
    pub profile: ProfileArg,

    /// Charger vacuum weight (superposition scenario).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,

    /// Charger superposition phase in [0, 2*pi].
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,

    /// Two-photon population treatment for the w scenario.
    #[arg(long, value_enum, default_value_t = WModeArg::Exact)]
    pub w_mode: WModeArg,

    /// Which power maximum defines the charging time.
    #[arg(long, value_enum, default_value_t = RuleArg::GlobalMax)]
    pub rule: RuleArg,

    /// Output file name; relative names land in the output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BetaSweepArgs {
    /// Chain length.
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    /// Cavity frequency (units of the base coupling).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,

    /// Base coupling strength; its inverse is the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,

    #[arg(long, value_enum, default_value_t = ProfileArg::Uniform)]
    pub profile: ProfileArg,

    /// Comma-separated bond couplings for --profile custom (n-1 values).
    #[arg(long, value_name = "LIST")]
    pub couplings: Option<String>,

    /// Charger superposition phase in [0, 2*pi].
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,

    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,

    #[arg(long, default_value_t = 1.5)]
    pub beta_max: f64,

    #[arg(long, default_value_t = 0.05)]
    pub beta_step: f64,

    /// Which power maximum defines the charging time.
    #[arg(long, value_enum, default_value_t = RuleArg::GlobalMax)]
    pub rule: RuleArg,

    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,

    /// Output file name; relative names land in the output directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// Which preset dataset to produce.
    #[arg(value_parser = clap::value_parser!(u8).range(2..=6))]
    pub which: u8,
}
