//! Resolution of effective parameter values: an explicit command-line flag
//! wins, then a key in the `--config` JSON file, then the built-in default
//! already parsed into the clap struct.

use std::path::{Path, PathBuf};

use clap::parser::{ArgMatches, ValueSource};
use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;

pub fn load_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Usage(format!(
            "config {} must hold a JSON object",
            path.display()
        ))),
    }
}

/// Per-subcommand view of the precedence chain. Keys in the config file use
/// the flag names with underscores (`t_max`, `w_mode`, ...); keys that do not
/// belong to the active subcommand are ignored.
pub struct Ctx<'a> {
    sub: &'a ArgMatches,
    file: &'a Map<String, Value>,
}

impl<'a> Ctx<'a> {
    pub fn new(sub: &'a ArgMatches, file: &'a Map<String, Value>) -> Self {
        Self { sub, file }
    }

    fn is_cli(&self, id: &str) -> bool {
        self.sub.value_source(id) == Some(ValueSource::CommandLine)
    }

    pub fn f64(&self, id: &str, cli: f64) -> Result<f64, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::Usage(format!("config key `{id}` must be a number"))),
        }
    }

    pub fn opt_f64(&self, id: &str, cli: Option<f64>) -> Result<Option<f64>, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| CliError::Usage(format!("config key `{id}` must be a number"))),
        }
    }

    pub fn usize(&self, id: &str, cli: usize) -> Result<usize, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| CliError::Usage(format!("config key `{id}` must be a nonnegative integer"))),
        }
    }

    pub fn bool(&self, id: &str, cli: bool) -> Result<bool, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| CliError::Usage(format!("config key `{id}` must be a boolean"))),
        }
    }

    pub fn opt_string(&self, id: &str, cli: Option<String>) -> Result<Option<String>, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| CliError::Usage(format!("config key `{id}` must be a string"))),
        }
    }

    pub fn opt_path(&self, id: &str, cli: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
        Ok(self
            .opt_string(id, cli.map(|p| p.to_string_lossy().into_owned()))?
            .map(PathBuf::from))
    }

    pub fn choice<T: ValueEnum + Copy>(&self, id: &str, cli: T) -> Result<T, CliError> {
        if self.is_cli(id) {
            return Ok(cli);
        }
        match self.file.get(id) {
            None => Ok(cli),
            Some(Value::String(s)) => T::from_str(s, false)
                .map_err(|_| CliError::Usage(format!("config key `{id}`: unknown value `{s}`"))),
            Some(_) => Err(CliError::Usage(format!("config key `{id}` must be a string"))),
        }
    }
}

/// Output directory precedence: `--out-dir` flag, config key, environment,
/// working directory.
pub fn resolve_out_dir(
    top: &ArgMatches,
    flag: Option<PathBuf>,
    file: &Map<String, Value>,
) -> Result<PathBuf, CliError> {
    if top.value_source("out_dir") == Some(ValueSource::CommandLine) {
        return Ok(flag.expect("flag present when sourced from command line"));
    }
    if let Some(v) = file.get("out_dir") {
        return v
            .as_str()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Usage("config key `out_dir` must be a string".to_string()));
    }
    if let Some(dir) = std::env::var_os("QBSIM_OUT_DIR") {
        return Ok(PathBuf::from(dir));
    }
    Ok(PathBuf::from("."))
}

/// Final location of an output file: absolute `--out` wins, relative `--out`
/// lands inside the output directory, otherwise the command's default name.
pub fn dest_path(out: Option<&Path>, default_name: &str, dir: &Path) -> PathBuf {
    match out {
        Some(p) if p.is_absolute() => p.to_path_buf(),
        Some(p) => dir.join(p),
        None => dir.join(default_name),
    }
}
