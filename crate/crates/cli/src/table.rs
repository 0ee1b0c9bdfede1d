//! Column tables and their CSV/JSON serialization.
//!
//! CSV files carry one header row and data rows only, with floats printed to
//! 17 significant digits so they round-trip losslessly; the parameters that
//! produced a CSV go into a `<file>.meta.json` sidecar. JSON files embed the
//! same metadata inline under `"meta"` next to a `"data"` block of column
//! arrays.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub enum Column {
    Int { name: String, data: Vec<i64> },
    Float { name: String, data: Vec<f64> },
    /// Optional floats; absent values print as `nan` in CSV and `null` in
    /// JSON.
    OptFloat { name: String, data: Vec<Option<f64>> },
}

impl Column {
    pub fn int(name: &str, data: Vec<i64>) -> Self {
        Column::Int { name: name.to_string(), data }
    }

    pub fn float(name: &str, data: Vec<f64>) -> Self {
        Column::Float { name: name.to_string(), data }
    }

    pub fn opt_float(name: &str, data: Vec<Option<f64>>) -> Self {
        Column::OptFloat { name: name.to_string(), data }
    }

    fn name(&self) -> &str {
        match self {
            Column::Int { name, .. } | Column::Float { name, .. } | Column::OptFloat { name, .. } => name,
        }
    }

    fn len(&self) -> usize {
        match self {
            Column::Int { data, .. } => data.len(),
            Column::Float { data, .. } => data.len(),
            Column::OptFloat { data, .. } => data.len(),
        }
    }

    fn csv_cell(&self, row: usize) -> String {
        match self {
            Column::Int { data, .. } => data[row].to_string(),
            Column::Float { data, .. } => format_f64(data[row]),
            Column::OptFloat { data, .. } => match data[row] {
                Some(x) => format_f64(x),
                None => "nan".to_string(),
            },
        }
    }

    fn json_values(&self) -> serde_json::Value {
        match self {
            Column::Int { data, .. } => serde_json::json!(data),
            Column::Float { data, .. } => serde_json::json!(data),
            Column::OptFloat { data, .. } => serde_json::json!(data),
        }
    }
}

/// 17 significant digits: enough to reproduce any f64 bit pattern exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    columns: Vec<Column>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self, CliError> {
        if columns.is_empty() {
            return Err(CliError::Runtime("table has no columns".to_string()));
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(CliError::Runtime("table columns have unequal lengths".to_string()));
        }
        Ok(Self { columns })
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    fn ensure_nonempty(&self) -> Result<(), CliError> {
        if self.n_rows() == 0 {
            return Err(CliError::Runtime(
                "refusing to write an empty table".to_string(),
            ));
        }
        Ok(())
    }

    fn csv_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(Column::name).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in 0..self.n_rows() {
            let cells: Vec<String> = self.columns.iter().map(|c| c.csv_cell(row)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn json_data(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for c in &self.columns {
            map.insert(c.name().to_string(), c.json_values());
        }
        serde_json::Value::Object(map)
    }
}

/// Write a small text document (single-line JSON reports and the like).
pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes())
}

/// Run provenance attached to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Canonical command line that reproduces this file.
    pub rerun: String,
    pub params: serde_json::Value,
    pub tolerances: TolerancesMeta,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TolerancesMeta {
    pub unitarity: f64,
    pub cross_validation: f64,
    pub zero_ergotropy: f64,
}

impl Default for TolerancesMeta {
    fn default() -> Self {
        Self {
            unitarity: qb_core::tol::UNITARITY,
            cross_validation: qb_core::tol::CROSS_VALIDATION,
            zero_ergotropy: qb_core::tol::ZERO_ERGOTROPY,
        }
    }
}

impl RunMeta {
    pub fn new(command: &str, rerun: String, params: serde_json::Value) -> Self {
        Self {
            artifact: "qbsim",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            rerun,
            params,
            tolerances: TolerancesMeta::default(),
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Runtime(format!("creating {}: {e}", parent.display())))?;
        }
    }
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

/// CSV file plus its `<file>.meta.json` sidecar. Returns the paths written.
pub fn write_csv(table: &Table, meta: &RunMeta, path: &Path) -> Result<Vec<PathBuf>, CliError> {
    table.ensure_nonempty()?;
    write_atomic(path, &table.csv_bytes())?;
    let sidecar = sidecar_path(path);
    let doc = serde_json::json!({ "meta": meta });
    write_atomic(&sidecar, pretty_json(&doc).as_bytes())?;
    Ok(vec![path.to_path_buf(), sidecar])
}

/// Single JSON document with `meta` and `data` blocks.
pub fn write_json(table: &Table, meta: &RunMeta, path: &Path) -> Result<Vec<PathBuf>, CliError> {
    table.ensure_nonempty()?;
    let doc = serde_json::json!({ "meta": meta, "data": table.json_data() });
    write_atomic(path, pretty_json(&doc).as_bytes())?;
    Ok(vec![path.to_path_buf()])
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn pretty_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
