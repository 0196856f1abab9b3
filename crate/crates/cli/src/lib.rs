//! Library half of the `weylconn` binary: scenario loading, commands and reports.

pub mod commands;
pub mod report;
pub mod scenario_file;

use std::path::Path;

use thiserror::Error;
use weylconn_core::scenarios::{builtin, BUILTIN_NAMES};
use weylconn_core::{Error as CoreError, Scenario};

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: unreadable or malformed scenario, bad flags, out-of-domain points.
    #[error("input error: {0}")]
    Input(String),
    /// A numerical procedure failed outright.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_)
            | CoreError::Scope(_)
            | CoreError::Dimension { .. }
            | CoreError::Invalid(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

/// Comma-separated reals, e.g. `0,1.5,-2`.
pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|e| format!("{t:?} is not a real number: {e}"))
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(format!("{t:?} is not finite"))
                    }
                })
        })
        .collect()
}

/// `name=value` parameter override.
pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected k=v, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("parameter {k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Resolve a built-in name or a path to a JSON scenario file.
pub fn load_scenario(
    name_or_path: &str,
    overrides: &[(String, f64)],
) -> Result<Scenario, CliError> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        return builtin(name_or_path, overrides).map_err(|e| CliError::Input(e.to_string()));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "{name_or_path:?} is neither a built-in scenario ({}) nor an existing file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    let file = scenario_file::ScenarioFile::read(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("custom");
    file.build(overrides, stem)
}

pub fn bindings_of(sc: &Scenario) -> Vec<report::Binding> {
    sc.bindings
        .iter()
        .map(|(name, value)| report::Binding {
            name: name.to_string(),
            value,
        })
        .collect()
}
