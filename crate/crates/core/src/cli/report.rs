use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Invariant {
    pub name: String,
    /// Largest residual observed; `None` when nothing was measured.
    pub value: Option<f64>,
    pub tol: f64,
    pub samples: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Invariant {
    /// Passes iff every sample was measured and the worst is within `tol`.
    pub fn max_below(name: &str, values: &[f64], failures: usize, tol: f64) -> Invariant {
        let worst = values.iter().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
        let pass = failures == 0 && !values.is_empty() && worst.is_some_and(|w| w <= tol);
        let note = (failures > 0).then(|| format!("{failures} sample(s) failed to evaluate"));
        Invariant { name: name.into(), value: worst, tol, samples: values.len(), pass, note }
    }

    pub fn min_above(name: &str, value: f64, tol: f64) -> Invariant {
        Invariant { name: name.into(), value: Some(value), tol, samples: 1, pass: value >= tol, note: None }
    }

    pub fn skipped(name: &str, why: impl Into<String>) -> Invariant {
        Invariant { name: name.into(), value: None, tol: 0.0, samples: 0, pass: true, note: Some(why.into()) }
    }

    pub fn failed(name: &str, why: impl Into<String>) -> Invariant {
        Invariant { name: name.into(), value: None, tol: 0.0, samples: 0, pass: false, note: Some(why.into()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub config_hash: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub invariants: Vec<Invariant>,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    pub pass: bool,
}

impl Report {
    pub fn finish(&mut self) {
        self.pass = self.invariants.iter().all(|i| i.pass);
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_report(dir: &Path, report: &Report) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    write_file(dir, &format!("{}.json", report.command), &(text + "\n"))
}
