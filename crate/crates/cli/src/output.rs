// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic output plumbing: canonical scenario hashing, CSV writers
//! and the per-run JSON record.
//!
//! Every CSV starts with a `#` metadata line carrying the scenario hash and
//! tool version, then a header row. Floats are printed with the shortest
//! representation that round-trips, so identical inputs give byte-identical
//! files. Timestamps live only in the run record.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use entsim::dynamics::EvolutionStats;

use crate::error::{CliError, Result};
use crate::scenario::RateMeta;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hash of the canonicalized scenario: the TOML tree is rewritten as JSON
/// with keys sorted recursively, serialized compactly and digested with
/// SHA-256. Whitespace and key order in the source file do not matter;
/// comments do not survive parsing, so they do not matter either.
pub fn scenario_hash(value: &toml::Value) -> String {
    let canon = canonical_json(value);
    let mut text = Vec::new();
    write_canonical(&canon, &mut text);
    let mut hasher = Sha256::new();
    hasher.update(&text);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

fn canonical_json(value: &toml::Value) -> serde_json::Value {
    match value {
        toml::Value::String(s) => serde_json::Value::String(s.clone()),
        toml::Value::Integer(i) => serde_json::Value::from(*i),
        toml::Value::Float(f) => serde_json::Value::String(format!("f{f}")),
        toml::Value::Boolean(b) => serde_json::Value::Bool(*b),
        toml::Value::Datetime(d) => serde_json::Value::String(d.to_string()),
        toml::Value::Array(items) => {
            serde_json::Value::Array(items.iter().map(canonical_json).collect())
        }
        toml::Value::Table(table) => {
            let mut keys: Vec<&String> = table.keys().collect();
            keys.sort();
            let mut map = serde_json::Map::new();
            for k in keys {
                map.insert(k.clone(), canonical_json(&table[k]));
            }
            serde_json::Value::Object(map)
        }
    }
}

/// Serialize without relying on map iteration order of the JSON crate.
fn write_canonical(value: &serde_json::Value, out: &mut Vec<u8>) {
    match value {
        serde_json::Value::Object(map) => {
            out.push(b'{');
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (idx, k) in keys.iter().enumerate() {
                if idx > 0 {
                    out.push(b',');
                }
                out.extend_from_slice(
                    serde_json::to_string(k).expect("string").as_bytes(),
                );
                out.push(b':');
                write_canonical(&map[*k], out);
            }
            out.push(b'}');
        }
        serde_json::Value::Array(items) => {
            out.push(b'[');
            for (idx, item) in items.iter().enumerate() {
                if idx > 0 {
                    out.push(b',');
                }
                write_canonical(item, out);
            }
            out.push(b']');
        }
        other => out
            .extend_from_slice(serde_json::to_string(other).expect("scalar").as_bytes()),
    }
}

/// Shortest decimal form that parses back to the same f64.
pub fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else {
        format!("{v}")
    }
}

pub struct CsvWriter {
    path: PathBuf,
    buf: Vec<u8>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, hash: &str, header: &[&str]) -> CsvWriter {
        let mut buf = Vec::new();
        let _ = writeln!(buf, "# scenario_hash={hash} tool_version={TOOL_VERSION}");
        let _ = writeln!(buf, "{}", header.join(","));
        CsvWriter { path: path.to_path_buf(), buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn finish(self) -> Result<PathBuf> {
        fs::write(&self.path, &self.buf)
            .map_err(|e| CliError::Io(format!("{}: {e}", self.path.display())))?;
        Ok(self.path)
    }
}

pub fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Mirror of the integrator statistics for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct StatsRecord {
    pub steps: u64,
    pub rhs_evaluations: u64,
    pub max_trace_drift: f64,
    pub max_herm_drift: f64,
    pub max_renorm_correction: f64,
    pub min_eigenvalue: f64,
    pub unequal_diagonal_rates: bool,
}

impl From<&EvolutionStats> for StatsRecord {
    fn from(s: &EvolutionStats) -> Self {
        StatsRecord {
            steps: s.steps,
            rhs_evaluations: s.rhs_evaluations,
            max_trace_drift: s.max_trace_drift,
            max_herm_drift: s.max_herm_drift,
            max_renorm_correction: s.max_renorm_correction,
            min_eigenvalue: s.min_eigenvalue,
            unequal_diagonal_rates: s.unequal_diagonal_rates,
        }
    }
}

/// One JSON document per invocation describing what ran and what it wrote.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub scenario_name: String,
    pub scenario_hash: String,
    pub tool_version: String,
    pub command: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_meta: Option<RateMeta>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Set when the run aborted partway; outputs list what survived.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
}

impl RunRecord {
    pub fn new(scenario_name: &str, scenario_hash: &str, command: &str) -> RunRecord {
        RunRecord {
            scenario_name: scenario_name.to_owned(),
            scenario_hash: scenario_hash.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            command: command.to_owned(),
            started_unix_ms: now_unix_ms(),
            finished_unix_ms: 0,
            outputs: Vec::new(),
            stats: None,
            rate_meta: None,
            notes: Vec::new(),
            failed: None,
        }
    }

    pub fn write(mut self, out_dir: &Path) -> Result<PathBuf> {
        self.finished_unix_ms = now_unix_ms();
        let path = out_dir.join("run_record.json");
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(&path, text.as_bytes())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}
