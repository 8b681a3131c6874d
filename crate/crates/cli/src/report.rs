//! Run reports: a deterministic body (scenario, command, seed, versions,
//! results) plus wall time kept outside the body so identical runs produce
//! byte-identical bodies.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub body: ReportBody,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: u32,
    pub scenario: String,
    pub command: String,
    pub seed: u64,
    pub versions: Versions,
    pub results: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub redukit_core: String,
    pub redukit_cli: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            redukit_core: env!("CARGO_PKG_VERSION").to_string(),
            redukit_cli: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

impl Report {
    pub fn new(scenario: &str, command: &str, seed: u64, results: serde_json::Value) -> Self {
        Report {
            body: ReportBody {
                schema_version: crate::scenario::SCHEMA_VERSION,
                scenario: scenario.to_string(),
                command: command.to_string(),
                seed,
                versions: Versions::current(),
                results,
            },
            wall_time_ms: 0.0,
        }
    }

    /// Serialized body alone; two runs with the same seed must agree on it
    /// byte for byte.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report body serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, text)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        serde_json::from_str(&text).map_err(|e| e.to_string())
    }
}

/// Row-major flattening for report embedding.
pub fn mat_to_json(m: &redukit_core::Mat) -> serde_json::Value {
    serde_json::json!({
        "rows": m.nrows(),
        "cols": m.ncols(),
        "entries": m.transpose().as_slice().to_vec(),
    })
}

pub fn vec_to_json(v: &redukit_core::Vector) -> serde_json::Value {
    serde_json::json!(v.as_slice().to_vec())
}
