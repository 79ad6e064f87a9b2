//! Run manifests and output-file helpers.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::Config;
use crate::emission_rate::QuadratureSettings;
use crate::error::Result;
use crate::units::UnitConstants;
use crate::volkov::FloquetSettings;

/// Settings of one run. Wall-clock data live in a separate timing file so
/// that result files are byte-identical between runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub tool_version: String,
    pub units: UnitConstants,
    pub floquet: FloquetSettings,
    pub quadrature: QuadratureSettings,
    pub channels: Vec<i32>,
    /// How the normalised rate column is defined.
    pub normalization: &'static str,
    /// Name of the timing file written next to the outputs.
    pub timing_file: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config) -> Self {
        RunManifest {
            command: command.to_string(),
            config_hash: config_hash(config),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            units: UnitConstants::default(),
            floquet: config.floquet,
            quadrature: config.quadrature,
            channels: config.channels.clone(),
            normalization: "rate_normalized = rate / max(rate) over the whole grid",
            timing_file: format!("{command}.timing.json"),
        }
    }

    /// Line written at the top of every CSV output.
    pub fn csv_header_comment(&self) -> String {
        format!("# felpair {} {} config_sha256={}\n", self.tool_version, self.command, self.config_hash)
    }
}

pub fn config_hash(config: &Config) -> String {
    let digest = Sha256::digest(config.canonical_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Start/finish times and worker count of a run.
#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub config_hash: String,
    pub workers: usize,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Output directory for one command.
#[derive(Clone, Debug)]
pub struct OutputDir {
    pub root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let p = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&p, text)?;
        Ok(p)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let p = self.path(name);
        fs::write(&p, text)?;
        Ok(p)
    }
}

/// Fixed-width scientific format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}
