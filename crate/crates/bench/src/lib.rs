//! Desk-scale experiments: success-rate sweeps, phantom reconstruction and
//! theory reports, each driven by a TOML file and reproducible from the
//! `report.json` it writes.

pub mod config;
pub mod mri;
pub mod sweep;
pub mod theory_report;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{MriConfig, SweepConfig, TheoryConfig};
pub use mri::{run_mri, MriReport};
pub use sweep::{run_sweep, SweepResult};
pub use theory_report::{run_theory_report, TheoryOutput};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("rerun differs from the recorded result in: {}", .0.join(", "))]
    Mismatch(Vec<String>),
}

impl BenchError {
    /// 2 for configuration problems, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Solver(_) => 3,
            BenchError::Io(_) | BenchError::Mismatch(_) => 1,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> BenchError {
    BenchError::Io(format!("{}: {e}", path.display()))
}

/// Named output files held in memory, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), BenchError> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        }
        Ok(())
    }

    /// Names of files whose bytes differ from (or are missing in) `dir`.
    pub fn diff_against(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|(name, bytes)| std::fs::read(dir.join(name)).map_or(true, |disk| &disk != bytes))
            .map(|(name, _)| name.clone())
            .collect()
    }
}

/// One step of the SplitMix64 sequence, used to derive independent seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `tag` under `base`.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(base) ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Envelope written as `report.json`; `config` is enough to regenerate
/// every artifact.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Sweep { config: SweepConfig, result: SweepResult },
    Mri { config: MriConfig, result: MriReport },
}

/// The part of [`Report`] needed to regenerate it.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RecordedConfig {
    Sweep { config: SweepConfig },
    Mri { config: MriConfig },
}

pub const REPORT_FILE: &str = "report.json";

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports are always serializable");
    bytes.push(b'\n');
    bytes
}

/// Regenerates the artifacts recorded next to `result_file` from the
/// config embedded in it and checks them byte for byte. When `out` is given
/// the regenerated files are also written there.
pub fn rerun(result_file: &Path, out: Option<&Path>) -> Result<Artifacts, BenchError> {
    let text = std::fs::read(result_file).map_err(|e| io_err(result_file, e))?;
    let recorded: RecordedConfig = serde_json::from_slice(&text)
        .map_err(|e| BenchError::Config(format!("{}: {e}", result_file.display())))?;
    let artifacts = match recorded {
        RecordedConfig::Sweep { config } => sweep::sweep_artifacts(&config)?,
        RecordedConfig::Mri { config } => mri::mri_artifacts(&config)?,
    };
    if let Some(dir) = out {
        artifacts.write_to(dir)?;
    }
    let dir: PathBuf = result_file.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut differing = artifacts.diff_against(&dir);
    if artifacts.get(REPORT_FILE) != Some(text.as_slice()) && !differing.iter().any(|n| n == REPORT_FILE) {
        differing.push(REPORT_FILE.to_string());
    }
    if differing.is_empty() {
        Ok(artifacts)
    } else {
        Err(BenchError::Mismatch(differing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(BenchError::Config("x".into()).exit_code(), 2);
        assert_eq!(BenchError::Solver("x".into()).exit_code(), 3);
        assert_eq!(BenchError::Mismatch(vec!["a".into()]).exit_code(), 1);
    }

    #[test]
    fn derived_seeds_differ_by_tag_and_base() {
        assert_ne!(derive_seed(1, 2), derive_seed(1, 3));
        assert_ne!(derive_seed(1, 2), derive_seed(2, 2));
        assert_eq!(derive_seed(7, 9), derive_seed(7, 9));
    }
}
