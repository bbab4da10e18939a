//! Run manifests: what was run, on which inputs, producing which bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::json::{read_file, sha256_hex, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// The command-line flag the path was given with.
    pub flag: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand path, e.g. `gen sierpinski`.
    pub command: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
    /// Every parameter after defaults were applied.
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<RunManifest, FormatError> {
        let text = read_file(path)?;
        serde_json::from_str(&text)
            .map_err(|e| FormatError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    }

    /// Arguments with every output path moved into `dir` (same file names).
    pub fn redirected_args(&self, dir: &Path) -> Vec<String> {
        let mut args = self.args.clone();
        for out in &self.outputs {
            let name = Path::new(&out.path).file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&out.path));
            let target = dir.join(name).to_string_lossy().into_owned();
            for i in 0..args.len() {
                if args[i] == out.flag && i + 1 < args.len() && args[i + 1] == out.path {
                    args[i + 1] = target.clone();
                } else if args[i] == format!("{}={}", out.flag, out.path) {
                    args[i] = format!("{}={}", out.flag, target);
                }
            }
        }
        args
    }
}

pub fn digest_file(flag: &str, path: &Path) -> Result<FileDigest, FormatError> {
    let bytes = std::fs::read(path).map_err(|source| FormatError::Io { path: path.into(), source })?;
    Ok(FileDigest { flag: flag.into(), path: path.to_string_lossy().into_owned(), sha256: sha256_hex(&bytes) })
}

/// Per-output comparison of a replay against the recorded digests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub inputs_unchanged: bool,
    /// (flag, recorded path, replayed path, identical)
    pub outputs: Vec<(String, String, String, bool)>,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.outputs.iter().all(|o| o.3)
    }
}
