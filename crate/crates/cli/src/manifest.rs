//! Run manifests: written before the computation starts, finalized at exit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::settings::Settings;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Version of the code that produced the artifacts.
    pub version: String,
    pub status: RunStatus,
    /// Name of the error for failed runs.
    pub error: Option<String>,
    pub config_file: Option<PathBuf>,
    /// Every resolved setting, including defaults.
    pub config: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: Option<f64>,
    pub steps: Option<usize>,
}

/// Manifest path for a primary output `dir/name.ext`: `dir/name.manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    sibling(primary, "manifest.json")
}

/// `dir/stem.<suffix>` for a primary output `dir/stem.ext`.
pub fn sibling(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary.file_stem().map_or_else(|| "output".into(), |s| s.to_string_lossy().into_owned());
    primary.with_file_name(format!("{stem}.{suffix}"))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("output records serialize");
    text.push('\n');
    write_text(path, &text)
}

/// A manifest in progress plus the bookkeeping to finalize it.
pub struct Run {
    pub manifest: RunManifest,
    path: PathBuf,
    started: Instant,
}

impl Run {
    /// Write the manifest (status `running`) next to `primary`.
    pub fn start(command: &str, settings: &Settings, primary: &Path) -> Result<Self, CliError> {
        Self::start_at(command, settings, manifest_path(primary))
    }

    pub fn start_at(command: &str, settings: &Settings, path: PathBuf) -> Result<Self, CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: RunStatus::Running,
            error: None,
            config_file: settings.file().map(Path::to_path_buf),
            config: settings.echo().clone(),
            outputs: Vec::new(),
            wall_clock_seconds: None,
            steps: None,
        };
        write_json(&path, &manifest)?;
        Ok(Self { manifest, path, started: Instant::now() })
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        write_text(path, text)?;
        self.manifest.outputs.push(path.to_path_buf());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<(), CliError> {
        write_json(path, value)?;
        self.manifest.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Run `body`, then record its status, timing and step count.
    pub fn execute<F>(mut self, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Self) -> Result<Option<usize>, CliError>,
    {
        let result = body(&mut self);
        self.manifest.wall_clock_seconds = Some(self.started.elapsed().as_secs_f64());
        match &result {
            Ok(steps) => {
                self.manifest.status = RunStatus::Ok;
                self.manifest.steps = *steps;
            }
            Err(e) => {
                self.manifest.status = RunStatus::Failed;
                self.manifest.error = Some(e.name().to_string());
            }
        }
        write_json(&self.path, &self.manifest)?;
        result.map(|_| ())
    }
}
