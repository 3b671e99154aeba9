//! Resolution of run settings: command-line flag, then the `--config` file,
//! then the built-in default.
//!
//! The config file is TOML with one section per module:
//!
//! ```toml
//! [profiles]
//! tol = 1e-12
//!
//! [simulator]
//! delta = -0.05
//! n = 512
//! t_end = 10.0
//!
//! [cli_io]
//! workers = 4
//! ```
//!
//! Keys are the flag names with `-` replaced by `_`. A key is looked up in
//! the section of the running command first, then in `[cli_io]`, then at
//! the top level of the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{CliError, OUT_ENV};

/// Section shared by every command.
pub const SHARED_SECTION: &str = "cli_io";

#[derive(Debug, Clone)]
pub struct Settings {
    section: &'static str,
    file: Option<PathBuf>,
    table: BTreeMap<String, toml::Value>,
    echo: BTreeMap<String, serde_json::Value>,
}

fn flatten(prefix: &str, table: toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other);
            }
        }
    }
}

impl Settings {
    /// Settings for a command living in `section`, reading `file` if given.
    pub fn load(section: &'static str, file: Option<&Path>) -> Result<Self, CliError> {
        let mut table = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let parsed: toml::Table =
                text.parse().map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))?;
            flatten("", parsed, &mut table);
        }
        Ok(Self { section, file: file.map(Path::to_path_buf), table, echo: BTreeMap::new() })
    }

    /// Settings with no file, for in-process use.
    pub fn empty(section: &'static str) -> Self {
        Self { section, file: None, table: BTreeMap::new(), echo: BTreeMap::new() }
    }

    pub fn file(&self) -> Option<&Path> {
        self.file.as_deref()
    }

    fn lookup(&self, key: &str) -> Option<(&String, &toml::Value)> {
        [format!("{}.{key}", self.section), format!("{SHARED_SECTION}.{key}"), key.to_string()]
            .into_iter()
            .find_map(|k| self.table.get_key_value(&k))
    }

    fn file_value<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.lookup(key)
            .map(|(full, v)| v.clone().try_into::<T>().map_err(|e| CliError::Usage(format!("config key {full}: {e}"))))
            .transpose()
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.echo.insert(key.to_string(), v);
    }

    /// Flag, else file, else `default`; the chosen value is echoed into the manifest.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: DeserializeOwned + Serialize,
    {
        let v = match flag {
            Some(v) => v,
            None => self.file_value(key)?.unwrap_or(default),
        };
        self.record(key, &v);
        Ok(v)
    }

    /// Like [`Settings::value`] without a default.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: DeserializeOwned + Serialize,
    {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file_value(key)?,
        };
        self.record(key, &v);
        Ok(v)
    }

    /// Output path: `--out`, else `out` from the file, else
    /// `$HOMOLOG_OUT/<default_name>` (current directory if unset).
    pub fn output(&mut self, flag: Option<PathBuf>, default_name: &str) -> Result<PathBuf, CliError> {
        let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        let path = match flag {
            Some(p) => p,
            None => self.file_value::<PathBuf>("out")?.unwrap_or_else(|| root.join(default_name)),
        };
        self.record("out", &path);
        Ok(path)
    }

    /// Every resolved setting, keyed by name.
    pub fn echo(&self) -> &BTreeMap<String, serde_json::Value> {
        &self.echo
    }
}

/// Fail with a usage error unless `cond` holds.
pub fn require(cond: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(message()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_file(text: &str, section: &'static str) -> Settings {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, text).unwrap();
        Settings::load(section, Some(&path)).unwrap()
    }

    #[test]
    fn flags_win_over_sections_which_win_over_top_level() {
        let mut s = with_file("delta = 1.0\nn = 7\n[simulator]\ndelta = -0.05\n[cli_io]\nn = 9\n", "simulator");
        assert_eq!(s.value("delta", None, 0.0).unwrap(), -0.05);
        assert_eq!(s.value("delta", Some(0.25), 0.0).unwrap(), 0.25);
        assert_eq!(s.value::<usize>("n", None, 1).unwrap(), 9);
        assert_eq!(s.value::<f64>("tol", None, 1e-12).unwrap(), 1e-12);
        assert_eq!(s.echo()["delta"], serde_json::json!(0.25));
    }

    #[test]
    fn integers_in_the_file_are_accepted_for_reals() {
        let mut s = with_file("[profiles]\ndelta = 0\n", "profiles");
        assert_eq!(s.value("delta", None, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn type_errors_and_bad_files_are_usage_errors() {
        let mut s = with_file("[profiles]\nn = \"many\"\n", "profiles");
        assert_eq!(s.value::<usize>("n", None, 1).unwrap_err().exit_code(), 2);
        let missing = Settings::load("profiles", Some(Path::new("/nonexistent/run.toml")));
        assert_eq!(missing.unwrap_err().exit_code(), 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[profiles\n").unwrap();
        assert!(matches!(Settings::load("profiles", Some(&path)), Err(CliError::Usage(_))));
    }
}
