//! Command-line front end: argument and config parsing, dispatch to the
//! numerical modules, and deterministic CSV/JSON/SVG output with a run
//! manifest next to every artifact.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
mod commands;
pub mod manifest;
pub mod settings;
pub mod svg;

pub use args::Cli;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "HOMOLOG_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration; detected before any computation starts.
    #[error("usage: {0}")]
    Usage(String),
    #[error("{name}: {message}")]
    Compute { name: &'static str, message: String },
    #[error("IoError: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Compute { .. } | Self::Io { .. } => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Usage(_) => "UsageError",
            Self::Compute { name, .. } => name,
            Self::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

macro_rules! compute_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Self::Compute { name: e.name(), message: e.to_string() }
            }
        }
    )*};
}

compute_error!(
    homolog_core::profiles::ProfileError,
    homolog_core::homogeneous::HomogeneousError,
    homolog_core::spectral::SpectralError,
    homolog_core::simulator::SimError,
    svg::SvgError
);

/// Parse `argv` (including the program name), run the command and return
/// the process exit code: 0 on success, 2 on usage errors, 1 on
/// computational errors (whose name is printed on stderr).
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
