//! Library backing the `segre` command-line tool: JSON/CSV wire formats,
//! minimum-cost term matching, the geodesic demo traces, and the consensus
//! aggregation pipeline over Fréchet means.

pub mod aggregate;
pub mod assignment;
pub mod commands;
pub mod demo;
pub mod io;

use warped_segre::GeometryError;

/// Process exit codes: 0 success, 2 input error, 3 geometry error
/// (disconnected/antipodal/out of domain), 4 non-convergence or a failed
/// `--check`.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Geometry(GeometryError),
    NonConvergence(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Geometry(err) => write!(f, "geometry error: {err}"),
            CliError::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<GeometryError> for CliError {
    fn from(err: GeometryError) -> Self {
        match err {
            GeometryError::NotConnected { .. }
            | GeometryError::Incompatible { .. }
            | GeometryError::Antipodal { .. }
            | GeometryError::AntipodalFactor { .. }
            | GeometryError::Domain { .. } => CliError::Geometry(err),
            GeometryError::MaxItersExceeded { .. } | GeometryError::NoConvergence { .. } => {
                CliError::NonConvergence(err.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Geometry(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

/// Decimal rendering with 15 fractional digits, trailing zeros trimmed
/// (`0 -> "0"`, `3.0 -> "3"`, `sqrt(3) -> "1.732050807568877"`).
pub fn format_value(v: f64) -> String {
    let s = format!("{v:.15}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}
