use serde::Serialize;

/// Process exit codes: 0 success, 2 config error, 3 numeric failure,
/// 4 oracle violation.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CliError {
    Config {
        line: Option<usize>,
        message: String,
    },
    Numeric {
        message: String,
    },
    OracleViolation {
        failures: usize,
        message: String,
    },
    Io {
        message: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Numeric { .. } => EXIT_NUMERIC,
            CliError::OracleViolation { .. } => EXIT_ORACLE,
        }
    }

    /// Machine-readable form printed to stderr on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config {
                line: Some(l),
                message,
            } => {
                write!(f, "config error at line {l}: {message}")
            }
            CliError::Config {
                line: None,
                message,
            } => write!(f, "config error: {message}"),
            CliError::Numeric { message } => write!(f, "numeric failure: {message}"),
            CliError::OracleViolation { failures, message } => {
                write!(f, "oracle violation ({failures} failed): {message}")
            }
            CliError::Io { message } => write!(f, "io error: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<nls2d::Error> for CliError {
    fn from(e: nls2d::Error) -> Self {
        use nls2d::Error::*;
        match e {
            InvalidGridSize(_)
            | InvalidBoxLength(_)
            | InvalidSolverConfig { .. }
            | InvalidRegularity(_)
            | InvalidCutoff(_)
            | GaussianTooWide { .. }
            | UnsupportedExponent(_)
            | UnsupportedProductDegree(_)
            | NonAdmissiblePair { .. }
            | RegimeError(_)
            | InteractionScaleTooLarge { .. }
            | NegativeRadius(_) => CliError::Config {
                line: None,
                message: e.to_string(),
            },
            other => CliError::Numeric {
                message: other.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io {
            message: e.to_string(),
        }
    }
}
