use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}line {line}, column {column}: {message}", at_path(path))]
    Parse {
        /// Dotted path to the offending key, empty when the JSON itself is malformed.
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{path}`: {reason}")]
    Validation { path: String, reason: String },

    #[error("unknown preset `{0}` (see `spinbath list-presets`)")]
    UnknownPreset(String),

    #[error(
        "bath of {n_spins} spins exceeds the brute-force cap of {cap}; \
         use \"engine\": \"collapsed\" for a uniform bath or raise \"bruteforce_cap\""
    )]
    CapExceeded { n_spins: usize, cap: usize },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(spinbath_core::Error),
}

fn at_path(path: &str) -> String {
    if path.is_empty() || path == "." {
        String::new()
    } else {
        format!("at `{path}`, ")
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::UnknownPreset(_) => 2,
            CliError::CapExceeded { .. } => 3,
            CliError::Io { .. } => 4,
            CliError::Core(_) => 1,
        }
    }

    pub(crate) fn validation(path: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<spinbath_core::Error> for CliError {
    fn from(e: spinbath_core::Error) -> Self {
        use spinbath_core::Error as E;
        match e {
            E::InvalidBath { field, reason } => {
                CliError::validation(format!("bath.{field}"), reason)
            }
            E::InvalidSystem { field, reason } => {
                CliError::validation(format!("system.{field}"), reason)
            }
            E::NotUniform { reason } => CliError::validation("engine", reason),
            E::CapExceeded { n_spins, cap } => CliError::CapExceeded { n_spins, cap },
            other => CliError::Core(other),
        }
    }
}
