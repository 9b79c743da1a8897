use std::process::ExitCode;

use sarx::SarxError;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input; exit code 2.
    Validation(String),
    /// I/O and other runtime failures; exit code 3.
    Runtime(String),
    /// Instability or ill-conditioning during computation; exit code 4.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }

    /// Prefixes the message with the config path it concerns.
    pub fn context(self, path: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{path}: {m}")),
            CliError::Runtime(m) => CliError::Runtime(format!("{path}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{path}: {m}")),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<SarxError> for CliError {
    fn from(e: SarxError) -> Self {
        let msg = e.to_string();
        if e.is_numerical() {
            return CliError::Numerical(msg);
        }
        match e {
            SarxError::Io(_) | SarxError::Json(_) => CliError::Runtime(msg),
            _ => CliError::Validation(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
