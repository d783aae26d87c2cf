use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] rigidlab::Error),
    #[error("{0} acceptance criteria failed")]
    VerifyFailed(usize),
}

impl CliError {
    /// 1 for validation errors, 2 for numeric gates.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numeric_gate() => 2,
            _ => 1,
        }
    }
}
