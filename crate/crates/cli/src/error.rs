use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing input: files, formats, parameter values.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<typeground::Error> for CliError {
    fn from(e: typeground::Error) -> Self {
        let msg = e.to_string().replace('\n', " ");
        if e.is_input_error() {
            CliError::Input(msg)
        } else {
            CliError::Runtime(msg)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
