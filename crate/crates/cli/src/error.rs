use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const RESOURCE: u8 = 3;
    pub const VIOLATIONS: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn from_model(e: aiot_link::Error) -> Self {
        match e {
            aiot_link::Error::GridTooLarge { .. } => CliError::Resource(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Resource(_) => exit::RESOURCE,
            CliError::Io(_) => exit::IO,
        }
    }
}
