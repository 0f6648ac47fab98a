use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameters: exit 2.
    Config(String),
    /// Vertex or cycle cap reached: exit 3.
    Resource(String),
    /// Anything else that stops the run: exit 1.
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Resource(m) => write!(f, "resource cap: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<sawlab::Error> for CliError {
    fn from(e: sawlab::Error) -> Self {
        use sawlab::Error as E;
        match e {
            E::ResourceCap { .. } => CliError::Resource(e.to_string()),
            E::Frontier { .. } | E::RegionTooSmall(_) => CliError::Config(format!("{e}; try a larger --radius")),
            E::Range(_) | E::Parse(_) | E::Precondition(_) | E::InvalidGraph(_) => CliError::Config(e.to_string()),
            E::Singular | E::NoSignChange { .. } => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
