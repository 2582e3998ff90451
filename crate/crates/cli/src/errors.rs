use std::fmt;

/// Process exit codes: 0 ok, 2 parse error, 3 degenerate data, 4 bad flags.
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_FLAGS: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flag combination or value discovered after clap parsing.
    Flags(String),
    /// Input file unreadable or a row failed to parse as a finite real.
    Parse { path: String, detail: String },
    /// The statistics engine refused the data (degenerate segment,
    /// zero scale, constant input, ...).
    Data(lrdshift::Error),
    /// Writing an output artifact failed.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Flags(_) => EXIT_FLAGS,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Data(_) => EXIT_DEGENERATE,
            CliError::Output(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Flags(msg) => write!(f, "invalid arguments: {msg}"),
            CliError::Parse { path, detail } => write!(f, "cannot read {path}: {detail}"),
            CliError::Data(err) => write!(f, "degenerate data: {err}"),
            CliError::Output(msg) => write!(f, "cannot write output: {msg}"),
        }
    }
}

impl From<lrdshift::Error> for CliError {
    fn from(err: lrdshift::Error) -> Self {
        CliError::Data(err)
    }
}

pub type CliResult<T> = Result<T, CliError>;
