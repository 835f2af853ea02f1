//! Errors of the command-line layer and their exit codes.

use std::fmt;

use crate::expr::SyntaxError;

#[derive(Debug)]
pub enum CliError {
    /// Malformed expression text.
    Syntax { input: String, err: SyntaxError },
    /// A symbol that is not a generator or a bound stream.
    UnknownSymbol(String),
    /// Well-formed text of the wrong kind for its flag.
    Shape(String),
    Usage(String),
    /// Failure inside the core computation.
    Domain(ffq_core::Error),
    /// Malformed subspace or config file.
    Format(String),
    Io(String),
    /// Standard output was closed early; not reported.
    BrokenPipe,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "syntax_error",
            CliError::UnknownSymbol(_) => "unknown_symbol",
            CliError::Shape(_) => "invalid_expression",
            CliError::Usage(_) => "usage",
            CliError::Domain(e) => e.code(),
            CliError::Format(_) => "format_error",
            CliError::Io(_) | CliError::BrokenPipe => "io_error",
        }
    }

    /// 1 for bad invocations, 2 for domain failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::UnknownSymbol(_) | CliError::Shape(_) | CliError::Usage(_) => 1,
            CliError::Domain(_) | CliError::Format(_) | CliError::Io(_) => 2,
            CliError::BrokenPipe => 0,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "error": self.to_string(), "code": self.code() });
        if let CliError::Syntax { err, .. } = self {
            v["position"] = err.pos.into();
        }
        v
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Syntax { input, err } => write!(f, "{err} in \"{input}\""),
            CliError::UnknownSymbol(s) => write!(f, "unknown symbol: {s}"),
            CliError::Shape(s) | CliError::Usage(s) | CliError::Format(s) | CliError::Io(s) => f.write_str(s),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::BrokenPipe => f.write_str("broken pipe"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ffq_core::Error> for CliError {
    fn from(e: ffq_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::BrokenPipe;
        }
        CliError::Io(e.to_string())
    }
}
