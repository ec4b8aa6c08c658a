use std::path::Path;

use thiserror::Error;

/// Command failure carrying the process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    /// Bad arguments, unreadable files or malformed input: exit 1.
    #[error("{0}")]
    Usage(String),
    /// The input contradicts the mathematics of the requested operation: exit 2.
    #[error("{0}")]
    Inconsistent(String),
    /// A numerical procedure did not stabilize: exit 3.
    #[error("{0}")]
    Unstable(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Inconsistent(_) => 2,
            Failure::Unstable(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Usage(format!("{}: {e}", path.display()))
    }

    /// Attach the offending path to a library error.
    pub fn in_file(path: &Path, e: nkappa::Error) -> Self {
        match Failure::from(e) {
            Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

impl From<nkappa::Error> for Failure {
    fn from(e: nkappa::Error) -> Self {
        use nkappa::Error as E;
        let msg = e.to_string();
        match e {
            E::Format(_) | E::Dimension(_) => Failure::Usage(msg),
            E::Conditioning(_) | E::Inconclusive(_) => Failure::Unstable(msg),
            _ => Failure::Inconsistent(msg),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv: {e}"))
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;
