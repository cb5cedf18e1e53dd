use std::path::Path;

use thiserror::Error;

use crate::attack::AttackError;
use crate::circuit::CircuitError;
use crate::compiler::CompileError;
use crate::io::{JsonError, ReadError};
use crate::obfuscate::ObfuscationError;
use crate::pipeline::RestoreError;
use crate::sim::SimError;
use crate::split::SplitError;

/// Any failure surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error("{file}: {source}")]
    Json {
        file: String,
        #[source]
        source: JsonError,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Obfuscation(#[from] ObfuscationError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Restore(#[from] RestoreError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error("equivalence check failed: {0}")]
    NotEquivalent(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn json(file: &Path, source: JsonError) -> Self {
        Error::Json {
            file: file.display().to_string(),
            source,
        }
    }

    /// 0 success, 1 I/O, 2 validation, 3 infeasible, 4 equivalence failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Read(ReadError::Io { .. }) => 1,
            Error::Obfuscation(ObfuscationError::NoSlot(_)) | Error::Split(SplitError::Infeasible(_)) => 3,
            Error::Obfuscation(ObfuscationError::NotEquivalent(_)) | Error::NotEquivalent(_) => 4,
            _ => 2,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
