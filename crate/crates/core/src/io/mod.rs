//! Text formats: the OpenQASM subset for circuits and JSON for manifests,
//! records, layouts, count distributions and reports.

mod json;
mod qasm;

pub use json::{from_json, to_json, JsonError};
pub use qasm::{emit_qasm, parse_qasm, QasmError, QasmErrorKind};

use std::path::Path;

use crate::circuit::Circuit;

/// Reads a `.qasm` file and names the circuit after the file stem.
pub fn read_qasm_file(path: &Path) -> Result<Circuit, ReadError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut circuit = parse_qasm(&text).map_err(|source| ReadError::Qasm {
        path: path.display().to_string(),
        source,
    })?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        circuit.set_name(stem);
    }
    Ok(circuit)
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Qasm {
        path: String,
        #[source]
        source: QasmError,
    },
}
