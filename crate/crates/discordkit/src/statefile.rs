//! State file format: a JSON object `{"matrix": [[[re, im]; 4]; 4]}` over the
//! basis |00>, |01>, |10>, |11>. Parsing never panics on malformed input.

use crate::qcore::{c, ComplexMatrix4, StateError, TwoQubitState};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("cannot read state file: {0}")]
    Io(#[from] std::io::Error),
    #[error("state file schema error: {0}")]
    Schema(String),
    #[error("state file holds an invalid density matrix: {0}")]
    State(#[from] StateError),
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    matrix: [[[f64; 2]; 4]; 4],
}

/// Parses and validates a state from JSON text.
pub fn parse_state_json(text: &str) -> Result<TwoQubitState, StateFileError> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| StateFileError::Schema(e.to_string()))?;
    let mut m = ComplexMatrix4::zeros();
    for (i, row) in file.matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = c(entry[0], entry[1]);
        }
    }
    Ok(TwoQubitState::validate(m)?)
}

/// Serializes a state to the JSON schema.
pub fn state_to_json(state: &TwoQubitState) -> String {
    let mut matrix = [[[0.0f64; 2]; 4]; 4];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let z = state.matrix()[(i, j)];
            *entry = [z.re, z.im];
        }
    }
    serde_json::to_string_pretty(&StateFile { matrix }).expect("fixed schema always serializes")
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<TwoQubitState, StateFileError> {
    let text = std::fs::read_to_string(path)?;
    parse_state_json(&text)
}

pub fn write_state_file(
    path: impl AsRef<Path>,
    state: &TwoQubitState,
) -> Result<(), StateFileError> {
    Ok(std::fs::write(path, state_to_json(state))?)
}
