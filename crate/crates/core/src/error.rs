// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfmError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state of {requested} amplitudes exceeds the limit of {limit}")]
    DimensionOverflow { requested: usize, limit: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("the zero vector cannot be normalized")]
    ZeroVector,

    #[error("non-finite amplitude in state")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("partial trace needs at least one kept subsystem")]
    EmptyKeepSet,

    #[error("subsystem {0} is not a qubit")]
    NotAQubit(usize),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid gate input: {0}")]
    InvalidInput(String),

    #[error("malformed pulse configuration: {0}")]
    Configuration(String),

    #[error("chain of {requested} qubits exceeds the limit of {limit}")]
    ChainTooLarge { requested: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, IfmError>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    range: &'static str,
    ok: bool,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(IfmError::OutOfRange { name, value, range })
    }
}
