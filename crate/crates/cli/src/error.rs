// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

use ifm_core::IfmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(#[from] IfmError),

    #[error("I/O error: {0}")]
    Io(String),

    /// A replayed run did not reproduce the stored output.
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
}

impl CliError {
    /// Process exit code: 2 config, 3 model, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) | CliError::ReplayMismatch(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub(crate) fn io(context: impl std::fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
