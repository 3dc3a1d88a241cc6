// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Batch experiments over the IFM CNOT simulator: config parsing, parameter
//! sweeps, sampled detector readout, result files and replay.

pub mod args;
pub mod config;
pub mod error;
pub mod experiment;

pub use config::{parse_config, ExperimentConfig, InputPreset, SweepAxis, SweepParam};
pub use error::{CliError, CliResult};
pub use experiment::{replay, run_experiment, Command, ExperimentOutput};
