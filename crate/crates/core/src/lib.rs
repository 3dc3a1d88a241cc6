// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Simulation of a CNOT gate mediated by interaction-free measurement.
//!
//! A control atom sits inside a Fabry-Perot cavity. A laser π pulse is
//! transmitted when the control is in its ground state and reflected onto a
//! target atom when it is excited; the reflected pulse flips the target.
//! Sending the light back through the cavity undoes the path entanglement,
//! leaving a CNOT on the two atoms. A variant launches an extra 2π pulse
//! from the other side so that both paths are always lit.
//!
//! Modules, bottom up:
//!
//! * [`quantum`]: dense pure states, density matrices, partial traces.
//! * [`pulse`]: Rabi rotations by pulse area.
//! * [`cavity`]: Airy transmission and the resulting routing leakage.
//! * [`noise`]: which-way dephasing, pulse-area deficits, leakage settings.
//! * [`gate`]: the protocol stages, full runs and multi-gate chains.
//! * [`metrics`]: fidelities, concurrence, local invariants, gate reports.

pub mod cavity;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod pulse;
pub mod quantum;

pub use error::{IfmError, Result};
pub use gate::{
    chain, initial_state, interact, route, run_gate, unroute, ChainReport, ChainStep, GateInput,
    InteractionAreas, PulseConfig, RunReport, Scheme, SchemeVariant,
};
pub use metrics::{characterize, GateReport, TwoQubitChannel};
pub use noise::{EpsilonDist, LossPasses, NoiseModel};
pub use pulse::{PhaseConvention, PulseArea};
pub use quantum::{DensityMatrix, PureState};
