// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Several IFM gates acting on a register of up to eight atoms.
//!
//! Each gate is the two-qubit success-branch channel of a full protocol
//! run, embedded on its (control, target) pair. Between gates the pulse is
//! replaced by a fresh launch-configuration pulse, so no pulse state is
//! carried over.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{gate_channel_with_log, Scheme};
use crate::error::{IfmError, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::metrics::TwoQubitChannel;
use crate::noise::{self, NoiseLog, NoiseModel};
use crate::pulse::{rabi_unitary, PulseArea};
use crate::quantum::{to_density, DensityMatrix, PureState};

pub const MAX_CHAIN_QUBITS: usize = 8;

/// One step of a chain. Qubits are numbered from 0, most significant first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainStep {
    /// A direct preparation pulse on one atom (no interferometer).
    Pulse { qubit: usize, area: PulseArea },
    /// An IFM gate.
    Cnot { control: usize, target: usize },
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    /// Register state on the all-gates-succeeded branch; trace = `success_prob`.
    pub state: DensityMatrix,
    pub success_prob: f64,
    /// Noise draws of every gate, in gate order.
    pub noise_logs: Vec<NoiseLog>,
}

impl ChainReport {
    /// `⟨ideal|ρ|ideal⟩`, counting pulse loss as failure.
    pub fn fidelity(&self, ideal: &PureState) -> f64 {
        self.state.overlap(ideal)
    }

    pub fn post_selected(&self) -> Result<DensityMatrix> {
        Ok(self.state.normalized()?.0)
    }
}

/// Runs `steps` on an `n`-qubit register starting from `initial`.
pub fn chain(
    n: usize,
    initial: &PureState,
    steps: &[ChainStep],
    s: &Scheme,
    nm: &NoiseModel,
    seed: u64,
) -> Result<ChainReport> {
    if n > MAX_CHAIN_QUBITS {
        return Err(IfmError::ChainTooLarge {
            requested: n,
            limit: MAX_CHAIN_QUBITS,
        });
    }
    if n < 2 {
        return Err(IfmError::InvalidInput(
            "a chain needs at least two qubits".into(),
        ));
    }
    if initial.dims() != vec![2; n].as_slice() {
        return Err(IfmError::DimensionMismatch(format!(
            "initial state dims {:?} for a {n}-qubit chain",
            initial.dims()
        )));
    }
    nm.validate()?;
    let check = |q: usize| {
        if q < n {
            Ok(())
        } else {
            Err(IfmError::SubsystemOutOfRange { index: q, count: n })
        }
    };

    let dims = vec![2; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = to_density(initial).entries().clone();
    let mut logs = Vec::new();
    let mut cached: Option<(NoiseLog, TwoQubitChannel)> = None;
    for step in steps {
        match *step {
            ChainStep::Pulse { qubit, area } => {
                check(qubit)?;
                apply_local_unitary(&mut rho, n, qubit, &rabi_unitary(area, s.conv));
            }
            ChainStep::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(IfmError::InvalidInput(format!(
                        "gate with control and target both {control}"
                    )));
                }
                let mut log = NoiseLog::default();
                noise::draw_epsilons(nm, s.variant, &mut rng, &mut log);
                let channel = match &cached {
                    Some((prev, ch)) if *prev == log => ch,
                    _ => {
                        &cached
                            .insert((log.clone(), gate_channel_with_log(s, nm, &log)?))
                            .1
                    }
                };
                rho = apply_pair_channel(&rho, n, control, target, channel);
                logs.push(log);
            }
        }
    }
    let state = DensityMatrix::new_subnormalized(dims, rho)?;
    Ok(ChainReport {
        success_prob: state.trace(),
        state,
        noise_logs: logs,
    })
}

/// `ρ ↦ U ρ U†` for a 2×2 `u` on one qubit of an `n`-qubit register.
fn apply_local_unitary(rho: &mut CMatrix, n: usize, qubit: usize, u: &CMatrix) {
    let dim = 1usize << n;
    let mask = 1usize << (n - 1 - qubit);
    let pairs = (0..dim).filter(|i| i & mask == 0);
    for i0 in pairs.clone() {
        let i1 = i0 | mask;
        for col in 0..dim {
            let (a, b) = (rho[(i0, col)], rho[(i1, col)]);
            rho[(i0, col)] = u[(0, 0)] * a + u[(0, 1)] * b;
            rho[(i1, col)] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
    for j0 in pairs {
        let j1 = j0 | mask;
        for row in 0..dim {
            let (a, b) = (rho[(row, j0)], rho[(row, j1)]);
            rho[(row, j0)] = a * u[(0, 0)].conj() + b * u[(0, 1)].conj();
            rho[(row, j1)] = a * u[(1, 0)].conj() + b * u[(1, 1)].conj();
        }
    }
}

/// Applies a two-qubit channel to qubits (`first`, `second`) of an
/// `n`-qubit density matrix.
fn apply_pair_channel(
    rho: &CMatrix,
    n: usize,
    first: usize,
    second: usize,
    channel: &TwoQubitChannel,
) -> CMatrix {
    let dim = 1usize << n;
    let rest_dim = dim / 4;
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    // index[pair * rest_dim + rest] -> full register index
    let mut index = vec![0usize; dim];
    for i in 0..dim {
        let pair = bit(i, first) * 2 + bit(i, second);
        let mut rest = 0;
        for q in 0..n {
            if q != first && q != second {
                rest = (rest << 1) | bit(i, q);
            }
        }
        index[pair * rest_dim + rest] = i;
    }
    // units[(a * 4 + b) * 16 + a2 * 4 + b2] = E(|a⟩⟨b|)[a2, b2]
    let units: Vec<Complex64> = channel
        .matrix_unit_images()
        .iter()
        .flat_map(|img| (0..16).map(move |k| img[(k / 4, k % 4)]))
        .collect();
    let src = rho.as_slice();
    let mut out = vec![ZERO; dim * dim];
    // Column-major storage: entry (i, j) lives at i + j * dim.
    let at = |i: usize, j: usize| i + j * dim;
    for r in 0..rest_dim {
        for s in 0..rest_dim {
            let mut block = [ZERO; 16];
            for a2 in 0..4 {
                for b2 in 0..4 {
                    block[a2 * 4 + b2] =
                        src[at(index[a2 * rest_dim + r], index[b2 * rest_dim + s])];
                }
            }
            let mut image = [ZERO; 16];
            for (ab, x) in block.iter().enumerate() {
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                let unit = &units[ab * 16..ab * 16 + 16];
                for (slot, u) in image.iter_mut().zip(unit) {
                    *slot += x * u;
                }
            }
            for a2 in 0..4 {
                for b2 in 0..4 {
                    out[at(index[a2 * rest_dim + r], index[b2 * rest_dim + s])] =
                        image[a2 * 4 + b2];
                }
            }
        }
    }
    CMatrix::from_vec(dim, dim, out)
}
