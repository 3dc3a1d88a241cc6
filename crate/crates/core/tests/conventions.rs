// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Phase conventions and mirror phases: what survives as a local phase and
//! what changes the gate class.

use ifm_core::gate::effective_gate;
use ifm_core::linalg::{self, c, CMatrix, I, ONE};
use ifm_core::metrics::{avg_gate_fidelity, cnot, makhlin_invariants, TwoQubitChannel};
use ifm_core::{NoiseModel, PhaseConvention, Scheme, SchemeVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn on_control(d: &[num_complex::Complex64; 2]) -> CMatrix {
    linalg::diag(d).kronecker(&linalg::identity(2))
}

fn gate(variant: SchemeVariant, conv: PhaseConvention, phases: [f64; 4]) -> CMatrix {
    let s = Scheme::new(variant, conv).with_arm_phases(phases);
    effective_gate(&s, &NoiseModel::ideal(), 0).unwrap()
}

#[test]
fn ideal_convention_is_exactly_cnot() {
    for variant in [SchemeVariant::SinglePulse, SchemeVariant::DualPulse] {
        let u = gate(variant, PhaseConvention::Ideal, [0.0; 4]);
        assert!(linalg::max_abs_diff(&u, &cnot()) < 1e-12);
    }
}

#[test]
fn physical_dual_pulse_is_cnot_times_control_phase() {
    let u = gate(
        SchemeVariant::DualPulse,
        PhaseConvention::PhysicalSu2,
        [0.0; 4],
    );
    let expected = -(on_control(&[ONE, I]) * cnot());
    assert!(linalg::max_abs_diff(&u, &expected) < 1e-12);
    let stripped = on_control(&[ONE, -I]) * &u;
    assert!(linalg::max_abs_diff(&stripped, &(-cnot())) < 1e-12);
    let inv = makhlin_invariants(&u).unwrap();
    let reference = makhlin_invariants(&cnot()).unwrap();
    for k in 0..3 {
        assert!((inv[k] - reference[k]).abs() < 1e-10);
    }
    // Uncorrected, the phase costs fidelity.
    let f = avg_gate_fidelity(&TwoQubitChannel::unitary(&u), &cnot());
    assert!(f < 0.7, "{f}");
}

#[test]
fn physical_single_pulse_phase() {
    let u = gate(
        SchemeVariant::SinglePulse,
        PhaseConvention::PhysicalSu2,
        [0.0; 4],
    );
    let stripped = on_control(&[ONE, I]) * &u;
    assert!(linalg::max_abs_diff(&stripped, &cnot()) < 1e-12);
}

#[test]
fn mirror_phases_cancel_in_dual_pulse() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let phases: [f64; 4] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
        let u = gate(SchemeVariant::DualPulse, PhaseConvention::Ideal, phases);
        assert!(linalg::phase_insensitive_diff(&u, &cnot()) < 1e-12);
    }
}

#[test]
fn mirror_phases_are_local_in_single_pulse() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let phases: [f64; 4] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
        let u = gate(SchemeVariant::SinglePulse, PhaseConvention::Ideal, phases);
        // Transmitted branch picks up arm 3, reflected branch arm 2.
        let phase = |a: f64| c(a.cos(), a.sin());
        let expected = on_control(&[phase(phases[2]), phase(phases[1])]) * cnot();
        assert!(linalg::max_abs_diff(&u, &expected) < 1e-12);
        let inv = makhlin_invariants(&u).unwrap();
        let reference = makhlin_invariants(&cnot()).unwrap();
        for k in 0..3 {
            assert!((inv[k] - reference[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn removing_the_target_interaction_leaves_a_local_gate() {
    let mut s = Scheme::single();
    s.target_interaction = false;
    let u = effective_gate(&s, &NoiseModel::ideal(), 0).unwrap();
    assert!(linalg::max_abs_diff(&u, &linalg::identity(4)) < 1e-12);
    let inv = makhlin_invariants(&u).unwrap();
    assert!((inv[0] - 1.0).abs() < 1e-10 && (inv[2] - 3.0).abs() < 1e-10);
}
