// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Which-way dephasing rebuilt as an explicit environment record.
//!
//! Each dephasing step is dilated into an isometry that writes its Kraus
//! index into a fresh six-level register. The global state stays pure, so
//! the system state and the purity of pulse plus record can be read off
//! directly and compared with what `run_gate` reports.

use ifm_core::gate::{
    interact_operator, route_operator, unroute_operator, InteractionAreas, PULSE_DIM,
};
use ifm_core::linalg::{c, CMatrix, CVector, ZERO};
use ifm_core::quantum::{partial_trace_raw, purity, DensityMatrix};
use ifm_core::{initial_state, run_gate, GateInput, NoiseModel, Scheme};

const SYS: usize = 20;
const REC: usize = PULSE_DIM + 1;

/// `√(1-p) I` followed by `√p Π_k` for each pulse label.
fn kraus(p: f64) -> Vec<CMatrix> {
    let mut ops = vec![CMatrix::identity(SYS, SYS) * c((1.0 - p).sqrt(), 0.0)];
    for label in 0..PULSE_DIM {
        let mut k = CMatrix::zeros(SYS, SYS);
        for j in 0..4 {
            k[(label * 4 + j, label * 4 + j)] = c(p.sqrt(), 0.0);
        }
        ops.push(k);
    }
    ops
}

/// Global vector indexed `sys * REC² + r1 * REC + r2`.
fn apply_system(op: &CMatrix, v: &CVector) -> CVector {
    let mut out = CVector::from_element(v.len(), ZERO);
    for env in 0..REC * REC {
        for i in 0..SYS {
            let mut acc = ZERO;
            for j in 0..SYS {
                acc += op[(i, j)] * v[j * REC * REC + env];
            }
            out[i * REC * REC + env] = acc;
        }
    }
    out
}

/// Writes the Kraus index into record `slot` (0 or 1), which must be empty.
fn record(v: &CVector, ops: &[CMatrix], slot: usize) -> CVector {
    let mut out = CVector::from_element(v.len(), ZERO);
    for (k, op) in ops.iter().enumerate() {
        let branch = apply_system(op, v);
        for sys in 0..SYS {
            for other in 0..REC {
                let (from, to) = if slot == 0 {
                    ((0, other), (k, other))
                } else {
                    ((other, 0), (other, k))
                };
                out[sys * REC * REC + to.0 * REC + to.1] +=
                    branch[sys * REC * REC + from.0 * REC + from.1];
            }
        }
    }
    out
}

fn dilated_run(scheme: &Scheme, input: &GateInput, p: f64) -> CVector {
    let psi = initial_state(scheme, input).unwrap();
    let mut v = CVector::from_element(SYS * REC * REC, ZERO);
    for i in 0..SYS {
        v[i * REC * REC] = psi.amplitude(i);
    }
    let ops = kraus(p);
    v = apply_system(&route_operator(0.0), &v);
    v = record(&v, &ops, 0);
    v = apply_system(&interact_operator(scheme, &InteractionAreas::default()), &v);
    v = record(&v, &ops, 1);
    apply_system(&unroute_operator(0.0), &v)
}

const DIMS: [usize; 5] = [PULSE_DIM, 2, 2, REC, REC];

#[test]
fn dilation_reproduces_run_gate() {
    let input = GateInput::bell();
    let scheme = Scheme::single();
    for k in 0..10 {
        let p = f64::from(k) / 9.0;
        let v = dilated_run(&scheme, &input, p);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let global = &v * v.adjoint();
        let (_, system) = partial_trace_raw(&DIMS, &global, &[0, 1, 2]).unwrap();
        let (_, probe) = partial_trace_raw(&DIMS, &global, &[0, 3, 4]).unwrap();
        let (_, pulse) = partial_trace_raw(&DIMS, &global, &[0]).unwrap();

        let nm = NoiseModel {
            p_dephase: p,
            ..NoiseModel::ideal()
        };
        let report = run_gate(&scheme, &input, &nm, 0).unwrap();
        assert!(
            (&system - report.final_state.entries()).camax() < 1e-12,
            "p = {p}"
        );

        let purity_of = |m: CMatrix| purity(&DensityMatrix::new(vec![m.nrows()], m).unwrap());
        let probe_purity = purity_of(probe);
        assert!(
            (probe_purity - report.probe_purity).abs() < 1e-12,
            "p = {p}"
        );
        assert!((purity_of(pulse) - report.pulse_purity).abs() < 1e-12);
        // Coherence between the two control branches decays as (1-p)² over
        // the two dephasing steps.
        let expected = (1.0 + (1.0 - p).powi(4)) / 2.0;
        assert!(
            (probe_purity - expected).abs() < 1e-12,
            "p = {p}: {probe_purity}"
        );
    }
}

#[test]
fn dilation_dual_pulse_keeps_probe_pure_without_distinguishability() {
    // With κ = 0 the dual-pulse scheme sees no dephasing at all.
    let input = GateInput::bell();
    let nm = NoiseModel {
        p_dephase: 1.0,
        kappa: 0.0,
        ..NoiseModel::ideal()
    };
    let report = run_gate(&Scheme::dual(), &input, &nm, 0).unwrap();
    assert!((report.probe_purity - 1.0).abs() < 1e-12);
    let v = dilated_run(&Scheme::dual(), &input, 0.0);
    let global = &v * v.adjoint();
    let (_, system) = partial_trace_raw(&DIMS, &global, &[0, 1, 2]).unwrap();
    assert!((&system - report.final_state.entries()).camax() < 1e-12);
}
