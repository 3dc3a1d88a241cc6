// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Comparison of the realized gate against an ideal CNOT.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{IfmError, Result};
use crate::gate::{self, GateInput, Scheme, Snapshot};
use crate::linalg::{self, c, CMatrix, I, ONE, ZERO};
use crate::noise::{NoiseLog, NoiseModel};
use crate::quantum::DensityMatrix;

/// CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    CMatrix::from_fn(4, 4, |r, col| {
        let image = if col >= 2 { col ^ 1 } else { col };
        if r == image {
            ONE
        } else {
            ZERO
        }
    })
}

/// `I, X, Y, Z`.
pub fn paulis() -> [CMatrix; 4] {
    [
        linalg::identity(2),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// The 16 two-qubit Pauli products, index `4i + j` for `P_i ⊗ P_j`.
pub fn pauli_basis() -> Vec<CMatrix> {
    let p = paulis();
    let mut out = Vec::with_capacity(16);
    for a in &p {
        for b in &p {
            out.push(a.kronecker(b));
        }
    }
    out
}

/// A linear map on two-qubit operators, stored as its images of the Pauli
/// products. The map may be trace decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitChannel {
    pauli_images: Vec<CMatrix>,
}

impl TwoQubitChannel {
    pub fn from_pauli_inputs<F>(mut f: F) -> Result<Self>
    where
        F: FnMut(&CMatrix) -> Result<CMatrix>,
    {
        let pauli_images = pauli_basis()
            .iter()
            .map(|p| {
                let img = f(p)?;
                if img.shape() != (4, 4) {
                    return Err(IfmError::DimensionMismatch(format!(
                        "channel image of shape {:?}",
                        img.shape()
                    )));
                }
                Ok(img)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pauli_images })
    }

    /// Conjugation by a 4×4 operator.
    pub fn unitary(u: &CMatrix) -> Self {
        Self {
            pauli_images: pauli_basis().iter().map(|p| u * p * u.adjoint()).collect(),
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        pauli_basis()
            .iter()
            .zip(&self.pauli_images)
            .fold(CMatrix::zeros(4, 4), |acc, (p, img)| {
                let coeff = (p * rho).trace() / 4.0;
                acc + img * coeff
            })
    }

    /// Pauli transfer matrix `R[a][b] = Tr(P_a E(P_b)) / 4`.
    pub fn ptm(&self) -> DMatrix<f64> {
        let basis = pauli_basis();
        DMatrix::from_fn(16, 16, |a, b| {
            (&basis[a] * &self.pauli_images[b]).trace().re / 4.0
        })
    }

    /// Images of the matrix units `|a⟩⟨b|`, index `4a + b`.
    pub fn matrix_unit_images(&self) -> Vec<CMatrix> {
        (0..16)
            .map(|k| {
                let mut unit = CMatrix::zeros(4, 4);
                unit[(k / 4, k % 4)] = ONE;
                self.apply(&unit)
            })
            .collect()
    }

    /// Choi matrix `Σ |a⟩⟨b| ⊗ E(|a⟩⟨b|)`.
    pub fn choi(&self) -> CMatrix {
        let mut j = CMatrix::zeros(16, 16);
        for (k, img) in self.matrix_unit_images().iter().enumerate() {
            let mut unit = CMatrix::zeros(4, 4);
            unit[(k / 4, k % 4)] = ONE;
            j += unit.kronecker(img);
        }
        j
    }

    /// Output trace averaged over inputs, `Tr E(I) / 4`.
    pub fn mean_success(&self) -> f64 {
        self.pauli_images[0].trace().re / 4.0
    }
}

/// `|Tr(U† K)|²` summed over Kraus operators, over `d²`.
pub fn process_fidelity(channel: &TwoQubitChannel, ideal: &CMatrix) -> f64 {
    let reference = TwoQubitChannel::unitary(ideal).ptm();
    reference.component_mul(&channel.ptm()).sum() / 16.0
}

/// Haar-averaged `⟨ψ|U† E(ψ) U|ψ⟩`; for a trace-decreasing map lost weight
/// counts as failure.
pub fn avg_gate_fidelity(channel: &TwoQubitChannel, ideal: &CMatrix) -> f64 {
    let d = 4.0;
    (d * process_fidelity(channel, ideal) + channel.mean_success()) / (d + 1.0)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(IfmError::DimensionMismatch(format!(
            "fidelity between dims {:?} and {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    let root = linalg::psd_sqrt(rho.entries());
    let inner = &root * sigma.entries() * &root;
    let values = linalg::hermitian_eigenvalues(&inner);
    let tr: f64 = values.iter().map(|&v| linalg::floored_sqrt(v)).sum();
    Ok(tr * tr)
}

/// Wootters concurrence of a unit-trace two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(IfmError::DimensionMismatch(format!(
            "concurrence needs two qubits, got dims {:?}",
            rho.dims()
        )));
    }
    let y = &paulis()[2];
    let yy = y.kronecker(y);
    let flipped = &yy * rho.entries().map(|z| z.conj()) * &yy;
    let root = linalg::psd_sqrt(rho.entries());
    let mut values = linalg::hermitian_eigenvalues(&(&root * flipped * &root));
    let mut lambdas: Vec<f64> = values.drain(..).map(linalg::floored_sqrt).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

fn magic_basis() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(s, 0.0), ZERO, c(0.0, s));
    CMatrix::from_row_slice(4, 4, &[o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i])
}

/// Local invariants `(Re G1, Im G1, G2)` of a two-qubit unitary.
pub fn makhlin_invariants(u: &CMatrix) -> Result<[f64; 3]> {
    if u.shape() != (4, 4) || !linalg::is_unitary(u, 1e-9) {
        return Err(IfmError::InvalidInput(
            "Makhlin invariants need a 4x4 unitary".into(),
        ));
    }
    let q = magic_basis();
    let ub = q.adjoint() * u * &q;
    let m = ub.transpose() * &ub;
    let det: Complex64 = u.determinant();
    let tr = m.trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - (&m * &m).trace()) / (det * 4.0);
    Ok([g1.re + 0.0, g1.im + 0.0, g2.re + 0.0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthRow {
    pub control_in: usize,
    /// 0 is `|+⟩`, 1 is `|−⟩`.
    pub target_in: usize,
    pub control_out: usize,
    pub target_out: usize,
    /// Post-selected probability of the dominant outcome.
    pub probability: f64,
    /// Post-selected outcome distribution over `00, 01, 10, 11`.
    pub distribution: [f64; 4],
}

pub fn truth_table_of(channel: &TwoQubitChannel) -> Vec<TruthRow> {
    let mut rows = Vec::with_capacity(4);
    for input in 0..4 {
        let mut rho = CMatrix::zeros(4, 4);
        rho[(input, input)] = ONE;
        let out = channel.apply(&rho);
        let total: f64 = (0..4).map(|k| out[(k, k)].re).sum();
        let distribution: [f64; 4] = std::array::from_fn(|k| {
            if total > 0.0 {
                out[(k, k)].re / total
            } else {
                0.0
            }
        });
        let dominant = (0..4)
            .max_by(|&a, &b| distribution[a].total_cmp(&distribution[b]))
            .unwrap_or(0);
        rows.push(TruthRow {
            control_in: input / 2,
            target_in: input % 2,
            control_out: dominant / 2,
            target_out: dominant % 2,
            probability: distribution[dominant],
            distribution,
        });
    }
    rows
}

/// Truth table of the gate for one noise realization.
pub fn truth_table(s: &Scheme, nm: &NoiseModel, seed: u64) -> Result<Vec<TruthRow>> {
    let (channel, _) = gate::gate_channel(s, nm, seed)?;
    Ok(truth_table_of(&channel))
}

/// Figures of merit of one gate realization.
#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub scheme: Scheme,
    pub noise: NoiseModel,
    pub seed: u64,
    pub truth_table: Vec<TruthRow>,
    /// Fidelity with the CNOT output for each basis input `00, 01, 10, 11`.
    pub state_fidelities: [f64; 4],
    pub avg_gate_fidelity: f64,
    pub process_fidelity: f64,
    /// Concurrence of the post-selected output for the Bell-generating input.
    pub concurrence: f64,
    pub bell_fidelity: f64,
    /// Success probability averaged over inputs.
    pub success_prob: f64,
    pub pulse_purity: f64,
    pub probe_purity: f64,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
    pub noise_log: NoiseLog,
}

/// Reconstructs the channel for `seed` and evaluates it against CNOT.
pub fn characterize(s: &Scheme, nm: &NoiseModel, seed: u64) -> Result<GateReport> {
    let (channel, log) = gate::gate_channel(s, nm, seed)?;
    let ideal = cnot();
    let state_fidelities = std::array::from_fn(|k| {
        let input = GateInput::basis(k / 2, k % 2);
        let rho = crate::quantum::to_density(&input.two_qubit_state());
        let expected = input.ideal_output();
        let out = DensityMatrix::from_parts_unchecked(vec![2, 2], channel.apply(rho.entries()));
        out.overlap(&expected)
    });
    let bell = gate::run_gate(s, &GateInput::bell(), nm, seed)?;
    Ok(GateReport {
        scheme: *s,
        noise: *nm,
        seed,
        truth_table: truth_table_of(&channel),
        state_fidelities,
        avg_gate_fidelity: avg_gate_fidelity(&channel, &ideal),
        process_fidelity: process_fidelity(&channel, &ideal),
        concurrence: bell.concurrence,
        bell_fidelity: bell.fidelity,
        success_prob: channel.mean_success(),
        pulse_purity: bell.pulse_purity,
        probe_purity: bell.probe_purity,
        snapshots: bell.snapshots,
        noise_log: log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{to_density, PureState};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ket(amps: &[Complex64]) -> DensityMatrix {
        let dims = if amps.len() == 2 { vec![2] } else { vec![2, 2] };
        to_density(&PureState::new(dims, amps.to_vec()).unwrap())
    }

    fn random_su2(rng: &mut ChaCha8Rng) -> CMatrix {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (a, b) = (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n));
        CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
    }

    #[test]
    fn fidelity_basics() {
        let zero = ket(&[ONE, ZERO]);
        let one = ket(&[ZERO, ONE]);
        assert_abs_diff_eq!(state_fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(state_fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
        assert!(state_fidelity(&zero, &ket(&[ONE, ZERO, ZERO, ZERO])).is_err());
    }

    #[test]
    fn fidelity_with_mixture_matches_eigendecomposition() {
        let zero = ket(&[ONE, ZERO]);
        for k in 0..=10 {
            let theta = f64::from(k) * 0.15;
            let (cs, sn) = (theta.cos().powi(2), theta.sin().powi(2));
            let mix = DensityMatrix::new(vec![2], linalg::diag(&[c(cs, 0.0), c(sn, 0.0)])).unwrap();
            // brute force: both operators diagonal, so Tr√(√ρσ√ρ) = Σ √(p_i q_i)
            let brute: f64 = [(1.0, cs), (0.0, sn)]
                .iter()
                .map(|(p, q)| (p * q).sqrt())
                .sum::<f64>()
                .powi(2);
            let f = state_fidelity(&zero, &mix).unwrap();
            assert_abs_diff_eq!(f, brute, epsilon = 1e-12);
            assert_abs_diff_eq!(f, state_fidelity(&mix, &zero).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn concurrence_values() {
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert_abs_diff_eq!(
            concurrence(&ket(&[s, ZERO, ZERO, s])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            concurrence(&ket(&[ZERO, s, -s, ZERO])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            concurrence(&ket(&[ONE, ZERO, ZERO, ZERO])).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert_abs_diff_eq!(concurrence(&mixed).unwrap(), 0.0, epsilon = 1e-12);
        // pure state concurrence is 2|ad - bc|
        let (a, b, cc, d) = (c(0.5, 0.1), c(0.2, -0.3), c(0.4, 0.0), c(-0.1, 0.2));
        let (psi, _) = crate::quantum::normalize(vec![2, 2], vec![a, b, cc, d]).unwrap();
        let amps = psi.amplitudes();
        let expected = 2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm();
        assert_abs_diff_eq!(
            concurrence(&to_density(&psi)).unwrap(),
            expected,
            epsilon = 1e-10
        );
    }

    #[test]
    fn makhlin_reference_values() {
        let swap = CMatrix::from_fn(4, 4, |r, col| {
            let image = [0, 2, 1, 3][col];
            if r == image {
                ONE
            } else {
                ZERO
            }
        });
        let cases = [
            (linalg::identity(4), [1.0, 0.0, 3.0]),
            (cnot(), [0.0, 0.0, 1.0]),
            (swap, [-1.0, 0.0, -3.0]),
        ];
        for (u, expected) in cases {
            let g = makhlin_invariants(&u).unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(g[k], expected[k], epsilon = 1e-12);
            }
        }
        assert!(makhlin_invariants(&linalg::identity(4).scale(2.0)).is_err());
    }

    #[test]
    fn makhlin_invariant_under_local_dressing() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let target = makhlin_invariants(&cnot()).unwrap();
        for _ in 0..50 {
            let before = random_su2(&mut rng).kronecker(&random_su2(&mut rng));
            let after = random_su2(&mut rng).kronecker(&random_su2(&mut rng));
            let dressed = &after * cnot() * &before;
            let g = makhlin_invariants(&dressed).unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(g[k], target[k], epsilon = 1e-10);
            }
            let undone = after.adjoint() * &dressed * before.adjoint();
            assert!(linalg::max_abs_diff(&undone, &cnot()) < 1e-12);
        }
    }

    #[test]
    fn ideal_channel_scores_one() {
        let ch = TwoQubitChannel::unitary(&cnot());
        assert_abs_diff_eq!(avg_gate_fidelity(&ch, &cnot()), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ch.mean_success(), 1.0, epsilon = 1e-12);
        let id = TwoQubitChannel::unitary(&linalg::identity(4));
        // |Tr(CNOT)|² = 4 gives F_pro = 1/4 and F_avg = 2/5
        assert_abs_diff_eq!(avg_gate_fidelity(&id, &cnot()), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn average_fidelity_agrees_with_haar_sampling() {
        // oracle: Monte Carlo over Haar-random two-qubit pure states
        let nm = NoiseModel {
            p_dephase: 0.3,
            eta: 0.05,
            epsilon: crate::noise::EpsilonDist::Fixed(0.1),
            ..NoiseModel::ideal()
        };
        let (ch, _) = gate::gate_channel(&Scheme::single(), &nm, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let samples = 20_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let v: Vec<Complex64> = (0..4)
                .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let (psi, _) = crate::quantum::normalize(vec![2, 2], v).unwrap();
            let out = DensityMatrix::from_parts_unchecked(
                vec![2, 2],
                ch.apply(to_density(&psi).entries()),
            );
            acc += out.overlap(&psi.evolve(&cnot()).unwrap());
        }
        let mc = acc / f64::from(samples);
        assert!(
            (mc - avg_gate_fidelity(&ch, &cnot())).abs() < 0.005,
            "mc {mc}"
        );
    }

    #[test]
    fn fully_dephased_single_pulse_closed_form() {
        // coherence between control branches scales by (1-p)² over two hooks,
        // so F_pro = (1 + (1-p)²)/2 and F_avg = (4 F_pro + 1)/5
        for p in [0.0, 0.25, 0.5, 1.0] {
            let nm = NoiseModel {
                p_dephase: p,
                ..NoiseModel::ideal()
            };
            let (ch, _) = gate::gate_channel(&Scheme::single(), &nm, 0).unwrap();
            let coherence = (1.0 - p) * (1.0 - p);
            let f_pro = (1.0 + coherence) / 2.0;
            assert_abs_diff_eq!(process_fidelity(&ch, &cnot()), f_pro, epsilon = 1e-12);
            assert_abs_diff_eq!(
                avg_gate_fidelity(&ch, &cnot()),
                (4.0 * f_pro + 1.0) / 5.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn choi_of_cp_channel_is_psd() {
        let nm = NoiseModel {
            p_dephase: 0.4,
            eta: 0.1,
            ..NoiseModel::ideal()
        };
        let (ch, _) = gate::gate_channel(&Scheme::single(), &nm, 0).unwrap();
        let values = linalg::hermitian_eigenvalues(&ch.choi());
        assert!(values.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn truth_table_rows() {
        let rows = truth_table(&Scheme::single(), &NoiseModel::ideal(), 0).unwrap();
        let mapped: Vec<(usize, usize, usize, usize)> = rows
            .iter()
            .map(|r| (r.control_in, r.target_in, r.control_out, r.target_out))
            .collect();
        assert_eq!(
            mapped,
            vec![(0, 0, 0, 0), (0, 1, 0, 1), (1, 0, 1, 1), (1, 1, 1, 0)]
        );
        assert!(rows.iter().all(|r| (r.probability - 1.0).abs() < 1e-12));

        let mut off = Scheme::dual();
        off.target_interaction = false;
        let rows = truth_table(&off, &NoiseModel::ideal(), 0).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.control_in == r.control_out && r.target_in == r.target_out));

        let nm = NoiseModel {
            epsilon: crate::noise::EpsilonDist::Fixed(0.1),
            ..NoiseModel::ideal()
        };
        let rows = truth_table(&Scheme::single(), &nm, 0).unwrap();
        assert!(rows[2].probability < 1.0 && rows[3].probability < 1.0);
        assert_abs_diff_eq!(
            rows[2].probability,
            (0.1 * std::f64::consts::PI / 2.0).cos().powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn characterize_ideal() {
        let r = characterize(&Scheme::dual(), &NoiseModel::ideal(), 3).unwrap();
        assert_abs_diff_eq!(r.avg_gate_fidelity, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.concurrence, 1.0, epsilon = 1e-10);
        assert!(r.state_fidelities.iter().all(|f| (f - 1.0).abs() < 1e-12));
        assert_eq!(r.snapshots.len(), 4);
    }
}
