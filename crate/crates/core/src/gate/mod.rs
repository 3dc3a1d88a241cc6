// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! The interaction-free CNOT protocol.
//!
//! The composite space is (pulse configuration) ⊗ (control) ⊗ (target),
//! with dimensions `5 × 2 × 2`. The pulse configuration is a discrete path
//! label, not a quantized field mode:
//!
//! | label         | single pulse | dual pulse      |
//! |---------------|--------------|-----------------|
//! | `Launch`      | π@1          | (π@1, 2π@4)     |
//! | `Reflected`   | π@2          | (π@2, 2π@3)     |
//! | `Transmitted` | π@3          | (π@3, 2π@2)     |
//! | `LostForward` | lost         | lost            |
//! | `LostReturn`  | lost         | lost            |
//!
//! Arm 2 leads to the target atom, arm 3 is the transmitted path. A ground
//! state control transmits the π pulse (signal A, arm 3); an excited control
//! reflects it onto the target (signal B, arm 2). The target's basis states
//! `|+⟩, |−⟩` are stored at indices 0 and 1.
//!
//! Leakage `η` moves amplitude `√η` of each branch into a lost label. Loss
//! on the forward and return passes goes to separate labels so that every
//! stage stays an isometry on its input sector. Lost labels are never
//! touched again.

mod chain;

pub use chain::{chain, ChainReport, ChainStep, MAX_CHAIN_QUBITS};

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, IfmError, Result};
use crate::linalg::{self, c, CMatrix, ONE, ZERO};
use crate::metrics::{self, TwoQubitChannel};
use crate::noise::{self, HookStage, NoiseLog, NoiseModel, PathDephasing, PulseRole};
use crate::pulse::{perturb_area, rabi_unitary, PhaseConvention, PulseArea};
use crate::quantum::{
    self, partial_trace, purity, tensor, to_density, DensityMatrix, PureState, CHANNEL_TOL,
    UNITARY_TOL,
};

/// Subsystem positions in the gate's state space.
pub const PULSE: usize = 0;
pub const CONTROL: usize = 1;
pub const TARGET: usize = 2;

pub const PULSE_DIM: usize = 5;
pub const GATE_DIMS: [usize; 3] = [PULSE_DIM, 2, 2];
const FULL_DIM: usize = PULSE_DIM * 4;

/// Tolerance on weight found outside the sector a stage expects.
const SECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseConfig {
    Launch,
    Reflected,
    Transmitted,
    LostForward,
    LostReturn,
}

impl PulseConfig {
    pub const ALL: [PulseConfig; PULSE_DIM] = [
        PulseConfig::Launch,
        PulseConfig::Reflected,
        PulseConfig::Transmitted,
        PulseConfig::LostForward,
        PulseConfig::LostReturn,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn is_lost(self) -> bool {
        matches!(self, PulseConfig::LostForward | PulseConfig::LostReturn)
    }

    /// Configuration the cavity sends the pulse into for a control basis state.
    pub fn routed(control: usize) -> Self {
        if control == 0 {
            PulseConfig::Transmitted
        } else {
            PulseConfig::Reflected
        }
    }

    /// Arm holding the π pulse, if any.
    pub fn pi_arm(self) -> Option<u8> {
        match self {
            PulseConfig::Launch => Some(1),
            PulseConfig::Reflected => Some(2),
            PulseConfig::Transmitted => Some(3),
            _ => None,
        }
    }

    /// Arm holding the 2π pulse in the dual-pulse scheme.
    pub fn two_pi_arm(self) -> Option<u8> {
        match self {
            PulseConfig::Launch => Some(4),
            PulseConfig::Reflected => Some(3),
            PulseConfig::Transmitted => Some(2),
            _ => None,
        }
    }

    /// Ket label in arm notation, e.g. `π@2` or `(π@3,2π@2)`.
    pub fn label(self, variant: SchemeVariant) -> String {
        match (self.pi_arm(), self.two_pi_arm(), variant) {
            (Some(a), _, SchemeVariant::SinglePulse) => format!("π@{a}"),
            (Some(a), Some(b), SchemeVariant::DualPulse) => format!("(π@{a},2π@{b})"),
            _ if self == PulseConfig::LostForward => "lost(forward)".into(),
            _ => "lost(return)".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SchemeVariant {
    /// A lone π pulse.
    #[default]
    #[serde(rename = "single")]
    SinglePulse,
    /// π pulse plus a 2π pulse launched from the opposite side.
    #[serde(rename = "dual")]
    DualPulse,
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeVariant::SinglePulse => "single",
            SchemeVariant::DualPulse => "dual",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub variant: SchemeVariant,
    pub conv: PhaseConvention,
    /// Phase (radians) a pulse picks up at the end mirror of arms 1 to 4.
    pub arm_phases: [f64; 4],
    /// When false the pulse in arm 2 leaves the target untouched.
    pub target_interaction: bool,
}

impl Scheme {
    pub fn new(variant: SchemeVariant, conv: PhaseConvention) -> Self {
        Self {
            variant,
            conv,
            arm_phases: [0.0; 4],
            target_interaction: true,
        }
    }

    pub fn single() -> Self {
        Self::new(SchemeVariant::SinglePulse, PhaseConvention::Ideal)
    }

    pub fn dual() -> Self {
        Self::new(SchemeVariant::DualPulse, PhaseConvention::Ideal)
    }

    pub fn with_arm_phases(mut self, phases: [f64; 4]) -> Self {
        self.arm_phases = phases;
        self
    }

    /// Total mirror phase collected by the pulses of a configuration.
    fn mirror_phase(&self, config: PulseConfig) -> f64 {
        let arm = |a: Option<u8>| a.map_or(0.0, |a| self.arm_phases[usize::from(a) - 1]);
        match self.variant {
            SchemeVariant::SinglePulse => arm(config.pi_arm()),
            SchemeVariant::DualPulse => arm(config.pi_arm()) + arm(config.two_pi_arm()),
        }
    }
}

/// Control `α|0⟩ + β|1⟩` and target `γ|+⟩ + δ|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateInput {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl GateInput {
    pub fn new(
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        delta: Complex64,
    ) -> Result<Self> {
        let input = Self {
            alpha,
            beta,
            gamma,
            delta,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        let amps = [self.alpha, self.beta, self.gamma, self.delta];
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(IfmError::NonFinite);
        }
        for (name, n) in [
            ("control", self.alpha.norm_sqr() + self.beta.norm_sqr()),
            ("target", self.gamma.norm_sqr() + self.delta.norm_sqr()),
        ] {
            if (n - 1.0).abs() > UNITARY_TOL {
                return Err(IfmError::InvalidInput(format!(
                    "{name} amplitudes have squared norm {n}"
                )));
            }
        }
        Ok(())
    }

    /// Computational basis input `|control⟩|target⟩`, target 0 = `|+⟩`.
    pub fn basis(control: usize, target: usize) -> Self {
        let bit = |b: usize, one: usize| if b == one { ONE } else { ZERO };
        Self {
            alpha: bit(control, 0),
            beta: bit(control, 1),
            gamma: bit(target, 0),
            delta: bit(target, 1),
        }
    }

    /// `(|0⟩ + |1⟩)/√2 ⊗ |+⟩`, which the gate maps to a Bell state.
    pub fn bell() -> Self {
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            alpha: s,
            beta: s,
            gamma: ONE,
            delta: ZERO,
        }
    }

    /// Haar-random product input.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut pair = || {
            let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n))
        };
        let (alpha, beta) = pair();
        let (gamma, delta) = pair();
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn control(&self) -> PureState {
        PureState::qubit(self.alpha, self.beta).expect("validated input")
    }

    pub fn target(&self) -> PureState {
        PureState::qubit(self.gamma, self.delta).expect("validated input")
    }

    /// Two-qubit product state `control ⊗ target`.
    pub fn two_qubit_state(&self) -> PureState {
        tensor(&self.control(), &self.target()).expect("4 amplitudes")
    }

    /// Output of a perfect CNOT on this input.
    pub fn ideal_output(&self) -> PureState {
        let psi = self.two_qubit_state();
        psi.evolve(&metrics::cnot()).expect("CNOT is unitary")
    }
}

/// A state flowing through the protocol; pure until a channel mixes it.
#[derive(Debug, Clone, PartialEq)]
pub enum StageState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StageState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StageState::Pure(psi) => to_density(psi),
            StageState::Mixed(rho) => rho.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StageState::Pure(psi) => Some(psi),
            StageState::Mixed(_) => None,
        }
    }

    fn evolve(&self, op: &CMatrix) -> Result<StageState> {
        match self {
            StageState::Pure(psi) => psi.evolve(op).map(StageState::Pure),
            StageState::Mixed(rho) => {
                let out = op * rho.entries() * op.adjoint();
                let shift = (out.trace().re - rho.trace()).abs();
                if shift > CHANNEL_TOL {
                    return Err(IfmError::InvalidDensity(format!(
                        "stage changed the trace by {shift:e}"
                    )));
                }
                Ok(StageState::Mixed(DensityMatrix::from_parts_unchecked(
                    rho.dims().to_vec(),
                    out,
                )))
            }
        }
    }

    /// Weight on each (pulse label, control bit) pair.
    fn sector_weights(&self) -> [[f64; 2]; PULSE_DIM] {
        let pops: Vec<f64> = match self {
            StageState::Pure(psi) => psi.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
            StageState::Mixed(rho) => rho.diagonal(),
        };
        let mut w = [[0.0; 2]; PULSE_DIM];
        for (i, p) in pops.iter().enumerate() {
            w[i / 4][(i / 2) % 2] += p;
        }
        w
    }

    fn check_dims(&self) -> Result<()> {
        let dims = match self {
            StageState::Pure(psi) => psi.dims(),
            StageState::Mixed(rho) => rho.dims(),
        };
        if dims == GATE_DIMS {
            Ok(())
        } else {
            Err(IfmError::DimensionMismatch(format!(
                "gate state must have dims {GATE_DIMS:?}, got {dims:?}"
            )))
        }
    }
}

/// Named protocol stages for snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Initial,
    Routed,
    Interacted,
    Unrouted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub stage: Stage,
    pub state: StageState,
}

/// Pulse areas used by the target interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionAreas {
    pub pi: PulseArea,
    pub two_pi: PulseArea,
}

impl Default for InteractionAreas {
    fn default() -> Self {
        Self {
            pi: PulseArea::nominal(1),
            two_pi: PulseArea::nominal(2),
        }
    }
}

impl InteractionAreas {
    /// Nominal areas degraded by the deficits recorded in `log`.
    pub fn from_log(log: &NoiseLog) -> Result<Self> {
        Ok(Self {
            pi: perturb_area(PulseArea::nominal(1), log.epsilon_for(PulseRole::Pi))?,
            two_pi: perturb_area(PulseArea::nominal(2), log.epsilon_for(PulseRole::TwoPi))?,
        })
    }
}

fn full_index(config: PulseConfig, control: usize, target: usize) -> usize {
    config.index() * 4 + control * 2 + target
}

/// Forward pass through the cavity.
///
/// For each control bit `b` this acts on span{Launch, routed(b), LostForward}
/// as `Launch ↦ √(1-η) routed(b) + √η LostForward`, `routed(b) ↦ Launch`,
/// `LostForward ↦ -√η routed(b) + √(1-η) LostForward`, which is the unitary
/// completion of the routing isometry.
pub fn route_operator(eta: f64) -> CMatrix {
    leak_swap(PulseConfig::LostForward, eta, true)
}

/// Return pass: `routed(b) ↦ √(1-η) Launch + √η LostReturn`.
pub fn unroute_operator(eta: f64) -> CMatrix {
    leak_swap(PulseConfig::LostReturn, eta, false)
}

fn leak_swap(lost: PulseConfig, eta: f64, forward: bool) -> CMatrix {
    let keep = c((1.0 - eta).sqrt(), 0.0);
    let leak = c(eta.sqrt(), 0.0);
    let mut u = CMatrix::zeros(FULL_DIM, FULL_DIM);
    for control in 0..2 {
        let arm = PulseConfig::routed(control);
        let (from, to) = if forward {
            (PulseConfig::Launch, arm)
        } else {
            (arm, PulseConfig::Launch)
        };
        for target in 0..2 {
            let at = |cfg| full_index(cfg, control, target);
            u[(at(to), at(from))] = keep;
            u[(at(lost), at(from))] = leak;
            u[(at(from), at(to))] = ONE;
            u[(at(to), at(lost))] = -leak;
            u[(at(lost), at(lost))] = keep;
            for other in PulseConfig::ALL {
                if other != from && other != to && other != lost {
                    u[(at(other), at(other))] = ONE;
                }
            }
        }
    }
    u
}

/// Block-diagonal target interaction, including end-mirror phases.
pub fn interact_operator(s: &Scheme, areas: &InteractionAreas) -> CMatrix {
    let pi = rabi_unitary(areas.pi, s.conv);
    let two_pi = rabi_unitary(areas.two_pi, s.conv);
    let mut u = CMatrix::zeros(FULL_DIM, FULL_DIM);
    for config in PulseConfig::ALL {
        let on_target = match (config, s.variant, s.target_interaction) {
            (_, _, false) => linalg::identity(2),
            (PulseConfig::Reflected, _, true) => pi.clone(),
            (PulseConfig::Transmitted, SchemeVariant::DualPulse, true) => two_pi.clone(),
            _ => linalg::identity(2),
        };
        let phase = match config {
            PulseConfig::Reflected | PulseConfig::Transmitted => {
                Complex64::from_polar(1.0, s.mirror_phase(config))
            }
            _ => ONE,
        };
        let block = linalg::identity(2).kronecker(&on_target) * phase;
        let o = config.index() * 4;
        u.view_mut((o, o), (4, 4)).copy_from(&block);
    }
    u
}

/// Pulse at the launch configuration, times control and target.
pub fn initial_state(_s: &Scheme, input: &GateInput) -> Result<PureState> {
    input.validate()?;
    let pulse = PureState::basis(vec![PULSE_DIM], PulseConfig::Launch.index())?;
    tensor(&tensor(&pulse, &input.control())?, &input.target())
}

fn expect_sector(
    state: &StageState,
    ok: impl Fn(PulseConfig, usize) -> bool,
    stage: &str,
) -> Result<()> {
    state.check_dims()?;
    let w = state.sector_weights();
    let stray: f64 = PulseConfig::ALL
        .iter()
        .flat_map(|&cfg| (0..2).map(move |b| (cfg, b)))
        .filter(|&(cfg, b)| !ok(cfg, b))
        .map(|(cfg, b)| w[cfg.index()][b])
        .sum();
    if stray > SECTOR_TOL {
        Err(IfmError::Configuration(format!(
            "{stage}: weight {stray:e} outside the expected pulse configurations"
        )))
    } else {
        Ok(())
    }
}

fn routed_sector(cfg: PulseConfig, control: usize) -> bool {
    cfg == PulseConfig::routed(control) || cfg == PulseConfig::LostForward
}

fn route_state(state: &StageState, eta: f64) -> Result<StageState> {
    check_range("eta", eta, "[0, 1)", (0.0..1.0).contains(&eta))?;
    expect_sector(state, |cfg, _| cfg == PulseConfig::Launch, "route")?;
    state.evolve(&route_operator(eta))
}

fn interact_state(s: &Scheme, state: &StageState, areas: &InteractionAreas) -> Result<StageState> {
    expect_sector(state, routed_sector, "interact")?;
    state.evolve(&interact_operator(s, areas))
}

fn unroute_state(state: &StageState, eta: f64) -> Result<StageState> {
    check_range("eta", eta, "[0, 1)", (0.0..1.0).contains(&eta))?;
    expect_sector(state, routed_sector, "unroute")?;
    state.evolve(&unroute_operator(eta))
}

/// Forward pass: the pulse becomes entangled with the control.
pub fn route(_s: &Scheme, psi: &PureState, eta: f64) -> Result<PureState> {
    match route_state(&StageState::Pure(psi.clone()), eta)? {
        StageState::Pure(p) => Ok(p),
        StageState::Mixed(_) => unreachable!("unitary keeps pure states pure"),
    }
}

/// Pulses in arm 2 drive the target atom.
pub fn interact(s: &Scheme, psi: &PureState, areas: &InteractionAreas) -> Result<PureState> {
    match interact_state(s, &StageState::Pure(psi.clone()), areas)? {
        StageState::Pure(p) => Ok(p),
        StageState::Mixed(_) => unreachable!("unitary keeps pure states pure"),
    }
}

/// Return pass: undoes the routing.
pub fn unroute(_s: &Scheme, psi: &PureState, eta: f64) -> Result<PureState> {
    match unroute_state(&StageState::Pure(psi.clone()), eta)? {
        StageState::Pure(p) => Ok(p),
        StageState::Mixed(_) => unreachable!("unitary keeps pure states pure"),
    }
}

/// Projector onto the configurations where the pulse was not lost.
fn success_projector() -> CMatrix {
    let entries: Vec<Complex64> = (0..FULL_DIM)
        .map(|i| {
            if PulseConfig::from_index(i / 4).is_some_and(|cfg| !cfg.is_lost()) {
                ONE
            } else {
                ZERO
            }
        })
        .collect();
    linalg::diag(&entries)
}

/// Two-qubit state conditioned on the pulse not being lost, left unnormalized.
fn success_branch(full: &CMatrix) -> Result<CMatrix> {
    let p = success_projector();
    let kept = &p * full * &p;
    Ok(quantum::partial_trace_raw(&GATE_DIMS, &kept, &[CONTROL, TARGET])?.1)
}

/// Outcome of one execution of the gate.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scheme: Scheme,
    pub input: GateInput,
    /// Final state on pulse ⊗ control ⊗ target.
    pub final_state: DensityMatrix,
    /// Control–target state on the success branch; its trace is `success_prob`.
    pub output: DensityMatrix,
    /// `output` renormalized.
    pub post_selected: DensityMatrix,
    pub success_prob: f64,
    /// `⟨ideal|output|ideal⟩`, counting loss as failure.
    pub fidelity: f64,
    pub post_selected_fidelity: f64,
    pub concurrence: f64,
    /// Purity of the pulse-configuration factor.
    pub pulse_purity: f64,
    /// Purity of the whole probe, i.e. pulse plus any which-way record left
    /// in the environment. The global state of system and environment stays
    /// pure, so this equals the purity of the control–target state.
    pub probe_purity: f64,
    pub snapshots: Vec<Snapshot>,
    pub noise_log: NoiseLog,
}

/// Runs the whole protocol on one input.
pub fn run_gate(s: &Scheme, input: &GateInput, nm: &NoiseModel, seed: u64) -> Result<RunReport> {
    nm.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = NoiseLog::default();
    let (eta_forward, eta_return) = nm.pass_losses();
    let mut snapshots = Vec::with_capacity(4);

    let mut state = StageState::Pure(initial_state(s, input)?);
    snapshots.push(Snapshot {
        stage: Stage::Initial,
        state: state.clone(),
    });

    state = route_state(&state, eta_forward)?;
    state = noise::apply_noise_hooks(
        HookStage::PostRoute,
        state,
        nm,
        s.variant,
        &mut rng,
        &mut log,
    )?;
    snapshots.push(Snapshot {
        stage: Stage::Routed,
        state: state.clone(),
    });

    let areas = InteractionAreas::from_log(&log)?;
    state = interact_state(s, &state, &areas)?;
    state = noise::apply_noise_hooks(
        HookStage::PostInteract,
        state,
        nm,
        s.variant,
        &mut rng,
        &mut log,
    )?;
    snapshots.push(Snapshot {
        stage: Stage::Interacted,
        state: state.clone(),
    });

    state = unroute_state(&state, eta_return)?;
    snapshots.push(Snapshot {
        stage: Stage::Unrouted,
        state: state.clone(),
    });

    let final_state = state.to_density();
    let all_qubits = partial_trace(&final_state, &[CONTROL, TARGET])?;
    let pulse = partial_trace(&final_state, &[PULSE])?;
    let output =
        DensityMatrix::new_subnormalized(vec![2, 2], success_branch(final_state.entries())?)?;
    let (post_selected, success_prob) = output.normalized()?;
    let ideal = input.ideal_output();

    Ok(RunReport {
        scheme: *s,
        input: *input,
        fidelity: output.overlap(&ideal),
        post_selected_fidelity: post_selected.overlap(&ideal),
        concurrence: metrics::concurrence(&post_selected)?,
        pulse_purity: purity(&pulse),
        probe_purity: purity(&all_qubits),
        final_state,
        output,
        post_selected,
        success_prob,
        snapshots,
        noise_log: log,
    })
}

/// Pre-built stage operators for one noise realization.
struct Protocol {
    route: CMatrix,
    interact: CMatrix,
    unroute: CMatrix,
    dephasing: PathDephasing,
}

impl Protocol {
    fn new(s: &Scheme, nm: &NoiseModel, log: &NoiseLog) -> Result<Self> {
        nm.validate()?;
        let (eta_forward, eta_return) = nm.pass_losses();
        Ok(Self {
            route: route_operator(eta_forward),
            interact: interact_operator(s, &InteractionAreas::from_log(log)?),
            unroute: unroute_operator(eta_return),
            dephasing: PathDephasing::new(&GATE_DIMS, PULSE, nm.effective_dephasing(s.variant))?,
        })
    }

    /// Pushes an arbitrary operator on the full space through every stage.
    fn evolve_operator(&self, m: &CMatrix) -> CMatrix {
        let m = &self.route * m * self.route.adjoint();
        let m = self.dephasing.apply_raw(&m);
        let m = &self.interact * m * self.interact.adjoint();
        let m = self.dephasing.apply_raw(&m);
        &self.unroute * m * self.unroute.adjoint()
    }
}

/// The realized two-qubit map on the success branch for one noise
/// realization, reconstructed from its action on the 16 Pauli operators.
pub fn gate_channel_with_log(
    s: &Scheme,
    nm: &NoiseModel,
    log: &NoiseLog,
) -> Result<TwoQubitChannel> {
    let protocol = Protocol::new(s, nm, log)?;
    let mut launch = CMatrix::zeros(PULSE_DIM, PULSE_DIM);
    launch[(0, 0)] = ONE;
    TwoQubitChannel::from_pauli_inputs(|pauli| {
        let out = protocol.evolve_operator(&launch.kronecker(pauli));
        success_branch(&out)
    })
}

/// [`gate_channel_with_log`] with the noise realization `run_gate` would
/// draw from `seed`.
pub fn gate_channel(s: &Scheme, nm: &NoiseModel, seed: u64) -> Result<(TwoQubitChannel, NoiseLog)> {
    nm.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = NoiseLog::default();
    noise::draw_epsilons(nm, s.variant, &mut rng, &mut log);
    Ok((gate_channel_with_log(s, nm, &log)?, log))
}

/// The 4×4 operator the protocol realizes on control ⊗ target when the
/// pulse starts and ends at launch. Requires a dephasing-free model.
pub fn effective_gate(s: &Scheme, nm: &NoiseModel, seed: u64) -> Result<CMatrix> {
    if nm.effective_dephasing(s.variant) > 0.0 {
        return Err(IfmError::InvalidInput(
            "a dephased gate has no operator form".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = NoiseLog::default();
    noise::draw_epsilons(nm, s.variant, &mut rng, &mut log);
    let protocol = Protocol::new(s, nm, &log)?;
    let total = &protocol.unroute * &protocol.interact * &protocol.route;
    Ok(total.view((0, 0), (4, 4)).into_owned())
}
