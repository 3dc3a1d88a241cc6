// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Imperfections layered on the ideal protocol: which-way dephasing of the
//! pulse path, pulse-area deficits from photon loss, and routing leakage.
//!
//! Dephasing acts on the pulse-configuration subsystem with Kraus operators
//! `√(1-p) I` and `√p Π_k` (one projector per configuration label), which
//! scales every coherence between distinct labels by `1 - p`. The dual-pulse
//! scheme sees the reduced strength `p·κ`, where `κ` measures how
//! distinguishable the two pulses are; `κ = 0` means a stray photon carries
//! no which-way record at all.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, IfmError, Result};
use crate::gate::{SchemeVariant, StageState, PULSE};
use crate::linalg::{self, CMatrix};
use crate::quantum::{DensityMatrix, CHANNEL_TOL};

/// Distribution of the pulse-area deficit `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonDist {
    #[default]
    None,
    Fixed(f64),
    /// Uniform on `[0, max)`.
    Uniform(f64),
}

/// Which passes through the cavity leak amplitude to the lost label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossPasses {
    #[default]
    Both,
    ForwardOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Which-way dephasing probability per traversal, in `[0, 1]`.
    pub p_dephase: f64,
    pub epsilon: EpsilonDist,
    /// Routing leakage `1 - R`, in `[0, 1)`.
    pub eta: f64,
    /// Pulse distinguishability for the dual-pulse scheme, in `[0, 1]`.
    pub kappa: f64,
    pub loss_passes: LossPasses,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub const fn ideal() -> Self {
        Self {
            p_dephase: 0.0,
            epsilon: EpsilonDist::None,
            eta: 0.0,
            kappa: 0.0,
            loss_passes: LossPasses::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range(
            "p_dephase",
            self.p_dephase,
            "[0, 1]",
            (0.0..=1.0).contains(&self.p_dephase),
        )?;
        check_range("eta", self.eta, "[0, 1)", (0.0..1.0).contains(&self.eta))?;
        check_range(
            "kappa",
            self.kappa,
            "[0, 1]",
            (0.0..=1.0).contains(&self.kappa),
        )?;
        match self.epsilon {
            EpsilonDist::None => Ok(()),
            EpsilonDist::Fixed(e) => check_range("epsilon", e, "[0, 0.5)", (0.0..0.5).contains(&e)),
            EpsilonDist::Uniform(m) => {
                check_range("epsilon max", m, "[0, 0.5]", (0.0..=0.5).contains(&m))
            }
        }
    }

    /// True when running the model draws from the RNG.
    pub fn consumes_seed(&self) -> bool {
        matches!(self.epsilon, EpsilonDist::Uniform(m) if m > 0.0)
    }

    pub fn is_identity(&self) -> bool {
        self.p_dephase == 0.0
            && self.eta == 0.0
            && matches!(self.epsilon, EpsilonDist::None | EpsilonDist::Fixed(0.0))
    }

    /// Dephasing strength seen by the given scheme.
    pub fn effective_dephasing(&self, variant: SchemeVariant) -> f64 {
        match variant {
            SchemeVariant::SinglePulse => self.p_dephase,
            SchemeVariant::DualPulse => self.p_dephase * self.kappa,
        }
    }

    /// Leakage on the forward and return passes.
    pub fn pass_losses(&self) -> (f64, f64) {
        match self.loss_passes {
            LossPasses::Both => (self.eta, self.eta),
            LossPasses::ForwardOnly => (self.eta, 0.0),
        }
    }
}

/// Path dephasing on one subsystem, kept in Kraus form.
#[derive(Debug, Clone)]
pub struct PathDephasing {
    p: f64,
    dims: Vec<usize>,
    subsystem: usize,
}

impl PathDephasing {
    pub fn new(dims: &[usize], subsystem: usize, p: f64) -> Result<Self> {
        check_range("dephasing p", p, "[0, 1]", (0.0..=1.0).contains(&p))?;
        if subsystem >= dims.len() {
            return Err(IfmError::SubsystemOutOfRange {
                index: subsystem,
                count: dims.len(),
            });
        }
        let channel = Self {
            p,
            dims: dims.to_vec(),
            subsystem,
        };
        let completeness = channel
            .kraus_operators()
            .iter()
            .fold(CMatrix::zeros(channel.dim(), channel.dim()), |acc, k| {
                acc + k.adjoint() * k
            });
        debug_assert!(
            linalg::max_abs_diff(&completeness, &linalg::identity(channel.dim())) < CHANNEL_TOL
        );
        Ok(channel)
    }

    fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        let d = self.dims[self.subsystem];
        let mut ops = vec![linalg::identity(self.dim()).scale((1.0 - self.p).sqrt())];
        for label in 0..d {
            let mut proj = CMatrix::zeros(d, d);
            proj[(label, label)] = linalg::ONE;
            let full = crate::quantum::embed_local(&self.dims, self.subsystem, &proj)
                .expect("subsystem checked in constructor");
            ops.push(full.scale(self.p.sqrt()));
        }
        ops
    }

    /// Applies the channel by scaling cross-label coherences.
    pub fn apply_raw(&self, m: &CMatrix) -> CMatrix {
        if self.p == 0.0 {
            return m.clone();
        }
        let inner: usize = self.dims[self.subsystem + 1..].iter().product();
        let d = self.dims[self.subsystem];
        let label = |i: usize| (i / inner) % d;
        let keep = 1.0 - self.p;
        CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
            if label(r) == label(col) {
                m[(r, col)]
            } else {
                m[(r, col)] * keep
            }
        })
    }

    /// Applies the channel as `Σ K ρ K†`.
    pub fn apply_kraus(&self, m: &CMatrix) -> CMatrix {
        self.kraus_operators()
            .iter()
            .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, k| {
                acc + k * m * k.adjoint()
            })
    }
}

/// Dephases the pulse path (subsystem 0) of `rho` with probability `p`.
pub fn dephase_path(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    let channel = PathDephasing::new(rho.dims(), PULSE, p)?;
    Ok(DensityMatrix::from_parts_unchecked(
        rho.dims().to_vec(),
        channel.apply_raw(rho.entries()),
    ))
}

pub fn sample_epsilon<R: Rng + ?Sized>(dist: EpsilonDist, rng: &mut R) -> f64 {
    match dist {
        EpsilonDist::None => 0.0,
        EpsilonDist::Fixed(e) => e,
        EpsilonDist::Uniform(max) if max > 0.0 => rng.random_range(0.0..max),
        EpsilonDist::Uniform(_) => 0.0,
    }
}

/// Protocol points where noise acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HookStage {
    PostRoute,
    PostInteract,
}

/// Which pulse an area draw belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseRole {
    Pi,
    TwoPi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonDraw {
    pub pulse: PulseRole,
    pub epsilon: f64,
}

/// Every stochastic draw made during one run, in draw order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseLog {
    pub draws: Vec<EpsilonDraw>,
}

impl NoiseLog {
    pub fn epsilon_for(&self, pulse: PulseRole) -> f64 {
        self.draws
            .iter()
            .find(|d| d.pulse == pulse)
            .map_or(0.0, |d| d.epsilon)
    }
}

/// Draws the area deficits of every pulse of the scheme, π pulse first.
pub fn draw_epsilons<R: Rng + ?Sized>(
    nm: &NoiseModel,
    variant: SchemeVariant,
    rng: &mut R,
    log: &mut NoiseLog,
) {
    log.draws.push(EpsilonDraw {
        pulse: PulseRole::Pi,
        epsilon: sample_epsilon(nm.epsilon, rng),
    });
    if variant == SchemeVariant::DualPulse {
        log.draws.push(EpsilonDraw {
            pulse: PulseRole::TwoPi,
            epsilon: sample_epsilon(nm.epsilon, rng),
        });
    }
}

/// Applies the noise bound to `stage`. After routing this samples the area
/// deficits consumed by the interaction, then both hooks dephase the path.
pub fn apply_noise_hooks<R: Rng + ?Sized>(
    stage: HookStage,
    state: StageState,
    nm: &NoiseModel,
    variant: SchemeVariant,
    rng: &mut R,
    log: &mut NoiseLog,
) -> Result<StageState> {
    if stage == HookStage::PostRoute {
        draw_epsilons(nm, variant, rng, log);
    }
    let p = nm.effective_dephasing(variant);
    if p == 0.0 {
        return Ok(state);
    }
    let rho = state.to_density();
    Ok(StageState::Mixed(dephase_path(&rho, p)?))
}
