// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Rabi rotations of a two-level atom driven by a resonant pulse of given area.
//!
//! A pulse of area `qπ` rotates the Bloch vector by `qπ` about the x axis.
//! Two phase conventions are offered:
//!
//! * [`PhaseConvention::Ideal`] drops every pulse-induced phase. It is a
//!   real orthogonal matrix, equal to the bit flip `X` for a π pulse and to
//!   `+I` for a 2π pulse. Away from integer areas it is the real rotation
//!   `R(qπ/2) = [[cos, -sin], [sin, cos]]`, multiplied by `Z` for odd nominal
//!   pulses and by `-1` when `⌊n/2⌋` is odd, where `n` is the nominal area.
//!   That keeps a perturbed `(n-ε)π` pulse continuous in `ε` around `X^n`.
//! * [`PhaseConvention::PhysicalSu2`] is the spinor rotation
//!   `exp(-i (qπ/2) σx)`, so a 2π pulse gives `-I`.
//!
//! Both conventions produce identical transition probabilities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, IfmError, Result};
use crate::linalg::{c, CMatrix, I, ONE, ZERO};
use crate::quantum::PureState;

/// Pulse area in units of π, with an optional nominal integer tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseArea {
    q: f64,
    nominal: Option<u32>,
}

impl PulseArea {
    /// An untagged area of `q·π`.
    pub fn new(q: f64) -> Result<Self> {
        check_range("pulse area q", q, "[0, inf)", q >= 0.0)?;
        Ok(Self { q, nominal: None })
    }

    /// The ideal `nπ` pulse.
    pub fn nominal(n: u32) -> Self {
        Self {
            q: f64::from(n),
            nominal: Some(n),
        }
    }

    /// A tagged area; `q` must lie within one unit of `n`.
    pub fn tagged(q: f64, n: u32) -> Result<Self> {
        check_range("pulse area q", q, "[0, inf)", q >= 0.0)?;
        check_range(
            "pulse area q",
            q,
            "(n-1, n+1) for the nominal tag",
            (q - f64::from(n)).abs() < 1.0,
        )?;
        Ok(Self {
            q,
            nominal: Some(n),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn nominal_tag(&self) -> Option<u32> {
        self.nominal
    }

    /// Area deficit `n - q`; zero for untagged pulses.
    pub fn epsilon(&self) -> f64 {
        self.nominal.map_or(0.0, |n| f64::from(n) - self.q)
    }

    /// Rotation angle in radians.
    pub fn angle(&self) -> f64 {
        self.q * PI
    }

    /// Nominal integer used for the sign fix of the real convention.
    fn effective_nominal(&self) -> u32 {
        match self.nominal {
            Some(n) => n,
            None if self.q.fract() == 0.0 && self.q <= f64::from(u32::MAX) => self.q as u32,
            None => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// Pulse phases dropped: π pulse is exactly `X`, 2π pulse exactly `I`.
    #[default]
    #[serde(rename = "ideal")]
    Ideal,
    /// Spinor rotation `exp(-i θ/2 σx)`.
    #[serde(rename = "physical")]
    PhysicalSu2,
}

/// The 2×2 single-atom propagator for a pulse of the given area.
pub fn rabi_unitary(area: PulseArea, conv: PhaseConvention) -> CMatrix {
    let half = area.angle() / 2.0;
    let (s, co) = half.sin_cos();
    match conv {
        PhaseConvention::PhysicalSu2 => {
            let off = -I * s;
            CMatrix::from_row_slice(2, 2, &[c(co, 0.0), off, off, c(co, 0.0)])
        }
        PhaseConvention::Ideal => {
            let n = area.effective_nominal();
            if area.q == f64::from(n) {
                // exact integer areas: X^n without rounding noise
                return if n % 2 == 1 {
                    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
                } else {
                    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE])
                };
            }
            let sign = if (n / 2) % 2 == 1 { -1.0 } else { 1.0 };
            let rotation = [[co, -s], [s, co]];
            // right-multiplying by Z negates the second column
            let z = if n % 2 == 1 { -1.0 } else { 1.0 };
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(sign * rotation[0][0], 0.0),
                    c(sign * z * rotation[0][1], 0.0),
                    c(sign * rotation[1][0], 0.0),
                    c(sign * z * rotation[1][1], 0.0),
                ],
            )
        }
    }
}

/// Degrades a nominal `nπ` pulse to `(n-ε)π`.
pub fn perturb_area(nominal: PulseArea, epsilon: f64) -> Result<PulseArea> {
    check_range(
        "epsilon",
        epsilon,
        "[0, 0.5)",
        (0.0..0.5).contains(&epsilon),
    )?;
    let n = nominal
        .nominal
        .ok_or_else(|| IfmError::InvalidInput("only a nominal nπ pulse can be perturbed".into()))?;
    PulseArea::tagged(f64::from(n) - epsilon, n)
}

/// Drives the qubit at `qubit_index` with a pulse of the given area.
pub fn apply_to_qubit(
    psi: &PureState,
    qubit_index: usize,
    area: PulseArea,
    conv: PhaseConvention,
) -> Result<PureState> {
    match psi.dims().get(qubit_index) {
        None => Err(IfmError::SubsystemOutOfRange {
            index: qubit_index,
            count: psi.dims().len(),
        }),
        Some(2) => psi.apply_local(qubit_index, &rabi_unitary(area, conv)),
        Some(_) => Err(IfmError::NotAQubit(qubit_index)),
    }
}
