// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Lossless symmetric Fabry-Perot cavity with a dispersive intracavity atom.
//!
//! Transmission follows the Airy function
//! `T = (1-r²)² / ((1-r²)² + 4r² sin²(Φ/2))` with `Φ = phi` for the ground
//! state and `Φ = phi + state_shift` for the excited state. Mirror
//! absorption is not modeled, so `R = 1 - T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Mirror amplitude reflectivity, in `[0, 1)`.
    pub r: f64,
    /// Round-trip phase with the atom in its ground state (radians).
    pub phi: f64,
    /// Extra round-trip phase when the atom is excited (radians).
    pub state_shift: f64,
}

impl CavityParams {
    pub fn new(r: f64, phi: f64, state_shift: f64) -> Result<Self> {
        let params = Self {
            r,
            phi,
            state_shift,
        };
        params.validate()?;
        Ok(params)
    }

    /// Ground state on resonance, excited state shifted by π.
    pub fn resonant(r: f64) -> Result<Self> {
        Self::new(r, 0.0, PI)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("cavity r", self.r, "[0, 1)", (0.0..1.0).contains(&self.r))?;
        check_range("cavity phi", self.phi, "finite", true)?;
        check_range("cavity state_shift", self.state_shift, "finite", true)
    }
}

/// Intensity transmission and reflection of the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    pub t: f64,
    pub r: f64,
}

pub fn airy_transmission(p: &CavityParams, ion_excited: bool) -> Transfer {
    let phase = p.phi + if ion_excited { p.state_shift } else { 0.0 };
    let r2 = p.r * p.r;
    let a = (1.0 - r2) * (1.0 - r2);
    let s = (phase / 2.0).sin();
    let t = a / (a + 4.0 * r2 * s * s);
    Transfer { t, r: 1.0 - t }
}

/// Worst-branch leakage `η = max(1 - T_ground, 1 - R_excited)`.
pub fn routing_error(p: &CavityParams) -> f64 {
    let ground = airy_transmission(p, false);
    let excited = airy_transmission(p, true);
    // 1 - R_excited is T_excited; use it directly to avoid cancellation.
    (1.0 - ground.t).max(excited.t)
}
