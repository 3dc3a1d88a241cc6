// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Dense states and density matrices on a composite Hilbert space.
//!
//! Subsystems are listed most-significant first, so the amplitude index of
//! a basis ket `|i_0 i_1 ... i_k⟩` is the mixed-radix number with digits
//! `i_0 .. i_k`. The gate uses the fixed order (pulse configuration,
//! control, target); chains append further qubits after the target.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IfmError, Result};
use crate::linalg::{self, CMatrix, CVector};

/// A complex probability amplitude.
pub type Amplitude = Complex64;

/// Default cap on the number of amplitudes a state may hold.
pub const MAX_AMPLITUDES: usize = 1 << 20;

/// Tolerance for unitary algebra.
pub const UNITARY_TOL: f64 = 1e-12;

/// Tolerance for channel algebra.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Eigenvalues of a density matrix may dip this far below zero.
pub const PSD_TOL: f64 = 1e-9;

fn total_dim(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        if d == 0 {
            return Err(IfmError::DimensionMismatch(
                "subsystem of dimension zero".into(),
            ));
        }
        acc.checked_mul(d).ok_or(IfmError::DimensionOverflow {
            requested: usize::MAX,
            limit: MAX_AMPLITUDES,
        })
    })
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl PureState {
    /// Builds a state from amplitudes that must already have unit norm.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Amplitude>) -> Result<Self> {
        let state = Self::from_raw(dims, CVector::from_vec(amplitudes))?;
        let norm = state.norm();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(IfmError::NotNormalized(norm));
        }
        Ok(state)
    }

    fn from_raw(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let dim = total_dim(&dims)?;
        if dim > MAX_AMPLITUDES {
            return Err(IfmError::DimensionOverflow {
                requested: dim,
                limit: MAX_AMPLITUDES,
            });
        }
        if amplitudes.len() != dim {
            return Err(IfmError::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(IfmError::NonFinite);
        }
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis ket `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim = total_dim(&dims)?;
        if index >= dim {
            return Err(IfmError::DimensionMismatch(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = linalg::ONE;
        Self::from_raw(dims, amps)
    }

    /// Single qubit `a|0⟩ + b|1⟩`.
    pub fn qubit(a: Amplitude, b: Amplitude) -> Result<Self> {
        Self::new(vec![2], vec![a, b])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &PureState) -> Amplitude {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Applies an operator on the whole space. The result must stay
    /// normalized, so only unitaries (or isometries on the support) pass.
    pub fn evolve(&self, op: &CMatrix) -> Result<PureState> {
        if op.ncols() != self.dim() || op.nrows() != self.dim() {
            return Err(IfmError::DimensionMismatch(format!(
                "{}x{} operator on dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        let out = PureState::from_raw(self.dims.clone(), op * &self.amplitudes)?;
        let norm = out.norm();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(IfmError::NotNormalized(norm));
        }
        Ok(out)
    }

    /// Applies `op` to one subsystem, identity elsewhere.
    pub fn apply_local(&self, subsystem: usize, op: &CMatrix) -> Result<PureState> {
        let full = embed_local(&self.dims, subsystem, op)?;
        self.evolve(&full)
    }

    /// Squared norm of the components whose digit on `subsystem` lies in `labels`.
    pub fn weight_on(&self, subsystem: usize, labels: &[usize]) -> Result<f64> {
        check_subsystem(&self.dims, subsystem)?;
        let (outer, d, inner) = split_dims(&self.dims, subsystem);
        let mut w = 0.0;
        for o in 0..outer {
            for &l in labels {
                for i in 0..inner {
                    w += self.amplitudes[(o * d + l) * inner + i].norm_sqr();
                }
            }
        }
        Ok(w)
    }
}

/// Tensor product with the default amplitude cap.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    tensor_with_limit(a, b, MAX_AMPLITUDES)
}

pub fn tensor_with_limit(a: &PureState, b: &PureState, limit: usize) -> Result<PureState> {
    let requested = a.dim().saturating_mul(b.dim());
    if requested > limit {
        return Err(IfmError::DimensionOverflow { requested, limit });
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    PureState::from_raw(dims, a.amplitudes.kronecker(&b.amplitudes))
}

/// Normalizes a raw amplitude vector, returning the state and the original norm.
pub fn normalize(dims: Vec<usize>, amplitudes: Vec<Amplitude>) -> Result<(PureState, f64)> {
    let raw = CVector::from_vec(amplitudes);
    let norm = raw.norm();
    if !norm.is_finite() {
        return Err(IfmError::NonFinite);
    }
    if norm == 0.0 {
        return Err(IfmError::ZeroVector);
    }
    let state = PureState::from_raw(dims, raw.unscale(norm))?;
    Ok((state, norm))
}

/// Outer product `|ψ⟩⟨ψ|`.
pub fn to_density(psi: &PureState) -> DensityMatrix {
    DensityMatrix {
        dims: psi.dims.clone(),
        entries: &psi.amplitudes * psi.amplitudes.adjoint(),
    }
}

/// A Hermitian positive semidefinite operator with trace at most one.
///
/// Unit trace is the normal case. A trace below one is allowed for the
/// success-branch view of a lossy run, where the missing weight is the
/// failure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validated unit-trace density matrix.
    pub fn new(dims: Vec<usize>, entries: CMatrix) -> Result<Self> {
        let rho = Self::new_subnormalized(dims, entries)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > CHANNEL_TOL {
            return Err(IfmError::InvalidDensity(format!("trace {tr} != 1")));
        }
        Ok(rho)
    }

    /// Validated density matrix whose trace may lie anywhere in `[0, 1]`.
    pub fn new_subnormalized(dims: Vec<usize>, entries: CMatrix) -> Result<Self> {
        let dim = total_dim(&dims)?;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(IfmError::DimensionMismatch(format!(
                "{}x{} matrix for dims {:?}",
                entries.nrows(),
                entries.ncols(),
                dims
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(IfmError::NonFinite);
        }
        let defect = linalg::hermiticity_defect(&entries);
        if defect > CHANNEL_TOL {
            return Err(IfmError::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = entries.trace().re;
        if !(-CHANNEL_TOL..=1.0 + CHANNEL_TOL).contains(&tr) {
            return Err(IfmError::InvalidDensity(format!(
                "trace {tr} outside [0, 1]"
            )));
        }
        let values = linalg::hermitian_eigenvalues(&entries);
        if let Some(min) = values.iter().copied().reduce(f64::min) {
            if min < -PSD_TOL {
                return Err(IfmError::InvalidDensity(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { dims, entries })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, entries: CMatrix) -> Self {
        Self { dims, entries }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let dim = total_dim(&dims)?;
        Ok(Self {
            dims,
            entries: linalg::identity(dim).unscale(dim as f64),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Rescales to unit trace; fails on a zero matrix.
    pub fn normalized(&self) -> Result<(DensityMatrix, f64)> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(IfmError::ZeroVector);
        }
        Ok((
            DensityMatrix {
                dims: self.dims.clone(),
                entries: self.entries.unscale(tr),
            },
            tr,
        ))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            entries: self.entries.kronecker(&other.entries),
        }
    }

    /// Expectation `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &PureState) -> f64 {
        psi.amplitudes.dotc(&(&self.entries * &psi.amplitudes)).re
    }

    /// Populations on the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Reduces `rho` onto the subsystems listed in `keep`, which are returned
/// in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (dims, entries) = partial_trace_raw(&rho.dims, &rho.entries, keep)?;
    Ok(DensityMatrix { dims, entries })
}

/// Partial trace on a bare operator; works for any square matrix, not only
/// states, which the channel reconstruction relies on.
pub fn partial_trace_raw(
    dims: &[usize],
    m: &CMatrix,
    keep: &[usize],
) -> Result<(Vec<usize>, CMatrix)> {
    if keep.is_empty() {
        return Err(IfmError::EmptyKeepSet);
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &k in &keep {
        check_subsystem(dims, k)?;
    }
    let n = dims.len();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_dim: usize = kept_dims.iter().product();
    let traced_dim: usize = traced_dims.iter().product();

    let strides = strides(dims);
    let offset = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept_idx;
        for (pos, &k) in keep.iter().enumerate().rev() {
            idx += (rem % kept_dims[pos]) * strides[k];
            rem /= kept_dims[pos];
        }
        let mut rem = traced_idx;
        for (pos, &t) in traced.iter().enumerate().rev() {
            idx += (rem % traced_dims[pos]) * strides[t];
            rem /= traced_dims[pos];
        }
        idx
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        for col in 0..kept_dim {
            let mut acc = linalg::ZERO;
            for t in 0..traced_dim {
                acc += m[(offset(r, t), offset(col, t))];
            }
            out[(r, col)] = acc;
        }
    }
    Ok((kept_dims, out))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn check_subsystem(dims: &[usize], index: usize) -> Result<()> {
    if index >= dims.len() {
        Err(IfmError::SubsystemOutOfRange {
            index,
            count: dims.len(),
        })
    } else {
        Ok(())
    }
}

/// (dimension before, dimension of, dimension after) the given subsystem.
fn split_dims(dims: &[usize], subsystem: usize) -> (usize, usize, usize) {
    let outer = dims[..subsystem].iter().product();
    let inner = dims[subsystem + 1..].iter().product();
    (outer, dims[subsystem], inner)
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` on `subsystem`.
pub fn embed_local(dims: &[usize], subsystem: usize, op: &CMatrix) -> Result<CMatrix> {
    check_subsystem(dims, subsystem)?;
    let (outer, d, inner) = split_dims(dims, subsystem);
    if op.nrows() != d || op.ncols() != d {
        return Err(IfmError::DimensionMismatch(format!(
            "{}x{} operator on subsystem of dimension {d}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(linalg::identity(outer)
        .kronecker(op)
        .kronecker(&linalg::identity(inner)))
}

/// Serializable snapshot of a complex matrix as `[re, im]` pairs, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixRecord {
    fn from(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                let z = m[(r, col)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }
}
