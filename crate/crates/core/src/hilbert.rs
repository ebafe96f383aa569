//! Logical Hilbert space of `N` charge qubits.
//!
//! Each double dot carries exactly one excess electron, so its state space is
//! two-dimensional: logical `|1>` means the electron sits on the odd (upper)
//! dot, logical `|0>` on the even (lower) one. Basis indices are little-endian:
//! qubit 0 is the least significant bit.
//!
//! Local operators follow the same convention. A `2^m x 2^m` matrix applied
//! to `targets` sees `targets[0]` as the least significant bit of its own
//! index, so a Kronecker product `A (x) B` acts with `B` on `targets[0]` and
//! with `A` on `targets[1]`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, Eigh};

/// Tolerance on `|psi|` for a vector to count as a state.
pub const NORM_TOL: f64 = 1e-9;
/// Branches lighter than this are physically empty and cannot be collapsed onto.
pub const COLLAPSE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl QubitId {
    /// The odd (upper) dot of this double dot, 1-based.
    pub fn upper_dot(self) -> u32 {
        2 * self.0 as u32 + 1
    }

    /// The even (lower) dot of this double dot, 1-based.
    pub fn lower_dot(self) -> u32 {
        2 * self.0 as u32 + 2
    }
}

impl From<usize> for QubitId {
    fn from(k: usize) -> Self {
        QubitId(k)
    }
}

/// Convenience for building target lists from plain indices.
pub fn qubits(ks: &[usize]) -> Vec<QubitId> {
    ks.iter().copied().map(QubitId).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    pub fn bit(self, k: QubitId) -> u8 {
        ((self.0 >> k.0) & 1) as u8
    }

    pub fn bits(self, n_qubits: usize) -> Vec<u8> {
        (0..n_qubits).map(|k| self.bit(QubitId(k))).collect()
    }
}

/// Maps a bit list (entry `k` is qubit `k`) to its basis index.
pub fn basis_index(bits: &[u8], n_qubits: usize) -> Result<BasisIndex> {
    if bits.len() != n_qubits {
        return Err(Error::Dimension { expected: n_qubits, actual: bits.len() });
    }
    let mut index = 0usize;
    for (k, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => index |= 1 << k,
            other => return Err(Error::InvalidBit(other)),
        }
    }
    Ok(BasisIndex(index))
}

fn log2_exact(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension { expected: dim.next_power_of_two().max(1), actual: dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_targets(targets: &[QubitId], n_qubits: usize) -> Result<()> {
    for (i, t) in targets.iter().enumerate() {
        if t.0 >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: t.0, n_qubits });
        }
        if targets[..i].contains(t) {
            return Err(Error::RepeatedTarget(t.0));
        }
    }
    Ok(())
}

/// Normalized pure state of `n_qubits` charge qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    n_qubits: usize,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOL`].
    pub fn from_amplitudes(amps: CVector) -> Result<Self> {
        let n_qubits = log2_exact(amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps, n_qubits })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let n_qubits = log2_exact(amps.len())?;
        let norm = amps.norm();
        if norm < COLLAPSE_THRESHOLD || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps: amps / C64::new(norm, 0.0), n_qubits })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::from_amplitudes(CVector::from_column_slice(amps))
    }

    pub fn basis(n_qubits: usize, index: BasisIndex) -> Self {
        let mut amps = CVector::zeros(1 << n_qubits);
        amps[index.0] = C64::new(1.0, 0.0);
        StateVector { amps, n_qubits }
    }

    /// `alpha|0> + beta|1>` for a single qubit.
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::from_slice(&[alpha, beta])
    }

    /// Product of states listed in qubit order (element 0 becomes the low qubits).
    pub fn product(parts: &[StateVector]) -> Self {
        let mut iter = parts.iter();
        let first = iter.next().expect("product of zero states").clone();
        iter.fold(first, |acc, p| acc.tensor(p))
    }

    /// `high (x) self`: `self` keeps qubits `0..n`, `high` is appended above them.
    pub fn tensor(&self, high: &StateVector) -> StateVector {
        StateVector {
            amps: high.amps.kronecker(&self.amps),
            n_qubits: self.n_qubits + high.n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn amplitude(&self, index: BasisIndex) -> C64 {
        self.amps[index.0]
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: other.dim() });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        StateVector { amps: &self.amps * C64::from_polar(1.0, theta), n_qubits: self.n_qubits }
    }

    /// Rotates the global phase so the largest-magnitude amplitude is real
    /// and positive. Ties go to the lowest index.
    pub fn fix_phase(&self) -> StateVector {
        let max = self.amps.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let pivot = self
            .amps
            .iter()
            .position(|z| z.norm() >= max * (1.0 - 1e-9))
            .unwrap_or(0);
        let z = self.amps[pivot];
        if z.norm() == 0.0 {
            return self.clone();
        }
        StateVector { amps: &self.amps * (z.conj() / z.norm()), n_qubits: self.n_qubits }
    }

    /// Largest amplitude-wise distance after aligning global phases.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        let aligned = &self.amps * phase;
        Ok((aligned - &other.amps).camax())
    }

    /// Applies a unitary on `targets`; fails if the result leaves the unit sphere.
    pub fn apply_unitary(&self, op: &CMatrix, targets: &[QubitId]) -> Result<StateVector> {
        let amps = apply_local(&self.amps, op, targets)?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps, n_qubits: self.n_qubits })
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix { mat: &self.amps * self.amps.adjoint(), n_qubits: self.n_qubits }
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Applies `op` to the qubits in `targets` of a raw amplitude vector.
///
/// The result is not renormalized: projectors and other non-unitary terms
/// are allowed.
pub fn apply_local(amps: &CVector, op: &CMatrix, targets: &[QubitId]) -> Result<CVector> {
    let n_qubits = log2_exact(amps.len())?;
    if targets.is_empty() {
        return Err(Error::EmptySelection);
    }
    check_targets(targets, n_qubits)?;
    let m = targets.len();
    let local_dim = 1usize << m;
    if op.nrows() != local_dim || op.ncols() != local_dim {
        return Err(Error::Dimension { expected: local_dim, actual: op.nrows() });
    }

    let target_mask: usize = targets.iter().fold(0, |acc, t| acc | (1 << t.0));
    // full-register offset of each local basis index
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| (l >> j) & 1 == 1)
                .fold(0, |acc, (_, t)| acc | (1 << t.0))
        })
        .collect();

    let mut out = CVector::zeros(amps.len());
    let mut local = vec![C64::new(0.0, 0.0); local_dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            local[l] = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, x) in local.iter().enumerate() {
                acc += op[(row, col)] * x;
            }
            out[base | off] = acc;
        }
    }
    Ok(out)
}

/// Reduced state over `keep`. Qubit `keep[j]` becomes qubit `j` of the result.
pub fn partial_trace(state: &StateVector, keep: &[QubitId]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    let n = state.n_qubits();
    check_targets(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(&QubitId(*k))).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();

    let full_index = |kept: usize, env: usize| -> usize {
        let mut idx = 0;
        for (j, q) in keep.iter().enumerate() {
            idx |= ((kept >> j) & 1) << q.0;
        }
        for (j, &q) in traced.iter().enumerate() {
            idx |= ((env >> j) & 1) << q;
        }
        idx
    };

    let amps = state.amplitudes();
    let mut rho = CMatrix::zeros(kd, kd);
    for env in 0..td {
        for i in 0..kd {
            let ai = amps[full_index(i, env)];
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..kd {
                rho[(i, j)] += ai * amps[full_index(j, env)].conj();
            }
        }
    }
    Ok(DensityMatrix { mat: rho, n_qubits: keep.len() })
}

/// Mixed state; Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Dimension { expected: mat.nrows(), actual: mat.ncols() });
        }
        let n_qubits = log2_exact(mat.nrows())?;
        crate::linalg::check_hermitian(&mat)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(DensityMatrix { mat, n_qubits })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DensityMatrix { mat: CMatrix::identity(d, d) / C64::new(d as f64, 0.0), n_qubits }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        Eigh::new_unchecked(&self.mat).values
    }

    /// `U rho U^dagger` for a unitary on the full register.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: u.nrows() });
        }
        Ok(DensityMatrix { mat: u * &self.mat * u.adjoint(), n_qubits: self.n_qubits })
    }

    /// Eigenvector of the largest eigenvalue, phase-fixed.
    pub fn principal_state(&self) -> StateVector {
        let eig = Eigh::new_unchecked(&self.mat);
        let v = eig.vector(self.dim() - 1);
        StateVector::normalized(v).expect("eigenvectors have unit norm").fix_phase()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Half the trace norm of `self - other`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: other.dim() });
        }
        let diff = &self.mat - &other.mat;
        let eig = Eigh::new_unchecked(&diff);
        Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// Seeded generator for sampled measurements.
#[derive(Debug, Clone)]
pub struct Sampler(ChaCha8Rng);

impl Sampler {
    pub fn from_seed(seed: u64) -> Self {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }
}

#[derive(Debug)]
pub enum MeasureMode<'a> {
    /// Return both branches, draw nothing.
    Deterministic,
    Sampled(&'a mut Sampler),
}

/// Outcome of a single-qubit charge measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub probabilities: [f64; 2],
    /// Renormalized post-measurement states; `None` for empty branches.
    pub collapsed: [Option<StateVector>; 2],
    pub outcome: Option<u8>,
}

impl Measurement {
    pub fn p0(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn p1(&self) -> f64 {
        self.probabilities[1]
    }

    pub fn branch(&self, outcome: u8) -> Result<&StateVector> {
        let k = usize::from(outcome & 1);
        self.collapsed[k].as_ref().ok_or(Error::DegenerateBranch(self.probabilities[k]))
    }
}

/// Projective measurement of qubit `k` in the charge basis.
pub fn measure_qubit(state: &StateVector, k: QubitId, mode: MeasureMode<'_>) -> Result<Measurement> {
    check_targets(&[k], state.n_qubits())?;
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let mask = 1usize << k.0;
    let mut branches = [state.amps.clone(), state.amps.clone()];
    for i in 0..state.dim() {
        let bit = usize::from(i & mask != 0);
        branches[1 - bit][i] = C64::new(0.0, 0.0);
    }
    let p1 = branches[1].norm_squared();
    let p0 = 1.0 - p1;
    let p0 = p0.max(0.0);
    let probabilities = [p0, p1];

    let collapse = |amps: &CVector, p: f64| -> Option<StateVector> {
        if p < COLLAPSE_THRESHOLD {
            None
        } else {
            Some(StateVector { amps: amps / C64::new(p.sqrt(), 0.0), n_qubits: state.n_qubits })
        }
    };
    let collapsed = [collapse(&branches[0], p0), collapse(&branches[1], p1)];

    let outcome = match mode {
        MeasureMode::Deterministic => None,
        MeasureMode::Sampled(sampler) => {
            let o = if sampler.uniform() < p0 { 0u8 } else { 1u8 };
            if collapsed[usize::from(o)].is_none() {
                return Err(Error::DegenerateBranch(probabilities[usize::from(o)]));
            }
            Some(o)
        }
    };
    Ok(Measurement { probabilities, collapsed, outcome })
}

/// Either kind of state, as the first argument of [`fidelity`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

/// `|<a|b>|^2` for pure `a`, `<b|rho|b>` for mixed `a`. Clamped to `[0, 1]`.
pub fn fidelity<'a>(a: impl Into<StateRef<'a>>, b: &StateVector) -> Result<f64> {
    let f = match a.into() {
        StateRef::Pure(a) => a.inner(b)?.norm_sqr(),
        StateRef::Mixed(rho) => {
            if rho.dim() != b.dim() {
                return Err(Error::Dimension { expected: rho.dim(), actual: b.dim() });
            }
            b.amps.dotc(&(&rho.mat * &b.amps)).re
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Single-qubit operators in the charge basis `(|0>, |1>)`.
pub mod ops {
    use super::*;
    use crate::linalg::{c, real};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
    }

    pub fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), c(0.0, -1.0), c(0.0, 1.0), real(0.0)])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)])
    }

    /// `|0><0|`: electron on the even dot.
    pub fn proj0() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(0.0)])
    }

    /// `|1><1|`: electron on the odd dot.
    pub fn proj1() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(0.0), real(0.0), real(0.0), real(1.0)])
    }

    pub fn diag(a: C64, b: C64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[a, real(0.0), real(0.0), b])
    }

    /// `A (x) B` as a two-target operator: `b` acts on `targets[0]`, `a` on `targets[1]`.
    pub fn pair(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }
}
