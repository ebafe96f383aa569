//! Propagation under static and scheduled Hamiltonians.
//!
//! Scheduled evolution uses the exponential midpoint rule: each step applies
//! the exact exponential of the Hamiltonian at the step midpoint. Every step
//! is unitary, and the global error is second order in the step size.

use serde::{Deserialize, Serialize};

use crate::device::DeviceGraph;
use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::linalg::{CMatrix, CVector, Eigh};
use num_complex::Complex64 as C64;

/// Levels closer than this to the ground energy count as degenerate with it.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Number of diagnostic samples taken along an adiabatic ramp.
pub const RAMP_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepping {
    /// Uniform steps of `dt`.
    Fixed,
    /// Step doubling: each step is compared with two half steps and resized
    /// so the difference stays below `tolerance`. `dt` caps the step size.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub dt: f64,
    /// Re-run at half the step and fail if the results differ by more than `tolerance`.
    pub richardson_check: bool,
    pub tolerance: f64,
    pub stepping: Stepping,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self::for_scales(1.0, 1.0)
    }
}

impl PropagatorConfig {
    /// Fixed steps of `1e-3 * min(1/w, 1/u_max)`.
    pub fn for_scales(w: f64, u_max: f64) -> Self {
        let fastest = w.abs().max(u_max.abs()).max(f64::MIN_POSITIVE);
        PropagatorConfig { dt: 1e-3 / fastest, richardson_check: false, tolerance: 1e-9, stepping: Stepping::Fixed }
    }

    pub fn fixed(dt: f64) -> Self {
        PropagatorConfig { dt, richardson_check: false, tolerance: 1e-9, stepping: Stepping::Fixed }
    }

    pub fn adaptive(max_dt: f64, tolerance: f64) -> Self {
        PropagatorConfig { dt: max_dt, richardson_check: false, tolerance, stepping: Stepping::Adaptive }
    }

    pub fn with_richardson(mut self) -> Self {
        self.richardson_check = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Distance to the next level; zero when degenerate.
    pub gap: f64,
    /// The lowest level is degenerate within [`DEGENERACY_TOL`]; `state` is
    /// then one arbitrary member of the ground eigenspace.
    pub degenerate: bool,
}

pub fn ground_state(h: &CMatrix) -> Result<GroundState> {
    let eig = Eigh::new(h)?;
    let gap = if eig.values.len() > 1 { eig.values[1] - eig.values[0] } else { f64::INFINITY };
    let state = StateVector::normalized(eig.vector(0))?.fix_phase();
    Ok(GroundState { energy: eig.values[0], state, gap: gap.max(0.0), degenerate: gap <= DEGENERACY_TOL })
}

/// `exp(-i H duration) |state>` by exact diagonalization.
pub fn evolve_static(state: &StateVector, h: &CMatrix, duration: f64) -> Result<StateVector> {
    if h.nrows() != state.dim() {
        return Err(Error::Dimension { expected: state.dim(), actual: h.nrows() });
    }
    let eig = Eigh::new(h)?;
    StateVector::from_amplitudes(eig.propagate(state.amplitudes(), duration))
}

/// Largest norm defect a single exponential step may show before rounding is corrected.
pub const STEP_UNITARITY_TOL: f64 = 1e-12;

/// One exponential-midpoint step. The exponential is unitary, so any norm change
/// is rounding; left alone it accumulates to ~1e-10 over 10^5 steps, so the
/// result is rescaled to unit norm. Larger defects mean a broken step.
fn midpoint_step(g: &DeviceGraph, psi: &CVector, t: f64, h: f64) -> Result<CVector> {
    let ham = g.hamiltonian_unchecked(t + 0.5 * h);
    let mut out = Eigh::new_unchecked(&ham).propagate(psi, h);
    let before = psi.norm();
    let after = out.norm();
    if !after.is_finite() || (after - before).abs() > STEP_UNITARITY_TOL * before {
        return Err(Error::NotNormalized(after / before));
    }
    out *= C64::new(1.0 / after, 0.0);
    Ok(out)
}

fn run_fixed(g: &DeviceGraph, psi: &CVector, t0: f64, t1: f64, dt: f64) -> Result<CVector> {
    let n = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut psi = psi.clone();
    for i in 0..n {
        psi = midpoint_step(g, &psi, t0 + i as f64 * h, h)?;
    }
    Ok(psi)
}

fn run_adaptive(g: &DeviceGraph, psi: &CVector, t0: f64, t1: f64, max_dt: f64, tol: f64) -> Result<CVector> {
    let min_dt = (t1 - t0) * 1e-12;
    let mut psi = psi.clone();
    let mut t = t0;
    let mut h = max_dt.min(t1 - t0);
    while t < t1 {
        h = h.min(t1 - t).min(max_dt);
        let full = midpoint_step(g, &psi, t, h)?;
        let half = midpoint_step(g, &psi, t, 0.5 * h)?;
        let halves = midpoint_step(g, &half, t + 0.5 * h, 0.5 * h)?;
        let err = (&full - &halves).norm();
        if err <= tol || h <= min_dt {
            if err > tol {
                return Err(Error::Convergence { deviation: err, tolerance: tol });
            }
            psi = halves;
            t = if t1 - t - h <= min_dt { t1 } else { t + h };
            let grow = if err > 0.0 { 0.9 * (tol / err).cbrt() } else { 4.0 };
            h *= grow.clamp(0.2, 4.0);
        } else {
            h *= (0.9 * (tol / err).cbrt()).clamp(0.1, 0.5);
        }
    }
    Ok(psi)
}

fn run(g: &DeviceGraph, psi: &CVector, t0: f64, t1: f64, cfg: &PropagatorConfig, refine: bool) -> Result<CVector> {
    match (cfg.stepping, refine) {
        (Stepping::Fixed, false) => run_fixed(g, psi, t0, t1, cfg.dt),
        (Stepping::Fixed, true) => run_fixed(g, psi, t0, t1, 0.5 * cfg.dt),
        (Stepping::Adaptive, false) => run_adaptive(g, psi, t0, t1, cfg.dt, cfg.tolerance),
        (Stepping::Adaptive, true) => run_adaptive(g, psi, t0, t1, 0.5 * cfg.dt, cfg.tolerance / 8.0),
    }
}

/// Evolves `state` from `t0` to `t1` under the graph's scheduled Hamiltonian.
///
/// Schedules must be continuous on the open interval; sudden steps may only
/// sit at `t0` or `t1`.
pub fn evolve_scheduled(
    state: &StateVector,
    g: &DeviceGraph,
    t0: f64,
    t1: f64,
    cfg: &PropagatorConfig,
) -> Result<StateVector> {
    g.validate()?;
    cfg.validate()?;
    if state.dim() != g.dim() {
        return Err(Error::Dimension { expected: g.dim(), actual: state.dim() });
    }
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::InvalidParameter(format!("need t0 <= t1, got [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(state.clone());
    }
    if let Some(&ts) = g.discontinuities().iter().find(|&&ts| ts > t0 && ts < t1) {
        return Err(Error::StepInsideSegment(ts));
    }
    let psi = run(g, state.amplitudes(), t0, t1, cfg, false)?;
    let psi = if cfg.richardson_check {
        let finer = run(g, state.amplitudes(), t0, t1, cfg, true)?;
        let deviation = (&finer - &psi).norm();
        if deviation > cfg.tolerance {
            return Err(Error::Convergence { deviation, tolerance: cfg.tolerance });
        }
        finer
    } else {
        psi
    };
    StateVector::from_amplitudes(psi)
}

/// Spectral snapshot used by the ramp diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RampSample {
    pub t: f64,
    pub ground_energy: f64,
    /// Distance from the ground eigenspace to the next level.
    pub gap: f64,
    /// Weight of the state in the instantaneous ground eigenspace.
    pub ground_overlap: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RampDiagnostics {
    pub samples: Vec<RampSample>,
    pub min_gap: f64,
    pub initial_ground_overlap: f64,
    pub final_ground_overlap: f64,
    pub warnings: Vec<String>,
}

/// Ground eigenspace weight of `psi` and the gap above that eigenspace.
pub fn ground_space_overlap(h: &CMatrix, psi: &StateVector) -> Result<(f64, f64, f64)> {
    let eig = Eigh::new(h)?;
    let e0 = eig.values[0];
    let tol = DEGENERACY_TOL * e0.abs().max(1.0);
    let mut overlap = 0.0;
    let mut gap = f64::INFINITY;
    for (k, &e) in eig.values.iter().enumerate() {
        if e - e0 <= tol {
            overlap += eig.vector(k).dotc(psi.amplitudes()).norm_sqr();
        } else {
            gap = e - e0;
            break;
        }
    }
    Ok((e0, gap, overlap))
}

fn sample(g: &DeviceGraph, t: f64, psi: &StateVector) -> Result<RampSample> {
    let (ground_energy, gap, ground_overlap) = ground_space_overlap(&g.hamiltonian_unchecked(t), psi)?;
    Ok(RampSample { t, ground_energy, gap, ground_overlap, norm: psi.norm() })
}

/// Scheduled evolution with spectral diagnostics at [`RAMP_SAMPLES`] + 1 points.
pub fn adiabatic_ramp(
    state: &StateVector,
    g: &DeviceGraph,
    t0: f64,
    t1: f64,
    cfg: &PropagatorConfig,
) -> Result<(StateVector, RampDiagnostics)> {
    g.validate()?;
    if state.dim() != g.dim() {
        return Err(Error::Dimension { expected: g.dim(), actual: state.dim() });
    }
    let first = sample(g, t0, state)?;
    let mut warnings = Vec::new();
    if first.ground_overlap < 0.99 {
        warnings.push(format!(
            "initial state has only {:.4} weight in the ground space at t = {t0}",
            first.ground_overlap
        ));
    }
    let mut samples = vec![first];
    let mut psi = state.clone();
    if t1 > t0 {
        if let Some(&ts) = g.discontinuities().iter().find(|&&ts| ts > t0 && ts < t1) {
            return Err(Error::StepInsideSegment(ts));
        }
        let seg = (t1 - t0) / RAMP_SAMPLES as f64;
        for k in 0..RAMP_SAMPLES {
            let a = t0 + k as f64 * seg;
            let b = if k + 1 == RAMP_SAMPLES { t1 } else { a + seg };
            psi = evolve_scheduled(&psi, g, a, b, cfg)?;
            samples.push(sample(g, b, &psi)?);
        }
    } else if t1 < t0 {
        return Err(Error::InvalidParameter(format!("need t0 <= t1, got [{t0}, {t1}]")));
    }
    let min_gap = samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    let diagnostics = RampDiagnostics {
        min_gap,
        initial_ground_overlap: samples[0].ground_overlap,
        final_ground_overlap: samples.last().expect("at least one sample").ground_overlap,
        samples,
        warnings,
    };
    Ok((psi, diagnostics))
}
