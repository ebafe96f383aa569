//! Teleportation along a chain of double dots.
//!
//! The register holds the encoder (qubit 0) followed by `n_support` support
//! qubits; Bob is the last one. The support chain is driven into
//! `(|0...0> + |1...1>)/sqrt(2)` by ramping all nearest-neighbour links together.
//!
//! After the Bell stage, Bob is still correlated with the intermediate support
//! qubits (`2..n_support`). Leaving them alone would reduce Bob to the mixture
//! `|alpha|^2 |0><0| + |beta|^2 |1><1|`. Each intermediate is therefore read out
//! in the conjugate basis: a tunneling pulse `R = exp(-i H t)` with `w t = pi/4`,
//! then a charge measurement. Every bit `m` contributes the phase
//! `<m|R|0> / <m|R|1>` to Bob's correction.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceGraph, Schedule};
use crate::error::{Error, Result};
use crate::evolve::{adiabatic_ramp, evolve_static, ground_state, RampDiagnostics};
use crate::hilbert::{BasisIndex, QubitId, StateVector};
use crate::linalg::{real, CVector, Eigh};
use crate::protocol::{
    bell_evolution, couple_unknown, effective_bell_unitary, encode_qubit, ghz_like, readout_and_correct, full_correction, chain_links, wait_time,
    InputQubit, Mode, ProtocolParams, StageLog, TeleportChannel, TeleportResult, ENCODER,
};

/// Largest register the dense simulation accepts.
pub const QUBIT_BUDGET: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// Number of support double dots; Bob is the last of them.
    pub n_support: usize,
    /// `U_max` and `T_ent` drive the chain ramp, `Uprime_max` and `T_couple` the encoder coupling.
    pub params: ProtocolParams,
}

impl ChainSpec {
    pub fn new(n_support: usize, params: ProtocolParams) -> Result<Self> {
        let spec = ChainSpec { n_support, params };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_support < 2 {
            return Err(Error::InvalidParameter(format!("a chain needs at least 2 support qubits, got {}", self.n_support)));
        }
        if self.n_qubits() > QUBIT_BUDGET {
            return Err(Error::QubitBudget { requested: self.n_qubits(), budget: QUBIT_BUDGET });
        }
        self.params.validate()
    }

    /// Encoder plus support.
    pub fn n_qubits(&self) -> usize {
        self.n_support + 1
    }

    /// Intermediate support qubits in the full register (neither Alice's nor Bob's).
    pub fn intermediates(&self) -> Vec<QubitId> {
        (2..self.n_support).map(QubitId).collect()
    }
}

/// Support-only register: every qubit tunnels, every link ramps `0 -> U_max` over `T_ent`.
pub fn ghz_chain_graph(spec: &ChainSpec) -> DeviceGraph {
    let p = &spec.params;
    let mut g = DeviceGraph::new(spec.n_support);
    for k in 0..spec.n_support {
        g = g.with_tunneling(k, Schedule::constant(p.w), 0.0);
    }
    chain_links(g, 0, spec.n_support, &Schedule::smooth(0.0, p.u_max, 0.0, p.t_ent))
}

/// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
pub fn ghz_target(n: usize) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ghz_like(&InputQubit { alpha: real(h), beta: real(h) }, n)
}

pub fn make_ghz_chain(spec: &ChainSpec) -> Result<(StateVector, Option<RampDiagnostics>)> {
    spec.validate()?;
    match spec.params.mode {
        Mode::Effective => Ok((ghz_target(spec.n_support), None)),
        Mode::Full => {
            let g = ghz_chain_graph(spec);
            let start = ground_state(&g.hamiltonian_at(0.0)?)?.state;
            let (state, diag) = adiabatic_ramp(&start, &g, 0.0, spec.params.t_ent, &spec.params.propagator)?;
            Ok((state, Some(diag)))
        }
    }
}

/// Duration of the conjugate-basis readout pulse, `w t = pi/4`.
pub fn readout_pulse_time(w: f64) -> f64 {
    std::f64::consts::FRAC_PI_4 / w
}

/// Tunneling on the intermediates only, everything else frozen.
pub fn readout_graph(spec: &ChainSpec) -> DeviceGraph {
    let mut g = DeviceGraph::new(spec.n_qubits());
    for q in spec.intermediates() {
        g = g.with_tunneling(q.0, Schedule::constant(spec.params.w), 0.0);
    }
    g
}

/// `<m|R|0> / <m|R|1>` for `m = 0, 1`, from the single-dot readout pulse.
pub fn readout_ratio(w: f64) -> Result<[C64; 2]> {
    let h = crate::protocol::single_dqd_graph(w, 0.0).hamiltonian_at(0.0)?;
    let r = Eigh::new(&h)?.map_spectrum(|e| C64::from_polar(1.0, -e * readout_pulse_time(w)));
    Ok([r[(0, 0)] / r[(0, 1)], r[(1, 0)] / r[(1, 1)]])
}

fn apply_readout_pulse(state: &StateVector, spec: &ChainSpec) -> Result<StateVector> {
    if spec.intermediates().is_empty() {
        return Ok(state.clone());
    }
    evolve_static(state, &readout_graph(spec).hamiltonian_at(0.0)?, readout_pulse_time(spec.params.w))
}

fn measured_qubits(spec: &ChainSpec) -> Vec<QubitId> {
    std::iter::once(ENCODER).chain(spec.intermediates()).collect()
}

/// Couple, Bell stage and readout pulse for an encoded qubit on top of `support`.
fn run_after_encoding(encoded: &StateVector, support: &StateVector, spec: &ChainSpec) -> Result<(StateVector, StateVector, Option<RampDiagnostics>)> {
    let p = &spec.params;
    let (coupled, diag) = couple_unknown(encoded, support, p)?;
    let after_bell = bell_evolution(&coupled, p, wait_time(p)?)?;
    let pulsed = apply_readout_pulse(&after_bell, spec)?;
    Ok((coupled, pulsed, diag))
}

pub fn teleport_over_chain(input: &InputQubit, spec: &ChainSpec) -> Result<TeleportResult> {
    spec.validate()?;
    let p = &spec.params;
    let n = spec.n_qubits();
    let enc = encode_qubit(input, p.w, p.phi)?;
    let q = enc.achieved;
    let mut log = Vec::new();

    let (ghz, diag) = make_ghz_chain(spec)?;
    log.push(StageLog::new("ghz", &ghz, &ghz_target(spec.n_support), diag.as_ref())?);

    let (coupled, pulsed, diag) = run_after_encoding(&enc.state, &ghz, spec)?;
    let ideal = ghz_like(&q, n);
    log.push(StageLog::new("couple", &coupled, &ideal, diag.as_ref())?);
    let ideal = ideal.apply_unitary(&effective_bell_unitary(p.wait_angle), &[QubitId(0), QubitId(1)])?;
    let ideal = apply_readout_pulse(&ideal, spec)?;
    log.push(StageLog::new("bell_readout", &pulsed, &ideal, None)?);

    let ratio = readout_ratio(p.w)?;
    let mut result = readout_and_correct(&pulsed, &measured_qubits(spec), &q, p, |bits| full_correction(bits, &ratio))?;
    result.step_log = log;
    Ok(result)
}

/// Chain counterpart of [`TeleportChannel::new`]: one GHZ ramp, two basis runs.
pub fn chain_channel(spec: &ChainSpec) -> Result<TeleportChannel> {
    spec.validate()?;
    let (ghz, _) = make_ghz_chain(spec)?;
    let run = |k: usize| run_after_encoding(&StateVector::basis(1, BasisIndex(k)), &ghz, spec).map(|r| r.1);
    Ok(TeleportChannel::from_parts([run(0)?, run(1)?], measured_qubits(spec), readout_ratio(spec.params.w)?, spec.params))
}

/// Weight of the two GHZ components, for diagnostics on imperfect chains.
pub fn ghz_weights(state: &StateVector) -> (f64, f64) {
    let a: &CVector = state.amplitudes();
    (a[0].norm_sqr(), a[a.len() - 1].norm_sqr())
}
