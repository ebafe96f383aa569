use num_complex::Complex64 as C64;

use super::{BranchResult, InputQubit, Mode, ProtocolParams, StageLog, TeleportResult, ENCODER};
use crate::device::{DeviceGraph, Schedule};
use crate::error::{Error, Result};
use crate::evolve::{adiabatic_ramp, evolve_static, ground_state, RampDiagnostics};
use crate::hilbert::{measure_qubit, ops, partial_trace, BasisIndex, MeasureMode, QubitId, Sampler, StateVector};
use crate::linalg::{c, real, CMatrix, CVector};
use crate::metrics::spectral_gap;

/// Result of switching the encoder's tunneling on for `t_bar` and off again.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub t_bar: f64,
    pub state: StateVector,
    /// The amplitudes actually produced; their relative phase is fixed by `phi`.
    pub achieved: InputQubit,
}

pub fn single_dqd_graph(w: f64, phi: f64) -> DeviceGraph {
    DeviceGraph::new(1).with_tunneling(0, Schedule::constant(w), phi)
}

/// Prepares `cos(w t)|0> + i e^{-i phi} sin(w t)|1>` with `cos(w t) = |alpha|`.
pub fn encode_qubit(target: &InputQubit, w: f64, phi: f64) -> Result<Encoding> {
    let a = target.alpha.norm();
    if a > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("|alpha| = {a} exceeds 1")));
    }
    if !(w > 0.0) {
        return Err(Error::InvalidParameter(format!("encoding needs w > 0, got {w}")));
    }
    let t_bar = a.min(1.0).acos() / w;
    let h = single_dqd_graph(w, phi).hamiltonian_at(0.0)?;
    let state = evolve_static(&StateVector::basis(1, BasisIndex(0)), &h, t_bar)?;
    let achieved = InputQubit::from_state(&state)?;
    Ok(Encoding { t_bar, state, achieved })
}

/// Cross/aligned amplitude ratio of the coupled-pair ground state,
/// `(sqrt(U^2 + 16 w^2) - U) / (4 w)`, in a cancellation-free form.
pub fn cross_ratio(u: f64, w: f64) -> f64 {
    4.0 * w / ((u * u + 16.0 * w * w).sqrt() + u)
}

/// Closed-form ground state of the coupled pair: `(|00> + |11>) + r (|01> + |10>)`, normalized.
pub fn entangled_pair_reference(u: f64, w: f64) -> Result<StateVector> {
    if w == 0.0 || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("reference pair needs w != 0, got {w}")));
    }
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("reference pair needs U >= 0, got {u}")));
    }
    let r = cross_ratio(u, w.abs());
    StateVector::normalized(CVector::from_column_slice(&[real(1.0), real(r), real(r), real(1.0)]))
}

/// Nearest-neighbour chain over qubits `first..first + len`, every link driven by `strength`.
pub fn chain_links(mut g: DeviceGraph, first: usize, len: usize, strength: &Schedule) -> DeviceGraph {
    for k in first..first + len - 1 {
        let (a, b) = (QubitId(k), QubitId(k + 1));
        g = g
            .with_link(a.upper_dot(), b.lower_dot(), strength.clone())
            .with_link(a.lower_dot(), b.upper_dot(), strength.clone());
    }
    g
}

/// Support pair with both double dots tunneling and the Coulomb links ramped `0 -> U_max`.
pub fn entangling_graph(params: &ProtocolParams) -> DeviceGraph {
    let ramp = Schedule::smooth(0.0, params.u_max, 0.0, params.t_ent);
    let g = DeviceGraph::new(2)
        .with_tunneling(0, Schedule::constant(params.w), 0.0)
        .with_tunneling(1, Schedule::constant(params.w), 0.0);
    chain_links(g, 0, 2, &ramp)
}

pub fn make_entangled_pair(params: &ProtocolParams) -> Result<(StateVector, Option<RampDiagnostics>)> {
    params.validate()?;
    match params.mode {
        Mode::Effective => Ok((entangled_pair_reference(params.u_max, params.w)?, None)),
        Mode::Full => {
            let g = entangling_graph(params);
            let start = ground_state(&g.hamiltonian_at(0.0)?)?.state;
            let (state, diag) = adiabatic_ramp(&start, &g, 0.0, params.t_ent, &params.propagator)?;
            Ok((state, Some(diag)))
        }
    }
}

/// `alpha|0...0> + beta|1...1>` on `n` qubits.
pub fn ghz_like(input: &InputQubit, n: usize) -> StateVector {
    let mut amps = CVector::zeros(1 << n);
    amps[0] = input.alpha;
    amps[(1 << n) - 1] = input.beta;
    StateVector::from_amplitudes(amps).expect("input is normalized")
}

/// Encoder frozen, support chain at full strength, encoder links ramped to `U'_max`.
///
/// The ramp follows `U'(t) = a tan(theta(t))` with `a` the gap between the
/// support's two lowest levels. While the encoder is frozen in `|0>` the
/// links bias the support towards `|0...0>`, but the competing `|1...1>`
/// configuration lies only `~a` higher; the tangent shape spends most of the
/// ramp where `U'` is comparable to that splitting.
pub fn coupling_graph(params: &ProtocolParams, support_len: usize) -> Result<DeviceGraph> {
    let n = support_len + 1;
    let mut support = DeviceGraph::new(support_len);
    for k in 0..support_len {
        support = support.with_tunneling(k, Schedule::constant(params.w), 0.0);
    }
    let support = chain_links(support, 0, support_len, &Schedule::constant(params.u_max));
    let a = spectral_gap(&support.hamiltonian_at(0.0)?);
    if !(a > 0.0) {
        return Err(Error::Precondition("support ground level is degenerate; the coupling ramp needs a gap".into()));
    }

    let mut g = DeviceGraph::new(n);
    for k in 1..n {
        g = g.with_tunneling(k, Schedule::constant(params.w), 0.0);
    }
    let g = chain_links(g, 1, support_len, &Schedule::constant(params.u_max));
    let ramp = Schedule::gap_adapted(0.0, params.uprime_max, 0.0, params.t_couple, a);
    Ok(chain_links(g, 0, 2, &ramp))
}

/// Coupling ramp length in units of the inverse support gap; at this value the
/// ramp leaves about 1% of the weight outside the ground space.
pub const COUPLE_RAMP_FACTOR: f64 = 8.0;

/// `COUPLE_RAMP_FACTOR / gap` for a support chain of `support_len` qubits at `U_max`.
pub fn recommended_couple_time(params: &ProtocolParams, support_len: usize) -> Result<f64> {
    let mut support = DeviceGraph::new(support_len);
    for k in 0..support_len {
        support = support.with_tunneling(k, Schedule::constant(params.w), 0.0);
    }
    let support = chain_links(support, 0, support_len, &Schedule::constant(params.u_max));
    Ok(COUPLE_RAMP_FACTOR / spectral_gap(&support.hamiltonian_at(0.0)?))
}

/// Couples the encoder (qubit 0) to the first support qubit.
pub fn couple_unknown(
    unknown: &StateVector,
    support: &StateVector,
    params: &ProtocolParams,
) -> Result<(StateVector, Option<RampDiagnostics>)> {
    params.validate()?;
    if unknown.n_qubits() != 1 {
        return Err(Error::Dimension { expected: 2, actual: unknown.dim() });
    }
    let m = support.n_qubits();
    if m < 2 {
        return Err(Error::Dimension { expected: 4, actual: support.dim() });
    }
    match params.mode {
        Mode::Effective => Ok((ghz_like(&InputQubit::from_state(unknown)?, m + 1), None)),
        Mode::Full => {
            let g = coupling_graph(params, m)?;
            let start = StateVector::product(&[unknown.clone(), support.clone()]);
            let (state, diag) = adiabatic_ramp(&start, &g, 0.0, params.t_couple, &params.propagator)?;
            Ok((state, Some(diag)))
        }
    }
}

/// Second-order exchange frequency `2 w^2 / U` between `|00>` and `|11>`.
pub fn effective_rabi(w: f64, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::InvalidParameter(format!("effective Rabi frequency needs U > 0, got {u}")));
    }
    Ok(2.0 * w * w / u)
}

/// Time for the Bell stage to reach `omega t = wait_angle`.
pub fn wait_time(params: &ProtocolParams) -> Result<f64> {
    let omega = effective_rabi(params.w, params.bell_u)?;
    if omega == 0.0 {
        return Err(Error::InvalidParameter("w = 0 gives no Bell-stage dynamics".into()));
    }
    Ok(params.wait_angle / omega)
}

/// Encoder and first support qubit tunneling, coupled by `bell_U`; everything else frozen.
pub fn bell_graph(params: &ProtocolParams, n_qubits: usize) -> DeviceGraph {
    let g = DeviceGraph::new(n_qubits)
        .with_tunneling(0, Schedule::constant(params.w), 0.0)
        .with_tunneling(1, Schedule::constant(params.w), 0.0);
    chain_links(g, 0, 2, &Schedule::constant(params.bell_u))
}

/// `cos(theta) I + i sin(theta) X (x) X` on the encoder and the first support qubit.
pub fn effective_bell_unitary(theta: f64) -> CMatrix {
    let xx = ops::pair(&ops::pauli_x(), &ops::pauli_x());
    CMatrix::identity(4, 4) * real(theta.cos()) + xx * c(0.0, theta.sin())
}

/// Evolves under `g` for `t`, refusing graphs that touch any qubit beyond the first two.
pub fn bell_evolution_on(state: &StateVector, g: &DeviceGraph, t: f64) -> Result<StateVector> {
    if g.n_qubits() != state.n_qubits() {
        return Err(Error::Dimension { expected: g.dim(), actual: state.dim() });
    }
    for k in 2..g.n_qubits() {
        let q = QubitId(k);
        let tunnels = g.tunneling_on(q).is_some_and(|term| term.amplitude.value(0.0) != 0.0 || term.amplitude.discontinuity().is_some());
        let coupled = g.links_on(q).any(|l| l.strength.value(0.0) != 0.0);
        if tunnels || coupled {
            return Err(Error::Precondition(format!("qubit {k} must be frozen during the Bell stage")));
        }
    }
    evolve_static(state, &g.hamiltonian_at(0.0)?, t)
}

pub fn bell_evolution(state: &StateVector, params: &ProtocolParams, t: f64) -> Result<StateVector> {
    if state.n_qubits() < 3 {
        return Err(Error::Dimension { expected: 8, actual: state.dim() });
    }
    match params.mode {
        Mode::Effective => {
            let theta = effective_rabi(params.w, params.bell_u)? * t;
            state.apply_unitary(&effective_bell_unitary(theta), &[QubitId(0), QubitId(1)])
        }
        Mode::Full => bell_evolution_on(state, &bell_graph(params, state.n_qubits()), t),
    }
}

/// Bob's correction after Alice reads `outcome` on the encoder: `diag(1, -i)` for 0, `diag(1, i)` for 1.
pub fn alice_correction(outcome: u8) -> CMatrix {
    let s = if outcome == 0 { -1.0 } else { 1.0 };
    ops::diag(real(1.0), c(0.0, s))
}

/// Charge readout of every qubit in `measured` (the encoder first), then
/// Bob, the last qubit, is corrected by `correction(bits)`.
pub(crate) fn readout_and_correct(
    state: &StateVector,
    measured: &[QubitId],
    input: &InputQubit,
    params: &ProtocolParams,
    correction: impl Fn(&[u8]) -> CMatrix,
) -> Result<TeleportResult> {
    let bob = QubitId(state.n_qubits() - 1);
    let target = input.state();
    let mut pending = vec![(state.clone(), Vec::new(), 1.0)];
    for &q in measured {
        let mut next = Vec::with_capacity(2 * pending.len());
        for (s, bits, p) in pending {
            let m = measure_qubit(&s, q, MeasureMode::Deterministic)?;
            for o in 0..2u8 {
                if let Some(collapsed) = &m.collapsed[usize::from(o)] {
                    let mut bits = bits.clone();
                    bits.push(o);
                    next.push((collapsed.clone(), bits, p * m.probabilities[usize::from(o)]));
                }
            }
        }
        pending = next;
    }

    let mut branches = Vec::with_capacity(pending.len());
    for (s, bits, probability) in pending {
        let bob_raw = partial_trace(&s, &[bob])?;
        let bob_corrected = bob_raw.conjugate(&correction(&bits))?;
        let fidelity = crate::hilbert::fidelity(&bob_corrected, &target)?;
        branches.push(BranchResult { outcome: bits[0], readout: bits[1..].to_vec(), probability, bob_raw, bob_corrected, fidelity });
    }

    let chosen = match params.seed {
        Some(seed) => {
            let x = Sampler::from_seed(seed).uniform() * branches.iter().map(|b| b.probability).sum::<f64>();
            let mut acc = 0.0;
            branches
                .iter()
                .position(|b| {
                    acc += b.probability;
                    x < acc
                })
                .unwrap_or(branches.len() - 1)
        }
        None => {
            let mut best = 0;
            for (k, b) in branches.iter().enumerate() {
                if b.probability > branches[best].probability {
                    best = k;
                }
            }
            best
        }
    };
    let average_fidelity = branches.iter().map(|b| b.probability * b.fidelity).sum::<f64>().clamp(0.0, 1.0);
    let c = &branches[chosen];
    Ok(TeleportResult {
        outcome: c.outcome,
        readout: c.readout.clone(),
        sampled: params.seed.is_some(),
        bob_state_raw: c.bob_raw.principal_state(),
        bob_state_corrected: c.bob_corrected.principal_state(),
        fidelity_to_input: c.fidelity,
        average_fidelity,
        branches,
        input: *input,
        step_log: Vec::new(),
    })
}

/// Reads the encoder's charge and applies Bob's correction for each outcome.
pub fn alice_measure_and_correct(state: &StateVector, input: &InputQubit, params: &ProtocolParams) -> Result<TeleportResult> {
    if state.n_qubits() < 2 {
        return Err(Error::Dimension { expected: 4, actual: state.dim() });
    }
    readout_and_correct(state, &[ENCODER], input, params, |bits| alice_correction(bits[0]))
}

/// Encode, entangle, couple, Bell stage at `omega t = wait_angle`, measure, correct.
pub fn teleport_end_to_end(input: &InputQubit, params: &ProtocolParams) -> Result<TeleportResult> {
    params.validate()?;
    let enc = encode_qubit(input, params.w, params.phi)?;
    let teleported = enc.achieved;
    let mut log = Vec::new();

    let (pair, diag) = make_entangled_pair(params)?;
    log.push(StageLog::new("entangle", &pair, &entangled_pair_reference(params.u_max, params.w)?, diag.as_ref())?);

    let (coupled, diag) = couple_unknown(&enc.state, &pair, params)?;
    let ideal = ghz_like(&teleported, 3);
    log.push(StageLog::new("couple", &coupled, &ideal, diag.as_ref())?);

    let t = wait_time(params)?;
    let after = bell_evolution(&coupled, params, t)?;
    let ideal = ideal.apply_unitary(&effective_bell_unitary(params.wait_angle), &[QubitId(0), QubitId(1)])?;
    log.push(StageLog::new("bell", &after, &ideal, None)?);

    let mut result = alice_measure_and_correct(&after, &teleported, params)?;
    result.step_log = log;
    Ok(result)
}

/// Bob's correction after the encoder bit and the intermediate readout bits.
///
/// `readout_ratio[m]` is `<m|R|0> / <m|R|1>` for the readout pulse `R`; each
/// intermediate bit multiplies Bob's `|1>` amplitude by its ratio.
pub(crate) fn full_correction(bits: &[u8], readout_ratio: &[C64; 2]) -> CMatrix {
    let phase = bits[1..].iter().fold(real(1.0), |acc, &m| acc * readout_ratio[usize::from(m)]);
    ops::diag(real(1.0), phase) * alice_correction(bits[0])
}

/// The post-encoding pipeline applied to `|0>` and `|1>` on the encoder.
///
/// Evolution is linear, so the register state for any encoded qubit is the
/// same superposition of the two basis outputs. A channel therefore pays for
/// two runs and then teleports any number of inputs.
#[derive(Debug, Clone)]
pub struct TeleportChannel {
    pub(crate) outputs: [StateVector; 2],
    pub(crate) measured: Vec<QubitId>,
    pub(crate) readout_ratio: [C64; 2],
    pub(crate) params: ProtocolParams,
}

impl TeleportChannel {
    /// Runs entangle once, then couple and Bell stage for both basis inputs.
    pub fn new(params: &ProtocolParams) -> Result<Self> {
        params.validate()?;
        let (pair, _) = make_entangled_pair(params)?;
        let t = wait_time(params)?;
        let run = |k: usize| -> Result<StateVector> {
            let (coupled, _) = couple_unknown(&StateVector::basis(1, BasisIndex(k)), &pair, params)?;
            bell_evolution(&coupled, params, t)
        };
        Ok(TeleportChannel {
            outputs: [run(0)?, run(1)?],
            measured: vec![ENCODER],
            readout_ratio: [real(1.0); 2],
            params: *params,
        })
    }

    pub(crate) fn from_parts(outputs: [StateVector; 2], measured: Vec<QubitId>, readout_ratio: [C64; 2], params: ProtocolParams) -> Self {
        TeleportChannel { outputs, measured, readout_ratio, params }
    }

    pub fn register_state(&self, input: &InputQubit) -> Result<StateVector> {
        let [a, b] = &self.outputs;
        StateVector::normalized(a.amplitudes() * input.alpha + b.amplitudes() * input.beta)
    }

    /// Encodes `input` and reads out the channel for the achieved qubit.
    pub fn teleport(&self, input: &InputQubit) -> Result<TeleportResult> {
        let enc = encode_qubit(input, self.params.w, self.params.phi)?;
        let state = self.register_state(&enc.achieved)?;
        let ratio = self.readout_ratio;
        readout_and_correct(&state, &self.measured, &enc.achieved, &self.params, |bits| full_correction(bits, &ratio))
    }
}

/// Amplitude of `|b0 b1 b2>` in qubit order.
#[cfg(test)]
fn amp3(s: &StateVector, b0: usize, b1: usize, b2: usize) -> C64 {
    s.amplitude(BasisIndex(b0 | b1 << 1 | b2 << 2))
}
