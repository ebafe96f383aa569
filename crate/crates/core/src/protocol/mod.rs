//! Teleportation of an unknown charge qubit through a Coulomb-entangled pair.
//!
//! Register layout (three double dots, six dots):
//!
//! | qubit | dots | role                                  |
//! |-------|------|---------------------------------------|
//! | q0    | 1, 2 | encoder, holds the unknown state      |
//! | q1    | 3, 4 | Alice's half of the support pair      |
//! | q2    | 5, 6 | Bob                                   |
//!
//! The support pair is entangled by ramping the links 3-6 and 4-5, the
//! unknown qubit is coupled in through 1-4 and 2-3. Every link penalizes
//! neighbouring qubits that disagree, so strong couplings pull the register
//! towards `|0...0>` and `|1...1>`.
//!
//! Two modes run the same pipeline: `Full` integrates the Schrödinger
//! equation on the whole register, `Effective` uses the closed-form states
//! of the ideal protocol.

mod bell;
mod stages;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{PropagatorConfig, RampDiagnostics};
use crate::hilbert::{DensityMatrix, QubitId, StateVector};

pub use bell::{bell_decomposition_check, BellBranch, BellLabel, BellReport, Pauli};
pub use stages::*;

pub const ENCODER: QubitId = QubitId(0);
pub const ALICE: QubitId = QubitId(1);
pub const BOB: QubitId = QubitId(2);

/// The state to be teleported, `alpha|0> + beta|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    pub alpha: C64,
    pub beta: C64,
}

impl InputQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(InputQubit { alpha, beta })
    }

    /// Real amplitudes `(a, sqrt(1 - a^2))`.
    pub fn from_alpha_abs(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("|alpha| must lie in [0, 1], got {a}")));
        }
        Ok(InputQubit { alpha: C64::new(a, 0.0), beta: C64::new((1.0 - a * a).max(0.0).sqrt(), 0.0) })
    }

    /// Haar-random state.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        InputQubit { alpha: C64::new(v[0] / n, v[1] / n), beta: C64::new(v[2] / n, v[3] / n) }
    }

    pub fn state(&self) -> StateVector {
        StateVector::qubit(self.alpha, self.beta).expect("normalized by construction")
    }

    pub fn from_state(s: &StateVector) -> Result<Self> {
        if s.n_qubits() != 1 {
            return Err(Error::Dimension { expected: 2, actual: s.dim() });
        }
        let a = s.amplitudes();
        let norm2 = a[0].norm_sqr() + a[1].norm_sqr();
        Ok(InputQubit { alpha: a[0] / norm2.sqrt(), beta: a[1] / norm2.sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    Effective,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "effective" => Ok(Mode::Effective),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}` (expected full or effective)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Effective => "effective",
        })
    }
}

/// Energies in units where `hbar = 1`; times in the inverse unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    /// Reference tunneling amplitude, used on every double dot that tunnels.
    pub w: f64,
    /// Aharonov-Bohm phase of the encoder's tunneling.
    pub phi: f64,
    /// Final Coulomb strength of the support pair links.
    #[serde(rename = "U_max")]
    pub u_max: f64,
    /// Final strength of the links coupling the encoder to the support.
    #[serde(rename = "Uprime_max")]
    pub uprime_max: f64,
    #[serde(rename = "T_ent")]
    pub t_ent: f64,
    #[serde(rename = "T_couple")]
    pub t_couple: f64,
    /// Coupling during the Bell stage; sets `omega = 2 w^2 / bell_U`.
    #[serde(rename = "bell_U")]
    pub bell_u: f64,
    /// `omega * t_wait`.
    pub wait_angle: f64,
    pub propagator: PropagatorConfig,
    /// Seed for sampling Alice's outcome; `None` reports both branches without drawing.
    pub seed: Option<u64>,
    pub mode: Mode,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            w: 1.0,
            phi: 0.0,
            u_max: 100.0,
            uprime_max: 100.0,
            t_ent: 200.0,
            t_couple: 200.0,
            bell_u: 100.0,
            wait_angle: std::f64::consts::FRAC_PI_4,
            propagator: default_propagator(),
            seed: None,
            mode: Mode::Full,
        }
    }
}

/// Adaptive midpoint stepping; the fixed-step default of `1e-3 / U_max`
/// would need tens of millions of steps for the slow coupling ramps. The step
/// cap only matters on very long, nearly static stretches of a ramp.
pub fn default_propagator() -> PropagatorConfig {
    PropagatorConfig::adaptive(100.0, 1e-10)
}

pub const PARAM_NAMES: [&str; 8] = ["w", "phi", "U_max", "Uprime_max", "T_ent", "T_couple", "bell_U", "wait_angle"];

impl ProtocolParams {
    pub fn effective() -> Self {
        ProtocolParams { mode: Mode::Effective, ..Default::default() }
    }

    /// Same couplings everywhere: `U' = bell_U = U`.
    pub fn with_coupling(mut self, u: f64) -> Self {
        self.u_max = u;
        self.uprime_max = u;
        self.bell_u = u;
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "w" => self.w,
            "phi" => self.phi,
            "U_max" => self.u_max,
            "Uprime_max" => self.uprime_max,
            "T_ent" => self.t_ent,
            "T_couple" => self.t_couple,
            "bell_U" => self.bell_u,
            "wait_angle" => self.wait_angle,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "w" => &mut self.w,
            "phi" => &mut self.phi,
            "U_max" => &mut self.u_max,
            "Uprime_max" => &mut self.uprime_max,
            "T_ent" => &mut self.t_ent,
            "T_couple" => &mut self.t_couple,
            "bell_U" => &mut self.bell_u,
            "wait_angle" => &mut self.wait_angle,
            _ => return Err(Error::InvalidParameter(format!("unknown parameter `{name}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Every violated constraint, in field order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                out.push(msg)
            }
        };
        need(self.w > 0.0 && self.w.is_finite(), format!("w must be positive, got {}", self.w));
        need(self.phi.is_finite(), format!("phi must be finite, got {}", self.phi));
        for (name, v) in [("U_max", self.u_max), ("Uprime_max", self.uprime_max), ("bell_U", self.bell_u)] {
            need(v >= 0.0 && v.is_finite(), format!("{name} must be non-negative, got {v}"));
        }
        for (name, v) in [("T_ent", self.t_ent), ("T_couple", self.t_couple), ("wait_angle", self.wait_angle)] {
            need(v >= 0.0 && v.is_finite(), format!("{name} must be non-negative, got {v}"));
        }
        if let Err(e) = self.propagator.validate() {
            out.push(e.to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }

    /// Advisory conditions that do not stop a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.u_max > 0.0 && self.w / self.u_max > 0.1 {
            out.push(format!("w/U_max = {:.3} exceeds 0.1: the support pair is far from maximally entangled", self.w / self.u_max));
        }
        if self.bell_u > 0.0 && self.w / self.bell_u > 0.1 {
            out.push(format!("w/bell_U = {:.3} exceeds 0.1: the effective two-level description is poor", self.w / self.bell_u));
        }
        out
    }
}

/// One stage of a pipeline run.
#[derive(Debug, Clone, Serialize)]
pub struct StageLog {
    pub stage: String,
    /// Fidelity with the ideal (effective-mode) state after this stage.
    pub fidelity_to_reference: f64,
    pub norm: f64,
    pub min_gap: Option<f64>,
    pub final_ground_overlap: Option<f64>,
}

impl StageLog {
    pub(crate) fn new(stage: &str, state: &StateVector, reference: &StateVector, ramp: Option<&RampDiagnostics>) -> Result<Self> {
        Ok(StageLog {
            stage: stage.to_string(),
            fidelity_to_reference: crate::hilbert::fidelity(state, reference)?,
            norm: state.norm(),
            min_gap: ramp.map(|d| d.min_gap),
            final_ground_overlap: ramp.map(|d| d.final_ground_overlap),
        })
    }
}

/// Bob's qubit after one readout record.
#[derive(Debug, Clone)]
pub struct BranchResult {
    /// Alice's bit on the encoder.
    pub outcome: u8,
    /// Bits read on intermediate chain qubits; empty for the three-qubit protocol.
    pub readout: Vec<u8>,
    pub probability: f64,
    pub bob_raw: DensityMatrix,
    pub bob_corrected: DensityMatrix,
    /// `<input| rho_corrected |input>`.
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct TeleportResult {
    /// Sampled outcome when a seed is set, otherwise the likeliest branch.
    pub outcome: u8,
    pub readout: Vec<u8>,
    pub sampled: bool,
    /// Dominant eigenvector of Bob's reduced state for the reported branch.
    pub bob_state_raw: StateVector,
    pub bob_state_corrected: StateVector,
    /// Fidelity for the reported outcome.
    pub fidelity_to_input: f64,
    /// Outcome-weighted fidelity over both branches.
    pub average_fidelity: f64,
    pub branches: Vec<BranchResult>,
    /// The qubit that was actually teleported (the encoder's achieved state).
    pub input: InputQubit,
    pub step_log: Vec<StageLog>,
}

impl TeleportResult {
    pub fn branch(&self, outcome: u8) -> Option<&BranchResult> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }
}
