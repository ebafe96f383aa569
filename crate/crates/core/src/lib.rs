//! Simulation of charge qubits in coupled double quantum dots: encoding,
//! Coulomb-mediated entanglement and teleportation of an unknown state.

pub mod chain;
pub mod device;
pub mod error;
pub mod evolve;
pub mod hilbert;
pub mod linalg;
pub mod metrics;
pub mod protocol;

pub use device::{CoulombLink, DeviceGraph, Dqd, Schedule, ScheduleKind, TunnelTerm};
pub use error::{Error, Result};
pub use evolve::{adiabatic_ramp, evolve_scheduled, evolve_static, ground_state, PropagatorConfig, Stepping};
pub use hilbert::{fidelity, measure_qubit, partial_trace, BasisIndex, DensityMatrix, MeasureMode, QubitId, Sampler, StateVector};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
