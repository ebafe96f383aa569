//! Entanglement measures, spectral gaps and oscillation fitting.

use serde::{Deserialize, Serialize};

use crate::device::DeviceGraph;
use crate::error::{Error, Result};
use crate::hilbert::{ops, partial_trace, DensityMatrix, QubitId, StateVector};
use crate::linalg::{real, CMatrix, Eigh};

/// Two-qubit concurrence (Wootters).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits() != 2 {
        return Err(Error::Dimension { expected: 4, actual: rho.dim() });
    }
    // the lambdas are the singular values of sqrt(rho) sqrt(rho~); flooring
    // roundoff-level eigenvalues keeps pure states from picking up sqrt(eps) noise
    let yy = ops::pair(&ops::pauli_y(), &ops::pauli_y());
    let floor = 1e-13;
    let sqrt_rho = Eigh::new_unchecked(rho.matrix()).map_spectrum(|l| real(if l > floor { l.sqrt() } else { 0.0 }));
    let sqrt_flipped = &yy * sqrt_rho.map(|z| z.conj()) * &yy;
    let mut lambdas: Vec<f64> = (&sqrt_rho * sqrt_flipped).singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Base-2 von Neumann entropy of the qubits in `partition`.
pub fn entanglement_entropy(state: &StateVector, partition: &[QubitId]) -> Result<f64> {
    if partition.is_empty() {
        return Err(Error::EmptySelection);
    }
    let rho = partial_trace(state, partition)?;
    Ok(von_neumann_entropy(&rho))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&p| p > 1e-15)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `E1(t) - E0(t)`; zero for a degenerate ground level.
pub fn instantaneous_gap(g: &DeviceGraph, t: f64) -> Result<f64> {
    let h = g.hamiltonian_at(t)?;
    Ok(spectral_gap(&h))
}

pub(crate) fn spectral_gap(h: &CMatrix) -> f64 {
    let values = Eigh::new_unchecked(h).values;
    if values.len() < 2 {
        return f64::INFINITY;
    }
    (values[1] - values[0]).max(0.0)
}

/// Least-squares fit of `offset + amplitude * sin^2(Omega t)`.
///
/// `frequency` is the population oscillation frequency `2 Omega`, since
/// `sin^2(Omega t) = (1 - cos(2 Omega t)) / 2`; use [`RabiFit::omega`] for `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiFit {
    pub frequency: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub rms_residual: f64,
}

impl RabiFit {
    pub fn omega(&self) -> f64 {
        0.5 * self.frequency
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (self.omega() * t).sin().powi(2)
    }
}

pub const MIN_FIT_SAMPLES: usize = 16;

/// Best `(offset, amplitude, sum of squared residuals)` for a fixed `omega`.
fn linear_fit(samples: &[(f64, f64)], omega: f64) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in samples {
        let x = (omega * t).sin().powi(2);
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    let (a, b) = if det.abs() < 1e-14 * n * n { (sy / n, 0.0) } else { ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det) };
    let ssr = samples.iter().map(|&(t, y)| (y - a - b * (omega * t).sin().powi(2)).powi(2)).sum();
    (a, b, ssr)
}

pub fn fit_oscillation(samples: &[(f64, f64)]) -> Result<RabiFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ts.sort_by(f64::total_cmp);
    let span = ts[ts.len() - 1] - ts[0];
    let mut spacings: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).collect();
    if span <= 0.0 || spacings.is_empty() {
        return Err(Error::InvalidParameter("samples must span a positive time interval".into()));
    }
    spacings.sort_by(f64::total_cmp);
    let dt = spacings[spacings.len() / 2];

    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let var = samples.iter().map(|s| (s.1 - mean).powi(2)).sum::<f64>() / n;
    if var < 1e-20 {
        return Err(Error::NonOscillatory("series is constant".into()));
    }

    // sin^2 completes a period when Omega * span = pi; the Nyquist limit on
    // cos(2 Omega t) is Omega * dt = pi / 2
    let lo = std::f64::consts::PI / span;
    let hi = 0.5 * std::f64::consts::PI / dt;
    if hi <= lo {
        return Err(Error::InvalidParameter("sampling too coarse to resolve one period".into()));
    }
    let step = 0.125 * std::f64::consts::PI / span;
    let count = ((hi - lo) / step).ceil() as usize + 1;
    let ssr = |omega: f64| linear_fit(samples, omega).2;
    let (mut best, mut best_ssr) = (lo, f64::INFINITY);
    for k in 0..count {
        let omega = (lo + k as f64 * step).min(hi);
        let r = ssr(omega);
        if r < best_ssr {
            best = omega;
            best_ssr = r;
        }
    }

    // golden-section refinement around the grid minimum
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best - step).max(0.5 * lo), best + step);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (ssr(c), ssr(d));
    while (b - a) > 1e-13 * best {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = ssr(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = ssr(d);
        }
    }
    let omega = 0.5 * (a + b);
    let (offset, amplitude, ssr) = linear_fit(samples, omega);
    let rms_residual = (ssr / n).sqrt();
    if rms_residual * rms_residual > 0.25 * var {
        return Err(Error::NonOscillatory(format!(
            "best sin^2 fit leaves rms residual {rms_residual:.3e} against a data spread of {:.3e}",
            var.sqrt()
        )));
    }
    Ok(RabiFit { frequency: 2.0 * omega, amplitude, offset, rms_residual })
}
