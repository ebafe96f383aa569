#![allow(dead_code)]

use dqd_sim::linalg::{CMatrix, CVector, Eigh};
use dqd_sim::{DeviceGraph, Schedule, StateVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", |v| {
        let amps = CVector::from_iterator(v.len(), v.into_iter().map(|(re, im)| c(re, im)));
        StateVector::normalized(amps).ok()
    })
}

pub fn hermitian_strategy(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let m = CMatrix::from_fn(dim, dim, |i, j| c(v[i * dim + j].0, v[i * dim + j].1));
        (&m + m.adjoint()).map(|z| z * 0.5)
    })
}

/// `exp(i H)` for a random Hermitian `H`.
pub fn unitary_strategy(dim: usize) -> impl Strategy<Value = CMatrix> {
    hermitian_strategy(dim).prop_map(|h| Eigh::new(&h).unwrap().map_spectrum(|e| C64::from_polar(1.0, e * 3.0)))
}

/// Every double dot tunnels and every neighbour pair is linked; amplitudes ramp linearly over `[0, t_end]`.
pub fn ramped_graph_strategy(n: usize, t_end: f64) -> impl Strategy<Value = DeviceGraph> {
    let tunnel = prop::collection::vec((0.2f64..1.5, 0.2f64..1.5, 0.0f64..6.28), n);
    let links = prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 2 * (n - 1));
    (tunnel, links).prop_map(move |(tunnel, links)| {
        let mut g = DeviceGraph::new(n);
        for (k, (a, b, phi)) in tunnel.into_iter().enumerate() {
            g = g.with_tunneling(k, Schedule::linear(a, b, 0.0, t_end), phi);
        }
        for (m, (a, b)) in links.into_iter().enumerate() {
            let k = (m / 2) as u32;
            let (i, j) = if m % 2 == 0 { (2 * k + 1, 2 * k + 4) } else { (2 * k + 2, 2 * k + 3) };
            g = g.with_link(i, j, Schedule::linear(a, b, 0.0, t_end));
        }
        g
    })
}

/// Same layout with constant amplitudes.
pub fn static_graph_strategy(n: usize) -> impl Strategy<Value = DeviceGraph> {
    let tunnel = prop::collection::vec((0.2f64..1.5, 0.0f64..6.28), n);
    let links = prop::collection::vec(0.0f64..3.0, 2 * (n - 1));
    (tunnel, links).prop_map(move |(tunnel, links)| {
        let mut g = DeviceGraph::new(n);
        for (k, (a, phi)) in tunnel.into_iter().enumerate() {
            g = g.with_tunneling(k, Schedule::constant(a), phi);
        }
        for (m, u) in links.into_iter().enumerate() {
            let k = (m / 2) as u32;
            let (i, j) = if m % 2 == 0 { (2 * k + 1, 2 * k + 4) } else { (2 * k + 2, 2 * k + 3) };
            g = g.with_link(i, j, Schedule::constant(u));
        }
        g
    })
}

pub fn distance(a: &StateVector, b: &StateVector) -> f64 {
    (a.amplitudes() - b.amplitudes()).norm()
}
