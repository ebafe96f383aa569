//! Dot-level device description and its compilation into logical Hamiltonians.
//!
//! Dots are numbered from 1. Double dot `k` owns dots `2k+1` (odd, upper) and
//! `2k+2` (even, lower). Energies are in units of a reference tunneling `w`,
//! times in `1/w`, with `hbar = 1`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::QubitId;
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    LinearRamp,
    /// Cubic smoothstep `3x^2 - 2x^3`; zero slope at both ends.
    SmoothRamp,
    /// Jumps from `v_start` to `v_end` at `t_start`, right-continuous.
    SuddenStep,
    /// `v_start + scale * tan(x * atan((v_end - v_start) / scale))`.
    ///
    /// Moves slowly while the value is within `scale` of its start and
    /// accelerates once it is well past it. With `scale` set to the spectral
    /// gap at the start of the ramp this keeps the sweep rate proportional to
    /// the square of a two-level gap.
    GapAdapted,
}

/// Scalar control `v(t)` for a tunneling amplitude or Coulomb strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub v_start: f64,
    pub v_end: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Crossover energy of a `gap_adapted` ramp; unused by other kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Schedule {
    pub fn constant(v: f64) -> Self {
        Schedule { kind: ScheduleKind::Constant, v_start: v, v_end: v, t_start: 0.0, t_end: 0.0, scale: None }
    }

    pub fn linear(v_start: f64, v_end: f64, t_start: f64, t_end: f64) -> Self {
        Schedule { kind: ScheduleKind::LinearRamp, v_start, v_end, t_start, t_end, scale: None }
    }

    pub fn smooth(v_start: f64, v_end: f64, t_start: f64, t_end: f64) -> Self {
        Schedule { kind: ScheduleKind::SmoothRamp, v_start, v_end, t_start, t_end, scale: None }
    }

    pub fn sudden(v_start: f64, v_end: f64, t_switch: f64) -> Self {
        Schedule { kind: ScheduleKind::SuddenStep, v_start, v_end, t_start: t_switch, t_end: t_switch, scale: None }
    }

    pub fn gap_adapted(v_start: f64, v_end: f64, t_start: f64, t_end: f64, scale: f64) -> Self {
        Schedule { kind: ScheduleKind::GapAdapted, v_start, v_end, t_start, t_end, scale: Some(scale) }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            ScheduleKind::Constant => self.v_start,
            ScheduleKind::SuddenStep => {
                if t < self.t_start {
                    self.v_start
                } else {
                    self.v_end
                }
            }
            ScheduleKind::LinearRamp | ScheduleKind::SmoothRamp | ScheduleKind::GapAdapted => {
                if t >= self.t_end {
                    return self.v_end;
                }
                if t <= self.t_start {
                    return self.v_start;
                }
                let x = (t - self.t_start) / (self.t_end - self.t_start);
                let dv = self.v_end - self.v_start;
                match self.kind {
                    ScheduleKind::LinearRamp => self.v_start + dv * x,
                    ScheduleKind::SmoothRamp => self.v_start + dv * x * x * (3.0 - 2.0 * x),
                    _ => {
                        let scale = self.scale.unwrap_or(1.0);
                        let theta_end = (dv / scale).atan();
                        self.v_start + scale * (theta_end * x).tan()
                    }
                }
            }
        }
    }

    /// Time at which the schedule jumps, if it does.
    pub fn discontinuity(&self) -> Option<f64> {
        let jumps = self.v_start != self.v_end;
        match self.kind {
            ScheduleKind::Constant => None,
            ScheduleKind::SuddenStep => jumps.then_some(self.t_start),
            _ => (jumps && self.t_end <= self.t_start).then_some(self.t_start),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.v_start.min(self.v_end)
    }

    fn problems(&self, what: &str, out: &mut Vec<String>) {
        let finite = [self.v_start, self.v_end, self.t_start, self.t_end].iter().all(|x| x.is_finite());
        if !finite {
            out.push(format!("{what}: schedule has non-finite fields"));
            return;
        }
        if self.t_start > self.t_end {
            out.push(format!("{what}: t_start {} after t_end {}", self.t_start, self.t_end));
        }
        if self.kind == ScheduleKind::Constant && self.v_start != self.v_end {
            out.push(format!("{what}: constant schedule with v_start != v_end"));
        }
        if self.kind == ScheduleKind::GapAdapted {
            match self.scale {
                Some(s) if s > 0.0 && s.is_finite() => {}
                _ => out.push(format!("{what}: gap_adapted schedule needs a positive scale")),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dqd {
    pub id: QubitId,
}

/// `-w(t) (e^{-i phi} a_odd^dag a_even + h.c.) + epsilon (n_odd + n_even)` on one double dot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelTerm {
    pub dqd: QubitId,
    pub amplitude: Schedule,
    #[serde(default)]
    pub phase: f64,
    /// On-site energy; with one electron per double dot it only shifts the spectrum.
    #[serde(default)]
    pub epsilon: f64,
}

/// `U(t) n_i n_j` between dots of two different double dots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombLink {
    pub dot_i: u32,
    pub dot_j: u32,
    pub strength: Schedule,
}

/// Occupation `n_dot` as a logical projector: returns the double dot and the
/// logical value for which the dot holds the electron.
pub fn dot_owner(dot: u32) -> Result<(QubitId, u8)> {
    if dot == 0 {
        return Err(Error::InvalidGraph(vec!["dot labels start at 1".into()]));
    }
    let k = ((dot - 1) / 2) as usize;
    let occupied_bit = if dot % 2 == 1 { 1 } else { 0 };
    Ok((QubitId(k), occupied_bit))
}

/// Coulomb link as a two-qubit diagonal operator on `(qubit of dot_i, qubit of dot_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCoulomb {
    pub targets: [QubitId; 2],
    pub op: CMatrix,
}

/// `U(t) P_a (x) P_b` where `P` projects onto the logical value that puts the
/// electron on the linked dot.
pub fn compile_coulomb(link: &CoulombLink, t: f64) -> Result<CompiledCoulomb> {
    let (qi, bi) = dot_owner(link.dot_i)?;
    let (qj, bj) = dot_owner(link.dot_j)?;
    if qi == qj {
        return Err(Error::InvalidGraph(vec![format!(
            "link {}-{} joins two dots of double dot {}",
            link.dot_i, link.dot_j, qi.0
        )]));
    }
    let u = link.strength.value(t);
    // local index: bit 0 is qi, bit 1 is qj
    let op = CMatrix::from_fn(4, 4, |r, c| {
        if r == c && (r & 1) as u8 == bi && ((r >> 1) & 1) as u8 == bj {
            C64::new(u, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(CompiledCoulomb { targets: [qi, qj], op })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviceGraph {
    pub dqds: Vec<Dqd>,
    #[serde(default)]
    pub tunnel_terms: Vec<TunnelTerm>,
    #[serde(default)]
    pub coulomb_links: Vec<CoulombLink>,
}

impl DeviceGraph {
    /// `n` double dots with no couplings.
    pub fn new(n: usize) -> Self {
        DeviceGraph { dqds: (0..n).map(|k| Dqd { id: QubitId(k) }).collect(), ..Default::default() }
    }

    pub fn with_tunneling(mut self, dqd: usize, amplitude: Schedule, phase: f64) -> Self {
        self.tunnel_terms.push(TunnelTerm { dqd: QubitId(dqd), amplitude, phase, epsilon: 0.0 });
        self
    }

    pub fn with_link(mut self, dot_i: u32, dot_j: u32, strength: Schedule) -> Self {
        self.coulomb_links.push(CoulombLink { dot_i, dot_j, strength });
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.dqds.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn tunneling_on(&self, k: QubitId) -> Option<&TunnelTerm> {
        self.tunnel_terms.iter().find(|t| t.dqd == k)
    }

    /// Links touching double dot `k`.
    pub fn links_on(&self, k: QubitId) -> impl Iterator<Item = &CoulombLink> {
        self.coulomb_links.iter().filter(move |l| {
            dot_owner(l.dot_i).map(|o| o.0 == k).unwrap_or(false)
                || dot_owner(l.dot_j).map(|o| o.0 == k).unwrap_or(false)
        })
    }

    /// Times at which any schedule jumps.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .tunnel_terms
            .iter()
            .map(|t| &t.amplitude)
            .chain(self.coulomb_links.iter().map(|l| &l.strength))
            .filter_map(Schedule::discontinuity)
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let n = self.n_qubits();
        if n == 0 {
            problems.push("device has no double dots".to_string());
        }
        for (i, d) in self.dqds.iter().enumerate() {
            if d.id.0 != i {
                problems.push(format!("double dot at position {i} has id {}; ids must be 0..{n} in order", d.id.0));
            }
        }
        for (i, t) in self.tunnel_terms.iter().enumerate() {
            let what = format!("tunnel term {i}");
            if t.dqd.0 >= n {
                problems.push(format!("{what}: double dot {} does not exist", t.dqd.0));
            }
            if self.tunnel_terms[..i].iter().any(|o| o.dqd == t.dqd) {
                problems.push(format!("{what}: second tunnel term on double dot {}", t.dqd.0));
            }
            if !t.phase.is_finite() || !t.epsilon.is_finite() {
                problems.push(format!("{what}: non-finite phase or epsilon"));
            }
            t.amplitude.problems(&what, &mut problems);
            if t.amplitude.min_value() < 0.0 {
                problems.push(format!("{what}: negative tunneling amplitude"));
            }
        }
        for (i, l) in self.coulomb_links.iter().enumerate() {
            let what = format!("link {}-{}", l.dot_i, l.dot_j);
            let max_dot = 2 * n as u32;
            for dot in [l.dot_i, l.dot_j] {
                if dot == 0 || dot > max_dot {
                    problems.push(format!("{what}: dot {dot} does not exist"));
                }
            }
            if let (Ok((a, _)), Ok((b, _))) = (dot_owner(l.dot_i), dot_owner(l.dot_j)) {
                if a == b {
                    problems.push(format!("{what}: both dots belong to double dot {}", a.0));
                }
            }
            l.strength.problems(&format!("{what} (#{i})"), &mut problems);
            if l.strength.min_value() < 0.0 {
                problems.push(format!("{what}: negative Coulomb strength"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(problems))
        }
    }

    /// Logical Hamiltonian at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> Result<CMatrix> {
        self.validate()?;
        Ok(self.hamiltonian_unchecked(t))
    }

    pub(crate) fn hamiltonian_unchecked(&self, t: f64) -> CMatrix {
        let dim = self.dim();
        let mut h = CMatrix::zeros(dim, dim);
        for term in &self.tunnel_terms {
            let w = term.amplitude.value(t);
            let bit = 1usize << term.dqd.0;
            // a_odd^dag a_even moves the electron up: |0> -> |1>
            let up = C64::from_polar(-w, -term.phase);
            for i in 0..dim {
                if i & bit == 0 {
                    let j = i | bit;
                    h[(j, i)] += up;
                    h[(i, j)] += up.conj();
                }
                h[(i, i)] += C64::new(term.epsilon, 0.0);
            }
        }
        for link in &self.coulomb_links {
            let u = link.strength.value(t);
            if u == 0.0 {
                continue;
            }
            let (qi, bi) = dot_owner(link.dot_i).expect("validated");
            let (qj, bj) = dot_owner(link.dot_j).expect("validated");
            for i in 0..dim {
                if ((i >> qi.0) & 1) as u8 == bi && ((i >> qj.0) & 1) as u8 == bj {
                    h[(i, i)] += C64::new(u, 0.0);
                }
            }
        }
        h
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device graphs always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: DeviceGraph =
            serde_json::from_str(s).map_err(|e| Error::InvalidGraph(vec![format!("malformed device JSON: {e}")]))?;
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{apply_local, BasisIndex, StateVector};
    use crate::linalg::{hermitian_deviation, Eigh};
    use std::f64::consts::PI;

    fn eq3_graph(w: f64, u: f64) -> DeviceGraph {
        // paper dots 3,4,5,6 are dots 1..4 of a two-DQD device
        DeviceGraph::new(2)
            .with_tunneling(0, Schedule::constant(w), 0.0)
            .with_tunneling(1, Schedule::constant(w), 0.0)
            .with_link(1, 4, Schedule::constant(u))
            .with_link(2, 3, Schedule::constant(u))
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(Schedule::linear(0.0, 10.0, 0.0, 10.0).value(5.0), 5.0);
        assert_eq!(Schedule::smooth(0.0, 1.0, 0.0, 1.0).value(0.5), 0.5);
        let step = Schedule::sudden(0.0, 3.0, 2.0);
        assert_eq!(step.value(2.0), 3.0);
        assert_eq!(step.value(2.0 - 1e-12), 0.0);
    }

    #[test]
    fn schedules_clamp_outside_window() {
        for s in [
            Schedule::linear(1.0, 4.0, 2.0, 5.0),
            Schedule::smooth(1.0, 4.0, 2.0, 5.0),
            Schedule::gap_adapted(1.0, 4.0, 2.0, 5.0, 0.1),
        ] {
            assert_eq!(s.value(-1.0), 1.0);
            assert_eq!(s.value(2.0), 1.0);
            assert_eq!(s.value(5.0), 4.0);
            assert_eq!(s.value(9.0), 4.0);
            assert!((s.value(5.0 - 1e-9) - 4.0).abs() < 1e-5);
        }
    }

    #[test]
    fn smooth_ramp_has_flat_ends() {
        let s = Schedule::smooth(0.0, 1.0, 0.0, 1.0);
        let h = 1e-6;
        assert!((s.value(h) - s.value(0.0)) / h < 1e-5);
        assert!((s.value(1.0) - s.value(1.0 - h)) / h < 1e-5);
    }

    #[test]
    fn gap_adapted_ramp_is_monotone_and_slow_at_start() {
        let s = Schedule::gap_adapted(0.0, 100.0, 0.0, 200.0, 0.04);
        let mut prev = s.value(0.0);
        for i in 1..=2000 {
            let v = s.value(i as f64 * 0.1);
            assert!(v >= prev);
            prev = v;
        }
        // after 10% of the window the value is still of order the scale
        assert!(s.value(20.0) < 0.01);
    }

    #[test]
    fn discontinuities_are_reported() {
        assert_eq!(Schedule::sudden(0.0, 1.0, 3.0).discontinuity(), Some(3.0));
        assert_eq!(Schedule::sudden(1.0, 1.0, 3.0).discontinuity(), None);
        assert_eq!(Schedule::linear(0.0, 1.0, 2.0, 2.0).discontinuity(), Some(2.0));
        assert_eq!(Schedule::smooth(0.0, 1.0, 0.0, 2.0).discontinuity(), None);
    }

    #[test]
    fn coulomb_projectors_match_dot_occupancy() {
        // n3 n6 in paper labels is dots 1 and 4 here: P1(q0) P0(q1)
        let link = CoulombLink { dot_i: 1, dot_j: 4, strength: Schedule::constant(2.5) };
        let c = compile_coulomb(&link, 0.0).unwrap();
        assert_eq!(c.targets, [QubitId(0), QubitId(1)]);
        // enumerate logical states: electron on dot 1 iff q0 = 1, on dot 4 iff q1 = 0
        for idx in 0..4usize {
            let (b0, b1) = (idx & 1, (idx >> 1) & 1);
            let n1 = b0 == 1;
            let n4 = b1 == 0;
            let expected = if n1 && n4 { 2.5 } else { 0.0 };
            assert_eq!(c.op[(idx, idx)].re, expected);
        }
    }

    #[test]
    fn eq3_links_penalize_disagreement() {
        let h = eq3_graph(0.0, 7.0).hamiltonian_at(0.0).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 7.0, 7.0, 0.0]);
    }

    #[test]
    fn zero_strength_link_compiles_to_zero() {
        let link = CoulombLink { dot_i: 1, dot_j: 4, strength: Schedule::constant(0.0) };
        assert!(compile_coulomb(&link, 0.0).unwrap().op.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn same_dqd_link_rejected() {
        let link = CoulombLink { dot_i: 3, dot_j: 4, strength: Schedule::constant(1.0) };
        assert!(matches!(compile_coulomb(&link, 0.0), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn single_dqd_hamiltonian() {
        let g = DeviceGraph::new(1).with_tunneling(0, Schedule::constant(1.0), 0.0);
        let h = g.hamiltonian_at(0.0).unwrap();
        assert_eq!(h[(0, 1)].re, -1.0);
        assert_eq!(h[(1, 0)].re, -1.0);
        let eig = Eigh::new(&h).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let g = StateVector::normalized(eig.vector(0)).unwrap().fix_phase();
        let h2 = 1.0 / 2f64.sqrt();
        assert!((g.amplitude(BasisIndex(0)).re - h2).abs() < 1e-14);
        assert!((g.amplitude(BasisIndex(1)).re - h2).abs() < 1e-14);
    }

    #[test]
    fn peierls_phase_leaves_spectrum_alone() {
        let g = DeviceGraph::new(1).with_tunneling(0, Schedule::constant(1.0), PI / 2.0);
        let eig = Eigh::new(&g.hamiltonian_at(0.0).unwrap()).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn epsilon_only_shifts_energy() {
        let mut g = DeviceGraph::new(1).with_tunneling(0, Schedule::constant(1.0), 0.3);
        let base = Eigh::new(&g.hamiltonian_at(0.0).unwrap()).unwrap();
        g.tunnel_terms[0].epsilon = 0.7;
        let shifted = Eigh::new(&g.hamiltonian_at(0.0).unwrap()).unwrap();
        for (a, b) in base.values.iter().zip(&shifted.values) {
            assert!((b - a - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn eq3_ground_state_at_zero_coupling_is_product() {
        let h = eq3_graph(1.0, 0.0).hamiltonian_at(0.0).unwrap();
        let eig = Eigh::new(&h).unwrap();
        assert!((eig.values[0] + 2.0).abs() < 1e-13);
        let g = StateVector::normalized(eig.vector(0)).unwrap().fix_phase();
        for i in 0..4 {
            assert!((g.amplitude(BasisIndex(i)).re - 0.5).abs() < 1e-13);
        }
        // full spectrum is {-2, 0, 0, 2}
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-13);
        }
    }

    #[test]
    fn validate_accepts_three_dqd_layout() {
        // paper labels 1..6 map directly onto dots 1..6 of a three-DQD device
        let g = DeviceGraph::new(3)
            .with_tunneling(0, Schedule::constant(1.0), 0.0)
            .with_tunneling(1, Schedule::constant(1.0), 0.0)
            .with_tunneling(2, Schedule::constant(1.0), 0.0)
            .with_link(3, 6, Schedule::constant(10.0))
            .with_link(4, 5, Schedule::constant(10.0))
            .with_link(1, 4, Schedule::constant(10.0))
            .with_link(2, 3, Schedule::constant(10.0));
        assert!(g.validate().is_ok());
    }

    #[test]
    fn validate_reports_every_problem() {
        let g = DeviceGraph::new(2)
            .with_tunneling(5, Schedule::constant(1.0), 0.0)
            .with_link(3, 4, Schedule::constant(1.0))
            .with_link(1, 9, Schedule::constant(-1.0));
        match g.validate() {
            Err(Error::InvalidGraph(list)) => {
                assert!(list.iter().any(|m| m.contains("double dot 5 does not exist")));
                assert!(list.iter().any(|m| m.contains("both dots belong")));
                assert!(list.iter().any(|m| m.contains("dot 9 does not exist")));
                assert!(list.iter().any(|m| m.contains("negative Coulomb")));
            }
            other => panic!("expected InvalidGraph, got {other:?}"),
        }
    }

    #[test]
    fn coulomb_diagonal_matches_direct_expansion() {
        // all links among 3 DQDs, compiled via apply_local vs. direct occupation sums
        let mut g = DeviceGraph::new(3);
        let mut u = 0.5;
        for a in 1..=6u32 {
            for b in (a + 1)..=6u32 {
                if (a - 1) / 2 != (b - 1) / 2 {
                    g = g.with_link(a, b, Schedule::constant(u));
                    u += 0.37;
                }
            }
        }
        let h = g.hamiltonian_at(0.0).unwrap();
        for idx in 0..8usize {
            let occupied = |dot: u32| {
                let k = ((dot - 1) / 2) as usize;
                let bit = (idx >> k) & 1;
                (dot % 2 == 1) == (bit == 1)
            };
            let direct: f64 = g
                .coulomb_links
                .iter()
                .filter(|l| occupied(l.dot_i) && occupied(l.dot_j))
                .map(|l| l.strength.value(0.0))
                .sum();
            let basis = StateVector::basis(3, BasisIndex(idx));
            let mut via_projectors = 0.0;
            for l in &g.coulomb_links {
                let c = compile_coulomb(l, 0.0).unwrap();
                let v = apply_local(basis.amplitudes(), &c.op, &c.targets).unwrap();
                via_projectors += v[idx].re;
            }
            assert!((direct - via_projectors).abs() < 1e-12);
            assert!((direct - h[(idx, idx)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_with_phases() {
        let g = DeviceGraph::new(3)
            .with_tunneling(0, Schedule::linear(0.0, 2.0, 0.0, 1.0), 0.4)
            .with_tunneling(2, Schedule::constant(1.3), -1.1)
            .with_link(1, 6, Schedule::smooth(0.0, 5.0, 0.0, 1.0));
        for t in [0.0, 0.3, 0.77, 2.0] {
            assert!(hermitian_deviation(&g.hamiltonian_at(t).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let g = eq3_graph(1.0, 3.0).with_link(1, 3, Schedule::gap_adapted(0.0, 2.0, 0.0, 5.0, 0.1));
        let text = g.to_json();
        assert!(text.contains("\"tunnel_terms\""));
        assert!(text.contains("\"coulomb_links\""));
        assert!(text.contains("\"kind\": \"constant\""));
        assert_eq!(DeviceGraph::from_json(&text).unwrap(), g);
        let minimal = r#"{"dqds":[{"id":0}],"tunnel_terms":[{"dqd":0,
            "amplitude":{"kind":"smooth_ramp","v_start":0,"v_end":1,"t_start":0,"t_end":2}}]}"#;
        let g = DeviceGraph::from_json(minimal).unwrap();
        assert_eq!(g.tunnel_terms[0].phase, 0.0);
        assert!(DeviceGraph::from_json("{\"dqds\": 3}").is_err());
    }
}
