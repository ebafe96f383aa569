//! Bell-basis bookkeeping for textbook teleportation through `(|01> + |10>)/sqrt(2)`.

use serde::Serialize;

use super::InputQubit;
use crate::hilbert::{fidelity, ops, StateVector};
use crate::linalg::{real, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => ops::identity(),
            Pauli::X => ops::pauli_x(),
            Pauli::Y => ops::pauli_y(),
            Pauli::Z => ops::pauli_z(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus];

    /// Amplitudes over `|u a>` indexed `u + 2a`.
    fn amplitudes(self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellLabel::PhiPlus => [h, 0.0, 0.0, h],
            BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
            BellLabel::PsiPlus => [0.0, h, h, 0.0],
            // |01> - |10> with u written first: u = 0, a = 1 sits at index 2
            BellLabel::PsiMinus => [0.0, -h, h, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BellBranch {
    pub label: BellLabel,
    pub probability: f64,
    /// Paulis that map Bob's branch state back to the input up to global phase.
    pub corrections: Vec<Pauli>,
}

impl BellBranch {
    /// The correction when it is unique.
    pub fn correction(&self) -> Option<Pauli> {
        match self.corrections.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BellReport {
    pub branches: Vec<BellBranch>,
    /// Every branch admits at least one Pauli correction.
    pub ok: bool,
}

impl BellReport {
    pub fn branch(&self, label: BellLabel) -> &BellBranch {
        self.branches.iter().find(|b| b.label == label).expect("all four branches are reported")
    }
}

const MATCH_TOL: f64 = 1e-10;

/// Projects the sender pair of `input (x) (|01> + |10>)/sqrt(2)` onto each Bell
/// state and finds the Paulis that restore the input on the receiver.
pub fn bell_decomposition_check(input: &InputQubit) -> BellReport {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // qubit order (u, a, b); channel (a, b) indexed a + 2b
    let channel = StateVector::from_slice(&[real(0.0), real(h), real(h), real(0.0)]).expect("normalized");
    let psi = StateVector::product(&[input.state(), channel]);
    let target = input.state();

    let branches = BellLabel::ALL
        .iter()
        .map(|&label| {
            let bell = label.amplitudes();
            let mut bob = CVector::zeros(2);
            for j in 0..2 {
                for (k, &c) in bell.iter().enumerate() {
                    bob[j] += psi.amplitude(crate::hilbert::BasisIndex(k + 4 * j)) * c;
                }
            }
            let probability = bob.norm_squared();
            let corrections = match StateVector::normalized(bob) {
                Ok(state) => Pauli::ALL
                    .iter()
                    .copied()
                    .filter(|p| {
                        let fixed = state.apply_unitary(&p.matrix(), &[crate::hilbert::QubitId(0)]).expect("Paulis are unitary");
                        fidelity(&fixed, &target).map(|f| f >= 1.0 - MATCH_TOL).unwrap_or(false)
                    })
                    .collect(),
                Err(_) => Vec::new(),
            };
            BellBranch { label, probability, corrections }
        })
        .collect::<Vec<_>>();
    let ok = branches.iter().all(|b| !b.corrections.is_empty());
    BellReport { branches, ok }
}
