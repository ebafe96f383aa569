//! Dense complex linear algebra shared by the propagators and diagnostics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;

/// Largest absolute entry of `H - H^dagger`.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension { expected: h.nrows(), actual: h.ncols() });
    }
    let scale = h.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian(dev));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn new(h: &CMatrix) -> Result<Self> {
        check_hermitian(h)?;
        Ok(Self::new_unchecked(h))
    }

    pub(crate) fn new_unchecked(h: &CMatrix) -> Self {
        let n = h.nrows();
        // real symmetric input (every ramp without a flux phase) takes the cheaper real solver
        if h.iter().all(|z| z.im == 0.0) {
            let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)].re + h[(j, i)].re));
            let eig = SymmetricEigen::new(sym);
            let order = ascending(eig.eigenvalues.as_slice());
            let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let vectors = CMatrix::from_fn(n, n, |i, j| C64::new(eig.eigenvectors[(i, order[j])], 0.0));
            return Eigh { values, vectors };
        }
        // symmetrize so roundoff in the input cannot leak into the spectrum
        let sym = (h + h.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        let order = ascending(eig.eigenvalues.as_slice());
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Eigh { values, vectors }
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `exp(-i H t) psi`.
    pub fn propagate(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }

    /// Applies `f` to the spectrum: `V f(D) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Kronecker product `a (x) b`; `b` occupies the low-order index bits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ascending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}
