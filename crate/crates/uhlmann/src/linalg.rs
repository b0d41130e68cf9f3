//! Small dense complex-matrix helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest entrywise modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deviation from Hermiticity, max |m - m^H|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Deviation from unitarity, max |m m^H - 1|.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m * m.adjoint()), &CMatrix::identity(n, n))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and a unitary
/// matrix of column eigenvectors. The caller is responsible for Hermiticity.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix: V f(D) V^H.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| f(x)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Numerically stable sech(x) = 1/cosh(x); never overflows.
pub fn sech(x: f64) -> f64 {
    let ax = x.abs();
    2.0 * (-ax).exp() / (1.0 + (-2.0 * ax).exp())
}
