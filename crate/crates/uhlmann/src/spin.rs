//! Exact spin-j matrix representations, rotations, and Wigner d-functions.
//!
//! The magnetic quantum numbers are ordered descending, m = j, j-1, ..., -j,
//! so `jz` is diag(j, ..., -j). Half-integer spins are kept exact by storing
//! the doubled value 2j.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Spin quantum number, stored as 2j so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinJ {
    two_j: u32,
}

impl SpinJ {
    pub fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert-space dimension 2j + 1.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Doubled magnetic quantum numbers in basis order (descending m).
    pub fn two_m_values(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.dim()).map(|k| self.two_j as i32 - 2 * k as i32)
    }

    /// Magnetic quantum numbers in basis order (descending).
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.two_m_values().map(|tm| tm as f64 / 2.0)
    }

    /// Basis index of the eigenstate with quantum number m = two_m / 2.
    pub fn index_of(&self, two_m: i32) -> Result<usize> {
        let two_j = self.two_j as i32;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return Err(Error::IndexOutOfRange {
                two_m,
                two_j: self.two_j,
            });
        }
        Ok(((two_j - two_m) / 2) as usize)
    }
}

/// Orientation on the parameter sphere. No range restriction: winding paths
/// run theta and phi far outside [0, pi] x [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereAngles {
    pub theta: f64,
    pub phi: f64,
}

impl SphereAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Unit vector (sin t cos p, sin t sin p, cos t); identifies points on S^2
    /// regardless of how the angles wind.
    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }
}

/// The (2j+1)-dimensional angular-momentum matrices.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub j: SpinJ,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

impl SpinOperators {
    /// Builds J_x, J_y, J_z from the ladder operators
    /// J_+- |j n> = sqrt((j -+ n)(j +- n + 1)) |j n +- 1>.
    pub fn new(j: SpinJ) -> Self {
        let dim = j.dim();
        let jv = j.j();
        let mut jplus = CMatrix::zeros(dim, dim);
        for (k, tm) in j.two_m_values().enumerate() {
            let n = tm as f64 / 2.0;
            if k > 0 {
                // J_+ raises m: |j n> at column k lands on row k-1.
                jplus[(k - 1, k)] = Complex64::new(((jv - n) * (jv + n + 1.0)).sqrt(), 0.0);
            }
        }
        let jminus = jplus.adjoint();
        let jx = (&jplus + &jminus).scale(0.5);
        let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);
        let jz = CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(jv - r as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { j, jx, jy, jz }
    }

    /// Rotation R(theta, phi) = e^{-i phi J_z} e^{-i theta J_y}.
    pub fn rotation(&self, a: SphereAngles) -> CMatrix {
        self.exp_jz(a.phi) * self.exp_jy(a.theta)
    }

    /// Gauge transformation V(theta, phi) = R(theta, phi) e^{i phi J_z};
    /// its columns are the energy eigenstates |psi_m(theta, phi)>.
    pub fn gauge(&self, a: SphereAngles) -> CMatrix {
        self.rotation(a) * self.exp_jz(-a.phi)
    }

    /// Hamiltonian H = omega0 (J_x sin t cos p + J_y sin t sin p + J_z cos t).
    pub fn hamiltonian(&self, a: SphereAngles, omega0: f64) -> Result<CMatrix> {
        if omega0 <= 0.0 || !omega0.is_finite() {
            return Err(Error::InvalidFrequency(omega0));
        }
        let (st, ct) = (a.theta.sin(), a.theta.cos());
        let (sp, cp) = (a.phi.sin(), a.phi.cos());
        Ok((self.jx.scale(st * cp) + self.jy.scale(st * sp) + self.jz.scale(ct)).scale(omega0))
    }

    /// e^{-i phi J_z}, evaluated exactly on the diagonal.
    pub fn exp_jz(&self, phi: f64) -> CMatrix {
        let dim = self.j.dim();
        let mut u = CMatrix::zeros(dim, dim);
        for (k, m) in self.j.m_values().enumerate() {
            u[(k, k)] = Complex64::from_polar(1.0, -phi * m);
        }
        u
    }

    /// e^{-i theta J_y}; real orthogonal since i J_y is real.
    pub fn exp_jy(&self, theta: f64) -> CMatrix {
        hermitian_exp(&self.jy, theta).expect("J_y is Hermitian by construction")
    }
}

/// Unitary e^{-i s H} of a Hermitian generator, by exact eigendecomposition.
pub fn hermitian_exp(generator: &CMatrix, scale: f64) -> Result<CMatrix> {
    let herm_err = linalg::hermiticity_error(generator);
    if herm_err > 1e-10 {
        return Err(Error::NonHermitianInput(herm_err));
    }
    Ok(linalg::hermitian_map(generator, |x| {
        Complex64::from_polar(1.0, -scale * x)
    }))
}

/// Wigner d-function d^j_{m m'}(Theta) = <j m| e^{-i Theta J_y} |j m'>,
/// with m, m' passed as doubled values. The matrix element is real; its
/// residual imaginary part is checked against 1e-10.
pub fn wigner_d(j: SpinJ, two_m: i32, two_mp: i32, theta: f64) -> Result<f64> {
    let row = j.index_of(two_m)?;
    let col = j.index_of(two_mp)?;
    let ops = SpinOperators::new(j);
    let u = ops.exp_jy(theta);
    let elem = u[(row, col)];
    debug_assert!(
        elem.im.abs() < 1e-10,
        "Wigner d element has imaginary residue {:.3e}",
        elem.im
    );
    Ok(elem.re)
}
