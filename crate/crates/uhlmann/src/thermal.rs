//! Canonical density matrices of the spin-j paramagnet, their square roots,
//! amplitudes W = sqrt(rho) U, and purified states on the doubled space.
//!
//! Purified states are stored as the row-major vectorization of the amplitude
//! matrix. With that layout the ordinary complex inner product of two purified
//! vectors equals the Hilbert-Schmidt product Tr(W1^dag W2), which is the
//! transpose-without-conjugation convention for the ancilla factor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::spin::{SphereAngles, SpinJ, SpinOperators};

/// Temperature, Larmor frequency, and spin of the thermal ensemble
/// (units with hbar = k_B = 1).
#[derive(Debug, Clone, Copy)]
pub struct ThermalSpec {
    temperature: f64,
    omega0: f64,
    j: SpinJ,
}

impl ThermalSpec {
    /// The Uhlmann machinery needs a full-rank state, so T = 0 is rejected;
    /// zero-temperature results come from the analytic limit queries instead.
    pub fn new(temperature: f64, omega0: f64, j: SpinJ) -> Result<Self> {
        if temperature <= 0.0 || !temperature.is_finite() {
            return Err(Error::NonPositiveTemperature(temperature));
        }
        if omega0 <= 0.0 || !omega0.is_finite() {
            return Err(Error::InvalidFrequency(omega0));
        }
        Ok(Self {
            temperature,
            omega0,
            j,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn j(&self) -> SpinJ {
        self.j
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Boltzmann weights e^{-beta omega0 m} / Z in basis order (descending m).
    /// Exponents are shifted by the ground-state energy before normalizing,
    /// so large beta never overflows.
    pub fn boltzmann_weights(&self) -> Vec<f64> {
        let x = self.beta() * self.omega0;
        let jv = self.j.j();
        let raw: Vec<f64> = self.j.m_values().map(|m| (-x * (m + jv)).exp()).collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }
}

/// A full-rank thermal state together with its known spectral data:
/// eigenvalues in descending-m order and the eigenvector matrix V(theta, phi).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: CMatrix,
    pub eigvals: Vec<f64>,
    pub eigvecs: CMatrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

/// An amplitude W = sqrt(rho) U of a density matrix.
#[derive(Debug, Clone)]
pub struct Amplitude {
    pub w: CMatrix,
    pub phase_factor: CMatrix,
}

/// A purified state on the doubled (system x ancilla) space, stored as the
/// row-major vectorization of the amplitude: v[a * dim + b] = W[(a, b)].
#[derive(Debug, Clone)]
pub struct PurifiedState {
    pub vector: CVector,
    dim: usize,
}

impl PurifiedState {
    pub fn from_amplitude(w: &CMatrix) -> Self {
        let dim = w.nrows();
        let vector = CVector::from_iterator(
            dim * dim,
            (0..dim).flat_map(|a| (0..dim).map(move |b| (a, b))).map(|(a, b)| w[(a, b)]),
        );
        Self { vector, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Assembles the purified vector from per-mode system and ancilla kets,
    /// sum_m sqrt(lambda_m) |s_m> (x) |a_m>, with the ancilla coordinates taken
    /// literally (no conjugation).
    pub fn from_modes(weights: &[f64], system: &[CVector], ancilla: &[CVector]) -> Self {
        let dim = system[0].len();
        let mut vector = CVector::zeros(dim * dim);
        for ((w, s), a) in weights.iter().zip(system).zip(ancilla) {
            let sw = w.sqrt();
            for i in 0..dim {
                for k in 0..dim {
                    vector[i * dim + k] += s[i] * a[k] * sw;
                }
            }
        }
        Self { vector, dim }
    }

    /// Partial trace over the ancilla factor; recovers W W^dag = rho.
    pub fn partial_trace_ancilla(&self) -> CMatrix {
        let d = self.dim;
        CMatrix::from_fn(d, d, |a, c| {
            (0..d)
                .map(|b| self.vector[a * d + b] * self.vector[c * d + b].conj())
                .sum()
        })
    }
}

/// Inner product <W1|W2> of two purified states. Equals the Hilbert-Schmidt
/// product Tr(W1^dag W2) of the underlying amplitudes; for amplitudes of the
/// same rho this is Tr(rho U2 U1^dag). This is the single audited place where
/// the ancilla conjugation convention is applied.
pub fn purified_overlap(w1: &PurifiedState, w2: &PurifiedState) -> Complex64 {
    w1.vector.dotc(&w2.vector)
}

/// Thermal state rho = V e^{-beta omega0 J_z} V^dag / Z at the given angles.
/// The spectral data reuses the analytically known eigenvectors V |j m>.
pub fn density_matrix(
    ops: &SpinOperators,
    spec: &ThermalSpec,
    a: SphereAngles,
) -> Result<DensityMatrix> {
    let eigvals = spec.boltzmann_weights();
    let eigvecs = ops.gauge(a);
    let lam = CMatrix::from_diagonal(&CVector::from_iterator(
        eigvals.len(),
        eigvals.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let rho = &eigvecs * lam * eigvecs.adjoint();
    Ok(DensityMatrix {
        rho,
        eigvals,
        eigvecs,
    })
}

/// Hermitian positive-definite square root, V diag(sqrt(lambda)) V^dag.
pub fn sqrt_density(dm: &DensityMatrix) -> CMatrix {
    let lam = CMatrix::from_diagonal(&CVector::from_iterator(
        dm.eigvals.len(),
        dm.eigvals.iter().map(|&x| Complex64::new(x.sqrt(), 0.0)),
    ));
    &dm.eigvecs * lam * dm.eigvecs.adjoint()
}

/// Attaches a unitary phase factor: W = sqrt(rho) U, plus the purified state.
pub fn purify(dm: &DensityMatrix, phase: &CMatrix) -> Result<(Amplitude, PurifiedState)> {
    let uerr = linalg::unitarity_error(phase);
    if uerr > 1e-10 {
        return Err(Error::NonUnitaryPhase(uerr));
    }
    let w = sqrt_density(dm) * phase;
    let purified = PurifiedState::from_amplitude(&w);
    Ok((
        Amplitude {
            w,
            phase_factor: phase.clone(),
        },
        purified,
    ))
}
