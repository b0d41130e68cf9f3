use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator is not Hermitian (max |H - H^dag| = {0:.3e})")]
    NonHermitianInput(f64),

    #[error("Larmor frequency must be positive, got {0}")]
    InvalidFrequency(f64),

    #[error("magnetic quantum number out of range: 2m = {two_m}, 2j = {two_j}")]
    IndexOutOfRange { two_m: i32, two_j: u32 },

    #[error("temperature must be strictly positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("phase factor is not unitary (max |U U^dag - 1| = {0:.3e})")]
    NonUnitaryPhase(f64),

    #[error("density matrix is rank deficient (smallest eigenvalue {0:.3e})")]
    RankDeficient(f64),

    #[error("loop is not closed (endpoint mismatch {0:.3e})")]
    PathNotClosed(f64),

    #[error("path-ordered integrator needs at least 16 steps, got {0}")]
    InvalidSteps(usize),

    #[error("holonomy did not converge: step-doubling error {err:.3e} > {tol:.3e} at {steps} steps")]
    NotConverged { err: f64, tol: f64, steps: usize },

    #[error("temperature grid too coarse to isolate zeros near T = {0}")]
    GridTooCoarse(f64),

    #[error("weights must be 2^n nonnegative values summing to 1 (got sum {0})")]
    InvalidWeights(f64),

    #[error("register of {qubits} qubits exceeds the supported maximum of 24")]
    RegisterTooLarge { qubits: usize },

    #[error("spin dimension {dim} does not embed in a register of {register} states")]
    EmbeddingMismatch { dim: usize, register: usize },

    #[error("schedule endpoint mismatch: integrated rate gives {got}, expected {expected}")]
    ScheduleEndpointMismatch { got: f64, expected: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
