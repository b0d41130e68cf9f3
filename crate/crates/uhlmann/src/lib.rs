//! Mixed-state geometric phases of spin-j paramagnets in a magnetic field.
//!
//! A thermal spin in a slowly reoriented field traces a closed loop on the
//! parameter sphere. Parallel-transporting the amplitude of its density
//! matrix around the loop produces an Uhlmann holonomy; the overlap between
//! initial and final amplitudes (the Loschmidt amplitude) vanishes at
//! finite-temperature topological phase transitions, where the Uhlmann phase
//! jumps between 0 and pi.
//!
//! The crate provides:
//!
//! - [`spin`]: exact spin-j matrices, rotations, Wigner d-functions;
//! - [`thermal`]: canonical density matrices, amplitudes, purified states;
//! - [`mod@holonomy`]: the Uhlmann connection, path-ordered holonomy over
//!   arbitrary loops, curvature, and Chern-number quadrature;
//! - [`analytic`]: great-circle closed forms, critical temperatures, zero
//!   counting;
//! - [`protocol`]: purified-state evolution realizing the process with an
//!   ancilla instead of a reservoir;
//! - [`circuit`]: qubit-register preparation of the purified state and the
//!   digital version of the protocol.
//!
//! Everything is pure and immutable after construction; computations for
//! different parameters can run concurrently.

pub mod analytic;
pub mod circuit;
pub mod error;
pub mod holonomy;
pub mod linalg;
pub mod protocol;
pub mod spin;
pub mod thermal;

pub use error::{Error, Result};
pub use holonomy::{chi, holonomy, holonomy_adaptive, HolonomyOptions, HolonomyResult, LoopPath};
pub use spin::{hermitian_exp, wigner_d, SphereAngles, SpinJ, SpinOperators};
pub use thermal::{density_matrix, purified_overlap, purify, sqrt_density, ThermalSpec};
