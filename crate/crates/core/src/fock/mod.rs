//! Truncated Fock-space linear algebra: mode registries, kets, density
//! operators, partial traces and two-qubit entanglement measures.

mod density;
mod entangle;
mod ket;
pub mod maps;
mod measures;
mod mode;

pub use density::{DensityOperator, Dof, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use entangle::{entangle_map, entangle_with, EnvironmentState, DEFAULT_ENV_DIM, POINTER_REGISTER};
pub use ket::{FockKet, NORM_TOL};
pub use maps::FockMap;
pub use measures::{concurrence, TwoQubitState, RANK_FLOOR};
pub use mode::{
    FockBasisState, ModeLabel, ModeRegistry, Path, Polarization, RegistryBuilder, Species, BASIS_ORDERING_VERSION,
    DEFAULT_N_MAX,
};
