//! Fock-space simulation of photon interference experiments: SPDC pairs at a
//! beam splitter, single photons in a Mach-Zehnder interferometer with
//! which-path environments, Raman-scattered phonons heralded by a detector
//! click, and thermal second-order spatial correlations.
//!
//! Everything is computed as exact expectation values on a truncated Fock
//! basis; there is no sampling.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod optics;
pub mod sources;
pub mod thermal;

pub use error::{Error, Result};
