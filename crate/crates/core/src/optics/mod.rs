//! Beam splitters, phase elements, polarizers and detectors.
//!
//! Every element acts on paths rather than on individual modes: a beam
//! splitter between `arm1` and `arm2` mixes each polarization and frequency
//! bin of one arm with the same polarization and bin of the other.

mod beam_splitter;
mod detector;
mod phase;
mod polarizer;

use std::sync::Arc;

use crate::error::Result;
use crate::fock::maps::FockMap;
use crate::fock::{DensityOperator, FockBasisState, FockKet, ModeRegistry};

pub use beam_splitter::BeamSplitter;
pub use detector::{detect, herald, DetectorModel, OutcomeDistribution, Response};
pub use phase::{PhaseElement, PhaseKind};
pub use polarizer::Polarizer;

/// Operations shared by pure and mixed states so elements accept either.
pub trait QuantumState: Sized + Clone {
    fn registry(&self) -> &Arc<ModeRegistry>;

    fn evolve(&self, map: &dyn FockMap) -> Result<Self>;

    /// Squared norm of a ket or trace of a density operator.
    fn weight(&self) -> f64;

    fn renormalized(&self) -> Result<Self>;

    /// Probability weight of each basis state in the support.
    fn diagonal(&self) -> Vec<(FockBasisState, f64)>;

    /// Total probability carried by basis states with the given property.
    fn probability(&self, accept: &dyn Fn(&FockBasisState) -> bool) -> f64 {
        self.diagonal().iter().filter(|(s, _)| accept(s)).map(|(_, p)| p).sum()
    }

    /// Unnormalized projection onto basis states with the given property.
    fn project(&self, accept: &dyn Fn(&FockBasisState) -> bool) -> Self;
}

impl QuantumState for FockKet {
    fn registry(&self) -> &Arc<ModeRegistry> {
        FockKet::registry(self)
    }

    fn evolve(&self, map: &dyn FockMap) -> Result<Self> {
        self.apply(map)
    }

    fn weight(&self) -> f64 {
        self.norm_sqr()
    }

    fn renormalized(&self) -> Result<Self> {
        self.normalize()
    }

    fn diagonal(&self) -> Vec<(FockBasisState, f64)> {
        self.iter().map(|(s, a)| (s.clone(), a.norm_sqr())).collect()
    }

    fn project(&self, accept: &dyn Fn(&FockBasisState) -> bool) -> Self {
        self.filter(accept)
    }
}

impl QuantumState for DensityOperator {
    fn registry(&self) -> &Arc<ModeRegistry> {
        DensityOperator::registry(self)
    }

    fn evolve(&self, map: &dyn FockMap) -> Result<Self> {
        self.apply(map)
    }

    fn weight(&self) -> f64 {
        self.trace().re
    }

    fn renormalized(&self) -> Result<Self> {
        Ok(self.normalized()?.0)
    }

    fn diagonal(&self) -> Vec<(FockBasisState, f64)> {
        self.basis().iter().enumerate().map(|(i, s)| (s.clone(), self.matrix()[(i, i)].re)).collect()
    }

    fn project(&self, accept: &dyn Fn(&FockBasisState) -> bool) -> Self {
        DensityOperator::project(self, accept)
    }
}
