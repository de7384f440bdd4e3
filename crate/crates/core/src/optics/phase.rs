use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::QuantumState;
use crate::error::{Error, Result};
use crate::fock::maps::DiagonalPhase;
use crate::fock::{FockBasisState, ModeRegistry, Path};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// `e^{i n φ}` for `n` photons on the path.
    Fixed(f64),
    /// `e^{i ω_k τ}` per photon in frequency bin `k`.
    Delay(f64),
}

/// Phase retarder or delay line on one path (photon modes only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseElement {
    pub path: Path,
    pub kind: PhaseKind,
}

impl PhaseElement {
    pub fn fixed(path: Path, phi: f64) -> Self {
        PhaseElement { path, kind: PhaseKind::Fixed(phi) }
    }

    pub fn delay(path: Path, tau: f64) -> Self {
        PhaseElement { path, kind: PhaseKind::Delay(tau) }
    }

    /// Per-mode single-photon phases for a registry.
    fn mode_phases(&self, registry: &ModeRegistry) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        for (i, m) in registry.modes().iter().enumerate() {
            if !m.is_photon() || m.path != self.path {
                continue;
            }
            let phase = match self.kind {
                PhaseKind::Fixed(phi) => phi,
                PhaseKind::Delay(tau) => {
                    let k = m.frequency_bin.ok_or(Error::MissingFrequencyGrid(*m))?;
                    let grid = registry.grid().ok_or(Error::MissingFrequencyGrid(*m))?;
                    // Split ω_k τ into the large common carrier part and the
                    // small bin offset so the relative phases stay exact.
                    (grid.center() * tau).rem_euclid(TAU) + grid.offset(k) * tau
                }
            };
            out.push((i, phase));
        }
        if out.is_empty() {
            return Err(Error::UnknownMode(crate::fock::ModeLabel::photon(self.path)));
        }
        Ok(out)
    }

    pub fn apply<S: QuantumState>(&self, state: &S) -> Result<S> {
        let phases = self.mode_phases(state.registry())?;
        let map = DiagonalPhase {
            phase: |s: &FockBasisState| phases.iter().map(|&(i, p)| s.get(i) as f64 * p).sum::<f64>(),
        };
        state.evolve(&map)
    }
}
