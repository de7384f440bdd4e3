use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::QuantumState;
use crate::error::{Error, Result};
use crate::fock::maps::AMPLITUDE_FLOOR;
use crate::fock::{FockBasisState, ModeLabel, ModeRegistry, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    /// Reports the photon number.
    AmplitudeResolving,
    /// Reports click / no click.
    Bucket,
}

/// An ideal detector watching a set of modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub modes: Vec<ModeLabel>,
    pub response: Response,
    /// Arrival-time mismatches longer than this (seconds) make two photons
    /// distinguishable to the detector. `None` means no time resolution.
    pub coincidence_window: Option<f64>,
}

impl DetectorModel {
    pub fn new(modes: Vec<ModeLabel>, response: Response) -> Self {
        DetectorModel { modes, response, coincidence_window: None }
    }

    /// Bucket detector on every photon mode of a path.
    pub fn on_path(registry: &ModeRegistry, path: Path) -> Self {
        let modes = registry.modes().iter().filter(|m| m.is_photon() && m.path == path).copied().collect();
        Self::new(modes, Response::Bucket)
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.coincidence_window = Some(window);
        self
    }

    /// Whether a delay mismatch of `dt` seconds is resolved by the detector.
    pub fn resolves(&self, dt: f64) -> bool {
        self.coincidence_window.is_some_and(|w| dt.abs() > w)
    }

    fn indices(&self, registry: &ModeRegistry) -> Result<Vec<usize>> {
        self.modes.iter().map(|m| registry.index_of(m).ok_or(Error::UnknownMode(*m))).collect()
    }

    fn reading(&self, idx: &[usize], s: &FockBasisState) -> u32 {
        let n: u32 = idx.iter().map(|&i| s.get(i) as u32).sum();
        match self.response {
            Response::AmplitudeResolving => n,
            Response::Bucket => n.min(1),
        }
    }
}

/// Probability of each joint detector reading, keyed by the reading of every
/// detector in order.
pub type OutcomeDistribution = BTreeMap<Vec<u32>, f64>;

fn readings(detectors: &[DetectorModel], registry: &ModeRegistry) -> Result<impl Fn(&FockBasisState) -> Vec<u32>> {
    let idx = detectors.iter().map(|d| d.indices(registry)).collect::<Result<Vec<_>>>()?;
    let detectors = detectors.to_vec();
    Ok(move |s: &FockBasisState| detectors.iter().zip(&idx).map(|(d, i)| d.reading(i, s)).collect())
}

/// Outcome distribution of a joint measurement. Sums to the state weight
/// (1 for normalized states).
pub fn detect<S: QuantumState>(state: &S, detectors: &[DetectorModel]) -> Result<OutcomeDistribution> {
    let read = readings(detectors, state.registry())?;
    let mut out = OutcomeDistribution::new();
    for (s, p) in state.diagonal() {
        *out.entry(read(&s)).or_insert(0.0) += p;
    }
    Ok(out)
}

/// Conditions on one joint outcome; returns the normalized post-measurement
/// state and its probability.
pub fn herald<S: QuantumState>(state: &S, detectors: &[DetectorModel], outcome: &[u32]) -> Result<(S, f64)> {
    let read = readings(detectors, state.registry())?;
    let accept = |s: &FockBasisState| read(s) == outcome;
    let prob = state.probability(&accept) / state.weight();
    if prob <= AMPLITUDE_FLOOR * AMPLITUDE_FLOOR {
        return Err(Error::HeraldFailure);
    }
    Ok((state.project(&accept).renormalized()?, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockKet;
    use crate::optics::BeamSplitter;

    fn reg() -> std::sync::Arc<ModeRegistry> {
        ModeRegistry::builder(2)
            .modes([Path::Arm1, Path::Arm2, Path::Out1, Path::Out2].map(ModeLabel::photon))
            .build()
            .unwrap()
    }

    fn pair() -> [DetectorModel; 2] {
        let r = reg();
        [DetectorModel::on_path(&r, Path::Out1), DetectorModel::on_path(&r, Path::Out2)]
    }

    #[test]
    fn split_photon_is_even() {
        let k = FockKet::basis(reg(), &[(ModeLabel::photon(Path::Arm1), 1)]).unwrap();
        let out = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2)).apply(&k).unwrap();
        let d = detect(&out, &pair()).unwrap();
        assert!((d[&vec![1, 0]] - 0.5).abs() < 1e-15);
        assert!((d[&vec![0, 1]] - 0.5).abs() < 1e-15);
        assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bunched_pair_never_coincides() {
        let k = FockKet::basis(reg(), &[(ModeLabel::photon(Path::Arm1), 1), (ModeLabel::photon(Path::Arm2), 1)]).unwrap();
        let out = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2)).apply(&k).unwrap();
        let d = detect(&out, &pair()).unwrap();
        assert_eq!(d.get(&vec![1, 1]), None);
        let mut resolving = pair();
        resolving.iter_mut().for_each(|d| d.response = Response::AmplitudeResolving);
        let d = detect(&out, &resolving).unwrap();
        assert!((d[&vec![2, 0]] - 0.5).abs() < 1e-15);
        assert_eq!(herald(&out, &pair(), &[1, 1]).unwrap_err(), Error::HeraldFailure);
    }

    #[test]
    fn window_sets_distinguishability() {
        let d = DetectorModel::on_path(&reg(), Path::Out1).with_window(1e-12);
        assert!(d.resolves(2e-12));
        assert!(!d.resolves(-5e-13));
        assert!(!DetectorModel::on_path(&reg(), Path::Out1).resolves(1.0));
    }
}
