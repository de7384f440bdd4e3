use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::raman::{self, RamanScatterer};
use super::{fit_fringe, sampled_visibility, ExperimentResult};
use crate::error::{Error, Result};
use crate::fock::{entangle_with, EnvironmentState, FockBasisState, FockKet, ModeLabel, ModeRegistry, Path, POINTER_REGISTER};
use crate::optics::{detect, BeamSplitter, DetectorModel, PhaseElement, QuantumState};

/// What each arm's environment does to a passing photon.
#[derive(Debug, Clone, PartialEq)]
pub enum Interaction {
    /// Nothing: the environments are spectators.
    None,
    /// The photon leaves its arm's environment state `E_j` behind in a shared
    /// pointer register.
    GenericEntangler,
    /// Raman scattering: a Stokes photon plus a phonon in the arm, with the
    /// arm's environment state as the emission residue.
    Raman(RamanScatterer),
}

/// Single-photon Mach-Zehnder. The photon enters on `arm1`; the phase sits on `arm2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MzConfig {
    /// `(α, β)` of the first and second splitter.
    pub splitters: [(Complex64, Complex64); 2],
    pub environments: (EnvironmentState, EnvironmentState),
    pub interaction: Interaction,
}

impl MzConfig {
    pub fn balanced(environments: (EnvironmentState, EnvironmentState), interaction: Interaction) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = (Complex64::new(s, 0.0), Complex64::new(0.0, s));
        MzConfig { splitters: [bs, bs], environments, interaction }
    }

    pub fn first_splitter(&self) -> Result<BeamSplitter> {
        let (a, b) = self.splitters[0];
        BeamSplitter::new(a, b, (Path::Arm1, Path::Arm2), (Path::Arm1, Path::Arm2))
    }

    pub fn second_splitter(&self) -> Result<BeamSplitter> {
        let (a, b) = self.splitters[1];
        BeamSplitter::new(a, b, (Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2))
    }

    /// `<E1|E2>`.
    pub fn environment_overlap(&self) -> Result<Complex64> {
        self.environments.0.inner(&self.environments.1)
    }

    pub fn validate(&self) -> Result<()> {
        self.first_splitter()?;
        self.second_splitter()?;
        self.environment_overlap()?;
        if let Interaction::Raman(r) = &self.interaction {
            r.validate()?;
        }
        Ok(())
    }

    /// The photon in the arm it currently occupies selects `E1` or `E2`.
    pub(crate) fn pointer(&self, s: &FockBasisState, arm1: usize, arm2: usize) -> Result<&EnvironmentState> {
        match (s.get(arm1) > 0, s.get(arm2) > 0) {
            (true, false) => Ok(&self.environments.0),
            (false, true) => Ok(&self.environments.1),
            _ => Err(Error::InvalidEnvironment("branch is not localized in one arm".into())),
        }
    }
}

/// Detection probabilities at one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzPoint {
    pub phi: f64,
    pub p_d1: f64,
    pub p_d2: f64,
}

fn plain_registry() -> Result<Arc<ModeRegistry>> {
    ModeRegistry::builder(1).modes([Path::Arm1, Path::Arm2, Path::Out1, Path::Out2].map(ModeLabel::photon)).build()
}

fn clicks<S: QuantumState>(state: &S, phi: f64) -> Result<MzPoint> {
    let reg = state.registry().clone();
    let d = detect(state, &[DetectorModel::on_path(&reg, Path::Out1), DetectorModel::on_path(&reg, Path::Out2)])?;
    let p = |k: [u32; 2]| d.get(&k.to_vec()).copied().unwrap_or(0.0);
    Ok(MzPoint { phi, p_d1: p([1, 0]), p_d2: p([0, 1]) })
}

pub fn mz_point(cfg: &MzConfig, phi: f64) -> Result<MzPoint> {
    match &cfg.interaction {
        Interaction::Raman(r) => clicks(&raman::after_second_splitter(cfg, r, phi)?, phi),
        other => {
            let reg = plain_registry()?;
            let input = FockKet::basis(reg.clone(), &[(ModeLabel::photon(Path::Arm1), 1)])?;
            let split = cfg.first_splitter()?.apply(&input)?;
            let shifted = PhaseElement::fixed(Path::Arm2, phi).apply(&split)?;
            let marked = match other {
                Interaction::GenericEntangler => {
                    let a1 = reg.require(&ModeLabel::photon(Path::Arm1))?;
                    let a2 = reg.require(&ModeLabel::photon(Path::Arm2))?;
                    entangle_with(&shifted, POINTER_REGISTER, |s| cfg.pointer(s, a1, a2))?
                }
                _ => shifted,
            };
            clicks(&cfg.second_splitter()?.apply(&marked)?, phi)
        }
    }
}

/// Detector probabilities versus arm phase, with the fringe visibility and
/// offset from a sinusoid fit to `P(D1)`.
pub fn run_mz(cfg: &MzConfig, phases: &[f64]) -> Result<ExperimentResult> {
    cfg.validate()?;
    let points = phases.par_iter().map(|&p| mz_point(cfg, p)).collect::<Result<Vec<_>>>()?;
    let d1: Vec<f64> = points.iter().map(|p| p.p_d1).collect();
    let d2: Vec<f64> = points.iter().map(|p| p.p_d2).collect();
    let fringe = fit_fringe(phases, &d1)?;
    let total_err = points.iter().map(|p| (p.p_d1 + p.p_d2 - 1.0).abs()).fold(0.0, f64::max);
    let overlap = cfg.environment_overlap()?;
    let kind = match cfg.interaction {
        Interaction::None => "none",
        Interaction::GenericEntangler => "generic_entangler",
        Interaction::Raman(_) => "raman",
    };
    Ok(ExperimentResult::new(
        "detector_probability",
        vec![("phi".into(), phases.to_vec()), ("p_d1".into(), d1.clone()), ("p_d2".into(), d2)],
    )
    .with_metric("visibility", fringe.visibility().min(1.0))
    .with_metric("visibility_sampled", sampled_visibility(&d1))
    .with_metric("fringe_phase", fringe.phase)
    .with_metric("environment_overlap_abs", overlap.norm())
    .with_metric("probability_conservation_error", total_err)
    .with_metadata("interaction", kind))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::experiments::phase_sweep;

    fn cfg(gamma: Complex64, interaction: Interaction) -> MzConfig {
        MzConfig::balanced(EnvironmentState::pair_with_overlap(gamma, 2).unwrap(), interaction)
    }

    #[test]
    fn matched_arms_send_the_photon_to_one_port() {
        let c = cfg(Complex64::new(1.0, 0.0), Interaction::None);
        let p0 = mz_point(&c, 0.0).unwrap();
        assert!(p0.p_d1 < 1e-15 && (p0.p_d2 - 1.0).abs() < 1e-15);
        let pi = mz_point(&c, PI).unwrap();
        assert!((pi.p_d1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn visibility_tracks_the_environment_overlap() {
        // Oracle: P(D1) = (1 - |γ| cos(φ + arg γ)) / 2 for the reduced photon state.
        let g = Complex64::from_polar(0.5, PI / 3.0);
        let c = cfg(g, Interaction::GenericEntangler);
        let phases = phase_sweep(64);
        let r = run_mz(&c, &phases).unwrap();
        for (phi, p) in phases.iter().zip(r.column("p_d1").unwrap()) {
            assert!((p - 0.5 * (1.0 - 0.5 * (phi + PI / 3.0).cos())).abs() < 1e-14);
        }
        assert!((r.metric("visibility").unwrap() - 0.5).abs() < 1e-12);
        assert!((r.metric("fringe_phase").unwrap() - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_environments_leave_only_the_background() {
        let c = cfg(Complex64::new(0.0, 0.0), Interaction::GenericEntangler);
        let r = run_mz(&c, &phase_sweep(16)).unwrap();
        for p in r.column("p_d1").unwrap() {
            assert!((p - 0.5).abs() < 1e-15);
        }
        assert!(r.metric("visibility").unwrap() < 1e-14);
    }
}
