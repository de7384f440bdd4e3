//! Raman scatterers in both arms of a Mach-Zehnder, heralded phonon
//! correlations, and their anti-Stokes readout.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mz::{Interaction, MzConfig};
use super::{fit_fringe, phase_sweep, sampled_visibility, ExperimentResult};
use crate::error::{Error, Result};
use crate::fock::maps::{CreationSubstitution, FockMap};
use crate::fock::{
    entangle_with, DensityOperator, EnvironmentState, FockBasisState, FockKet, ModeLabel, ModeRegistry, Path,
    TwoQubitState,
};
use crate::optics::{detect, herald, BeamSplitter, DetectorModel, PhaseElement};
use crate::sources::{make_single_photon, spectral_overlap, Envelope, ModeGrid};

/// Register holding the non-phonon residue of the scattering event. Both
/// arms write into the same register, so only the overlap of the two
/// residues distinguishes the arms.
pub const EMISSION_REGISTER: ModeLabel = ModeLabel::environment(Path::Out1);

const PHONONS: [ModeLabel; 2] = [ModeLabel::phonon(Path::Arm1), ModeLabel::phonon(Path::Arm2)];

/// Identical Raman-active objects in both arms.
///
/// A photon in bin `k` of arm `j` becomes a Stokes photon in bin `k - s_j`
/// plus one phonon in arm `j`, where `s_1 = Ω / Δ` and
/// `s_2 = (Ω + ΔΩ) / Δ` for grid spacing `Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanScatterer {
    pub grid: ModeGrid,
    /// Spectrum of the input photon.
    pub envelope: Envelope,
    /// Stokes shift Ω in rad/s.
    pub stokes_shift: f64,
    /// Extra shift ΔΩ of the `arm2` scatterer in rad/s.
    #[serde(default)]
    pub shift_mismatch: f64,
    /// Discard the phonon record right after scattering instead of keeping it.
    #[serde(default)]
    pub markovian: bool,
}

impl RamanScatterer {
    /// 48-bin grid, Gaussian photon one bin wide near the top of the grid,
    /// Stokes shift of 16 bins.
    pub fn standard() -> Self {
        let grid = ModeGrid::uniform(2.0e15, 1.0e12, 48).expect("valid grid");
        RamanScatterer {
            envelope: Envelope::Gaussian { center: grid.value(36), width: 1.0e12 },
            stokes_shift: 16.0e12,
            shift_mismatch: 0.0,
            markovian: false,
            grid,
        }
    }

    fn bins(&self, shift: f64) -> Result<i64> {
        let x = shift / self.grid.spacing();
        let k = x.round();
        if (x - k).abs() > 1e-9 * x.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("shift {shift} is not a whole number of bins")));
        }
        Ok(k as i64)
    }

    /// `(s_1, s_2)` in bins.
    pub fn shift_bins(&self) -> Result<(i64, i64)> {
        let s1 = self.bins(self.stokes_shift)?;
        let s2 = self.bins(self.stokes_shift + self.shift_mismatch)?;
        if s1 <= 0 || s2 <= 0 {
            return Err(Error::InvalidParameter("Stokes shifts must be positive".into()));
        }
        Ok((s1, s2))
    }

    pub fn validate(&self) -> Result<()> {
        self.shift_bins()?;
        self.envelope.amplitudes(&self.grid)?;
        Ok(())
    }

    /// `<f_2|f_1>` for the Stokes photon spectra `f_j(k) = c(k + s_j)`.
    pub fn stokes_overlap(&self) -> Result<Complex64> {
        let c = self.envelope.amplitudes(&self.grid)?;
        let (s1, s2) = self.shift_bins()?;
        let n = c.len() as i64;
        let f = |s: i64| -> Vec<Complex64> {
            (0..n).map(|k| if k + s < n { c[(k + s) as usize] } else { Complex64::new(0.0, 0.0) }).collect()
        };
        Ok(spectral_overlap(&f(s2), &f(s1)))
    }

    fn registry(&self) -> Result<Arc<ModeRegistry>> {
        let n = self.grid.len();
        ModeRegistry::builder(2)
            .grid(self.grid.clone())
            .modes(
                [Path::Arm1, Path::Arm2, Path::Out1, Path::Out2]
                    .into_iter()
                    .flat_map(|p| (0..n).map(move |k| ModeLabel::spectral(p, None, k))),
            )
            .modes(PHONONS)
            .build()
    }

    /// `a†(arm j, k) -> a†(arm j, k - s_j) b†_j`. Fails if the state has a
    /// photon whose Stokes line would fall below the grid.
    fn scattering(&self, state: &FockKet) -> Result<CreationSubstitution> {
        let reg = state.registry();
        let (s1, s2) = self.shift_bins()?;
        let mut sub = CreationSubstitution::new();
        for (idx, m) in reg.modes().iter().enumerate() {
            let (shift, phonon) = match m.path {
                Path::Arm1 if m.is_photon() => (s1, PHONONS[0]),
                Path::Arm2 if m.is_photon() => (s2, PHONONS[1]),
                _ => continue,
            };
            let k = m.frequency_bin.ok_or(Error::MissingFrequencyGrid(*m))? as i64;
            if k - shift < 0 {
                if state.iter().any(|(s, _)| s.get(idx) > 0) {
                    return Err(Error::GridMismatch(format!("Stokes line of {m} falls below the grid")));
                }
                continue;
            }
            let target = reg.require(&m.with_bin(Some((k - shift) as usize)))?;
            sub.set(idx, vec![(Complex64::new(1.0, 0.0), vec![target, reg.require(&phonon)?])]);
        }
        Ok(sub)
    }
}

fn raman_of(cfg: &MzConfig) -> Result<&RamanScatterer> {
    match &cfg.interaction {
        Interaction::Raman(r) => Ok(r),
        _ => Err(Error::InvalidParameter("the phonon chain needs a Raman interaction".into())),
    }
}

/// Photon through the first splitter, phase, Raman scattering in both arms
/// and the second splitter; returned as a density operator over photons,
/// phonons and the emission register.
pub(crate) fn after_second_splitter(cfg: &MzConfig, raman: &RamanScatterer, phi: f64) -> Result<DensityOperator> {
    let reg = raman.registry()?;
    let input = make_single_photon(reg.clone(), ModeLabel::spectral(Path::Arm1, None, 0), Some(&raman.envelope))?;
    let split = cfg.first_splitter()?.apply(&input)?;
    let shifted = PhaseElement::fixed(Path::Arm2, phi).apply(&split)?;
    let scattered = shifted.apply(&raman.scattering(&shifted)?)?;
    let p1 = reg.require(&PHONONS[0])?;
    let p2 = reg.require(&PHONONS[1])?;
    let marked = entangle_with(&scattered, EMISSION_REGISTER, |s| cfg.pointer(s, p1, p2))?;
    let mut rho = DensityOperator::from_ket(&marked);
    if raman.markovian {
        rho = rho.dephase(&PHONONS)?;
    }
    cfg.second_splitter()?.apply(&rho)
}

/// Heralded state of the two phonon modes.
#[derive(Debug, Clone)]
pub struct GedankenOutcome {
    pub phonons: DensityOperator,
    pub herald_probability: f64,
    /// `<1,0| ρ |0,1>`: arm-1 phonon against arm-2 phonon.
    pub off_diagonal: Complex64,
    pub concurrence: f64,
}

/// Runs the chain at arm phase `phi` and heralds one photon at the detector
/// on `herald_path`.
pub fn gedanken_chain(cfg: &MzConfig, phi: f64, herald_path: Path) -> Result<GedankenOutcome> {
    cfg.validate()?;
    let raman = raman_of(cfg)?;
    let rho = after_second_splitter(cfg, raman, phi)?;
    let detector = DetectorModel::on_path(rho.registry(), herald_path);
    let (heralded, herald_probability) = herald(&rho, &[detector], &[1])?;
    let phonons = heralded.partial_trace(&PHONONS)?;
    let one_zero = FockBasisState::from_occupations(vec![1, 0]);
    let zero_one = FockBasisState::from_occupations(vec![0, 1]);
    let off_diagonal = phonons.element(&one_zero, &zero_one);
    let concurrence = TwoQubitState::from_occupation(&phonons, PHONONS[0], PHONONS[1])?.concurrence();
    Ok(GedankenOutcome { phonons, herald_probability, off_diagonal, concurrence })
}

/// Emission-overlap sweep: for each `γ` the arm environments are replaced
/// by a pair with `<E1|E2> = γ` (same dimension as the configured pair).
/// Also returns the outcome for the configured environments.
pub fn run_gedanken(
    cfg: &MzConfig,
    phi: f64,
    herald_path: Path,
    overlaps: &[f64],
) -> Result<(ExperimentResult, GedankenOutcome)> {
    cfg.validate()?;
    let raman = raman_of(cfg)?;
    let spectral = raman.stokes_overlap()?.norm();
    let dim = cfg.environments.0.dim();
    let rows = overlaps
        .par_iter()
        .map(|&g| {
            let mut c = cfg.clone();
            c.environments = EnvironmentState::pair_with_overlap(Complex64::new(g, 0.0), dim)?;
            let out = gedanken_chain(&c, phi, herald_path)?;
            let readout = match run_antistokes_probe(&out.phonons, &phase_sweep(64)) {
                Ok(r) => r.metric("visibility").unwrap_or(0.0),
                Err(Error::NothingToRead) => 0.0,
                Err(e) => return Err(e),
            };
            Ok((out, readout))
        })
        .collect::<Result<Vec<_>>>()?;
    let own = gedanken_chain(cfg, phi, herald_path)?;

    let expected: Vec<f64> = overlaps.iter().map(|g| g.abs() * spectral).collect();
    let conc: Vec<f64> = rows.iter().map(|(o, _)| o.concurrence).collect();
    let vis: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();
    let max_err = |xs: &[f64]| xs.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let coherence: Vec<f64> = rows.iter().map(|(o, _)| 2.0 * o.off_diagonal.norm()).collect();
    let readout_err = vis.iter().zip(&coherence).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let result = ExperimentResult::new(
        "heralded_phonon_coherence",
        vec![
            ("emission_overlap".into(), overlaps.to_vec()),
            ("p_herald".into(), rows.iter().map(|(o, _)| o.herald_probability).collect()),
            ("offdiag_abs".into(), rows.iter().map(|(o, _)| o.off_diagonal.norm()).collect()),
            ("concurrence".into(), conc.clone()),
            ("antistokes_visibility".into(), vis),
        ],
    )
    .with_metric("stokes_spectral_overlap", spectral)
    .with_metric("max_concurrence_error", max_err(&conc))
    .with_metric("max_readout_error", readout_err)
    .with_metric("concurrence", own.concurrence)
    .with_metric("p_herald", own.herald_probability)
    .with_metadata("markovian", raman.markovian)
    .with_metadata("herald", herald_path.name());
    Ok((result, own))
}

/// Swaps `|1_in, 1_b>` with `|1_out, 0_b>` for each (probe mode, anti-Stokes
/// mode, phonon) triple and leaves every other basis state alone: a
/// permutation, hence unitary on the modelled space.
struct AntiStokes {
    triples: Vec<(usize, usize, usize)>,
}

impl FockMap for AntiStokes {
    fn image(&self, registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>> {
        let mut s = state.clone();
        for &(i, o, b) in &self.triples {
            match (s.get(i), s.get(o), s.get(b)) {
                (1, 0, 1) => {
                    s.set(i, 0);
                    s.set(o, 1);
                    s.set(b, 0);
                }
                (0, 1, 0) => {
                    s.set(i, 1);
                    s.set(o, 0);
                    s.set(b, 1);
                }
                _ => {}
            }
        }
        registry.check(&s)?;
        Ok(vec![(s, Complex64::new(1.0, 0.0))])
    }
}

/// Anti-Stokes readout of a phonon pair.
///
/// A probe photon goes through a balanced interferometer whose arms pass the
/// two phonon-carrying objects; in each arm a phonon converts the probe into
/// an anti-Stokes photon. The anti-Stokes count at `out1` versus the readout
/// phase has visibility `2 |ρ_10,01|` for a single-excitation phonon state.
pub fn run_antistokes_probe(phonons: &DensityOperator, phases: &[f64]) -> Result<ExperimentResult> {
    let preg = phonons.registry();
    if preg.modes() != PHONONS {
        return Err(Error::InvalidParameter("expected a state of the two arm phonon modes".into()));
    }
    let mean: f64 = phonons
        .basis()
        .iter()
        .enumerate()
        .map(|(i, s)| phonons.matrix()[(i, i)].re * preg.excitations(s) as f64)
        .sum();
    if mean <= 0.0 {
        return Err(Error::NothingToRead);
    }

    // Bin 0 is the probe frequency, bin 1 the anti-Stokes line.
    let grid = ModeGrid::uniform(0.0, 1.0, 2)?;
    let reg = ModeRegistry::builder(preg.n_max() + 1)
        .grid(grid)
        .modes(
            [Path::Arm1, Path::Arm2, Path::Out1, Path::Out2]
                .into_iter()
                .flat_map(|p| (0..2).map(move |k| ModeLabel::spectral(p, None, k))),
        )
        .modes(PHONONS)
        .build()?;
    let probe = reg.require(&ModeLabel::spectral(Path::Arm1, None, 0))?;
    let pos: Vec<usize> = PHONONS.iter().map(|m| reg.require(m)).collect::<Result<_>>()?;
    let basis: Vec<FockBasisState> = phonons
        .basis()
        .iter()
        .map(|s| {
            let mut t = reg.vacuum();
            t.set(probe, 1);
            for (i, &p) in pos.iter().enumerate() {
                t.set(p, s.get(i));
            }
            t
        })
        .collect();
    let joint = DensityOperator::new(reg.clone(), basis, phonons.matrix().clone())?;

    let mut triples = Vec::new();
    for (arm, &b) in [Path::Arm1, Path::Arm2].iter().zip(&pos) {
        triples.push((
            reg.require(&ModeLabel::spectral(*arm, None, 0))?,
            reg.require(&ModeLabel::spectral(*arm, None, 1))?,
            b,
        ));
    }
    let convert = AntiStokes { triples };
    let bs1 = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Arm1, Path::Arm2));
    let bs2 = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2));
    let detectors = [
        DetectorModel::new(vec![ModeLabel::spectral(Path::Out1, None, 1)], crate::optics::Response::Bucket),
        DetectorModel::new(vec![ModeLabel::spectral(Path::Out2, None, 1)], crate::optics::Response::Bucket),
    ];
    let points = phases
        .par_iter()
        .map(|&theta| {
            let s = bs1.apply(&joint)?;
            let s = PhaseElement::fixed(Path::Arm2, theta).apply(&s)?;
            let s = s.apply(&convert)?;
            let s = bs2.apply(&s)?;
            let d = detect(&s, &detectors)?;
            let p = |k: [u32; 2]| d.get(&k.to_vec()).copied().unwrap_or(0.0);
            Ok((p([1, 0]), p([0, 1])))
        })
        .collect::<Result<Vec<_>>>()?;
    let d1: Vec<f64> = points.iter().map(|p| p.0).collect();
    let d2: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fringe = fit_fringe(phases, &d1)?;
    Ok(ExperimentResult::new(
        "antistokes_counts",
        vec![("readout_phase".into(), phases.to_vec()), ("p_as_d1".into(), d1.clone()), ("p_as_d2".into(), d2)],
    )
    .with_metric("visibility", fringe.visibility().min(1.0))
    .with_metric("visibility_sampled", sampled_visibility(&d1))
    .with_metric("fringe_phase", fringe.phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(gamma: f64) -> MzConfig {
        MzConfig::balanced(
            EnvironmentState::pair_with_overlap(Complex64::new(gamma, 0.0), 2).unwrap(),
            Interaction::Raman(RamanScatterer::standard()),
        )
    }

    #[test]
    fn identical_arms_herald_a_phonon_bell_state() {
        let out = gedanken_chain(&cfg(1.0), 0.0, Path::Out1).unwrap();
        assert!((out.herald_probability - 0.5).abs() < 1e-12);
        assert!((out.off_diagonal.norm() - 0.5).abs() < 1e-12);
        assert!((out.concurrence - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_overlap_scales_the_coherence() {
        // Oracle: heralded state (|f1>|10>|E1> - e^{iφ}|f2>|01>|E2>)/sqrt2
        // has off-diagonal -e^{-iφ} <f2|f1><E2|E1> / 2.
        let phi = 0.4;
        let out = gedanken_chain(&cfg(0.7), phi, Path::Out1).unwrap();
        let expect = -Complex64::from_polar(0.35, -phi);
        assert!((out.off_diagonal - expect).norm() < 1e-12);
        assert!((out.concurrence - 0.7).abs() < 1e-10);
    }

    #[test]
    fn markovian_record_kills_the_correlation() {
        let mut c = cfg(1.0);
        if let Interaction::Raman(r) = &mut c.interaction {
            r.markovian = true;
        }
        let out = gedanken_chain(&c, 0.0, Path::Out1).unwrap();
        assert!(out.concurrence < 1e-12);
        assert!(out.off_diagonal.norm() < 1e-15);
    }

    #[test]
    fn stokes_mismatch_matches_emission_overlap() {
        let mut mismatched = cfg(1.0);
        let spectral = if let Interaction::Raman(r) = &mut mismatched.interaction {
            r.shift_mismatch = 2.0e12;
            r.stokes_overlap().unwrap().norm()
        } else {
            unreachable!()
        };
        assert!(spectral < 1.0 && spectral > 0.1);
        let a = gedanken_chain(&mismatched, 0.0, Path::Out1).unwrap();
        let b = gedanken_chain(&cfg(spectral), 0.0, Path::Out1).unwrap();
        assert!((a.concurrence - b.concurrence).abs() < 1e-10);
        assert!((a.off_diagonal.norm() - b.off_diagonal.norm()).abs() < 1e-12);
    }

    #[test]
    fn readout_visibility_is_twice_the_coherence() {
        let out = gedanken_chain(&cfg(0.7), 0.0, Path::Out1).unwrap();
        let r = run_antistokes_probe(&out.phonons, &phase_sweep(64)).unwrap();
        assert!((r.metric("visibility").unwrap() - 2.0 * out.off_diagonal.norm()).abs() < 1e-10);
    }

    #[test]
    fn empty_phonon_state_has_nothing_to_read() {
        let reg = ModeRegistry::builder(2).modes(PHONONS).build().unwrap();
        let vac = DensityOperator::from_ket(&FockKet::vacuum(reg));
        assert_eq!(run_antistokes_probe(&vac, &phase_sweep(8)).unwrap_err(), Error::NothingToRead);
    }
}
