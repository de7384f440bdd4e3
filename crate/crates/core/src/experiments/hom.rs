use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::ExperimentResult;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockKet, ModeLabel, ModeRegistry, Path};
use crate::optics::{detect, BeamSplitter, DetectorModel, PhaseElement, Polarizer};
use crate::sources::{make_spdc, spdc_to_fock, spectral_registry, ModeGrid, PumpSpectrum, SpdcType};

/// Two-photon interference of a type-II SPDC pair at a beam splitter.
///
/// The signal (H) enters on `arm1` through a delay line, the idler (V) on
/// `arm2`. Optional polarizers sit on the input arms, where projecting both
/// photons onto the same diagonal polarization erases the H/V which-photon
/// label before the splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct HomConfig {
    pub grid: ModeGrid,
    pub pump: PumpSpectrum,
    /// `(α, β)` of the splitter.
    pub splitter: (Complex64, Complex64),
    pub polarizers: Option<(f64, f64)>,
    /// Detector time resolution in seconds (`None`: no time resolution).
    pub coincidence_window: Option<f64>,
}

impl HomConfig {
    /// 16-bin grid around 800 nm light with 1 THz bin spacing, CW pump,
    /// balanced splitter, polarizers at π/4.
    pub fn standard() -> Self {
        let grid = ModeGrid::centered(2.354_564_459_136_066e15, 1.0e12, 16).expect("valid grid");
        let pump = PumpSpectrum::cw(2.0 * grid.center());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        HomConfig {
            grid,
            pump,
            splitter: (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
            polarizers: Some((PI / 4.0, PI / 4.0)),
            coincidence_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.beam_splitter()?;
        if let Some((a, b)) = self.polarizers {
            for t in [a, b] {
                if !(0.0..PI).contains(&t) {
                    return Err(Error::InvalidParameter(format!("polarizer angle {t} outside [0, π)")));
                }
            }
        }
        if let Some(w) = self.coincidence_window {
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(format!("coincidence window {w}")));
            }
        }
        self.pump.on_sum_grid(&self.grid)?;
        Ok(())
    }

    pub fn beam_splitter(&self) -> Result<BeamSplitter> {
        BeamSplitter::new(self.splitter.0, self.splitter.1, (Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2))
    }

    pub fn registry(&self) -> Result<Arc<ModeRegistry>> {
        spectral_registry(&self.grid, &[Path::Arm1, Path::Arm2, Path::Out1, Path::Out2], 2)
    }

    /// The undelayed biphoton on the input arms.
    pub fn source(&self) -> Result<FockKet> {
        let b = make_spdc(&self.grid, &self.pump, SpdcType::II)?;
        spdc_to_fock(&b, self.registry()?)
    }

    /// `2π / (N Δ)`: the delay at which a flat N-bin spectrum first
    /// dephases completely.
    pub fn coherence_time(&self) -> f64 {
        coherence_time(&self.grid)
    }

    /// `steps` delays over `±4` coherence times.
    pub fn default_delays(&self, steps: usize) -> Vec<f64> {
        let t = 4.0 * self.coherence_time();
        super::linspace(-t, t, steps)
    }
}

pub fn coherence_time(grid: &ModeGrid) -> f64 {
    TAU / grid.bandwidth()
}

/// Observables at one delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint {
    pub tau: f64,
    /// Probability of one click in each output.
    pub p_coincidence: f64,
    /// Probability of both photons leaving through the same output.
    pub p_bunch: f64,
    /// Joint pass probability of the input polarizers (1 without them).
    pub p_pass: f64,
    /// Purity of the signal photon's reduced state before the splitter.
    pub signal_purity: f64,
    /// Whether the detector resolved the delay, making the photons distinguishable.
    pub time_resolved: bool,
}

/// Signal photon state after the delay, as a density operator on `arm1`.
fn signal_purity(ket: &FockKet) -> Result<f64> {
    let keep: Vec<ModeLabel> = ket.registry().modes().iter().filter(|m| m.path == Path::Arm1).copied().collect();
    Ok(DensityOperator::from_ket(ket).partial_trace(&keep)?.purity())
}

pub fn hom_point(cfg: &HomConfig, tau: f64) -> Result<HomPoint> {
    let bs = cfg.beam_splitter()?;
    let delayed = PhaseElement::delay(Path::Arm1, tau).apply(&cfg.source()?)?;
    let signal_purity = signal_purity(&delayed)?;
    let (state, p_pass) = match cfg.polarizers {
        None => (delayed, 1.0),
        Some((t1, t2)) => {
            let (a, p1) = Polarizer::new(Path::Arm1, t1).apply(&delayed)?;
            let (b, p2) = Polarizer::new(Path::Arm2, t2).apply(&a)?;
            if p1 * p2 == 0.0 {
                return Err(Error::HeraldFailure);
            }
            (b, p1 * p2)
        }
    };
    let out = bs.apply(&state)?;
    let reg = out.registry().clone();
    let detectors = [DetectorModel::on_path(&reg, Path::Out1), DetectorModel::on_path(&reg, Path::Out2)];
    let time_resolved = match cfg.coincidence_window {
        Some(w) => detectors[0].clone().with_window(w).resolves(tau),
        None => false,
    };
    let (p_coincidence, p_bunch) = if time_resolved {
        // Distinguishable photons: both transmitted or both reflected.
        let t = bs.alpha.norm_sqr();
        let r = bs.beta.norm_sqr();
        (t * t + r * r, 2.0 * t * r)
    } else {
        let d = detect(&out, &detectors)?;
        let p = |k: [u32; 2]| d.get(&k.to_vec()).copied().unwrap_or(0.0);
        (p([1, 1]), p([1, 0]) + p([0, 1]))
    };
    Ok(HomPoint { tau, p_coincidence, p_bunch, p_pass, signal_purity, time_resolved })
}

/// Coincidence probability versus delay. Sweep points run in parallel and
/// are returned in input order.
pub fn run_hom(cfg: &HomConfig, delays: &[f64]) -> Result<ExperimentResult> {
    cfg.validate()?;
    let points = delays.par_iter().map(|&t| hom_point(cfg, t)).collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&HomPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    let pc = col(|p| p.p_coincidence);
    let min = pc.iter().copied().fold(f64::INFINITY, f64::min);
    let max = pc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut result = ExperimentResult::new(
        "coincidence_probability",
        vec![
            ("tau".into(), delays.to_vec()),
            ("p_coincidence".into(), pc),
            ("p_bunch".into(), col(|p| p.p_bunch)),
            ("p_pass".into(), col(|p| p.p_pass)),
            ("signal_purity".into(), col(|p| p.signal_purity)),
        ],
    )
    .with_metric("min_coincidence", min)
    .with_metric("max_coincidence", max)
    .with_metric("coherence_time", cfg.coherence_time())
    .with_metric("max_signal_purity", points.iter().map(|p| p.signal_purity).fold(0.0, f64::max))
    .with_metadata("balanced_splitter", cfg.beam_splitter()?.is_balanced())
    .with_metadata("polarizers", json!(cfg.polarizers.map(|(a, b)| [a, b])));
    if max + min > 0.0 {
        result = result.with_metric("dip_visibility", (max - min) / (max + min));
    }
    if !cfg.beam_splitter()?.is_balanced() {
        result = result.with_metadata("warning", "unbalanced splitter: the dip cannot reach zero");
    }
    if points.iter().any(|p| p.time_resolved) {
        result = result.with_metadata("time_resolved_points", points.iter().filter(|p| p.time_resolved).count());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form for a flat spectrum on N bins: ψ(a, b) = 1/sqrt(N) on the
    /// anti-diagonal, so the exchange overlap is a Dirichlet kernel.
    fn dirichlet_oracle(cfg: &HomConfig, tau: f64) -> f64 {
        let n = cfg.grid.len();
        let s: Complex64 = (0..n)
            .map(|a| Complex64::from_polar(1.0 / n as f64, (cfg.grid.offset(a) - cfg.grid.offset(n - 1 - a)) * tau))
            .sum();
        0.5 * (1.0 - s.re)
    }

    #[test]
    fn dip_matches_closed_form() {
        let cfg = HomConfig::standard();
        for tau in cfg.default_delays(9) {
            let p = hom_point(&cfg, tau).unwrap();
            assert!((p.p_coincidence - dirichlet_oracle(&cfg, tau)).abs() < 1e-12, "tau {tau}");
            assert!((p.p_coincidence + p.p_bunch - 1.0).abs() < 1e-12);
            assert!((p.p_pass - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn bare_pair_shows_no_dip() {
        let mut cfg = HomConfig::standard();
        cfg.polarizers = None;
        let p = hom_point(&cfg, 0.0).unwrap();
        assert!((p.p_coincidence - 0.5).abs() < 1e-12);
        assert!((p.signal_purity - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_splitter_is_flagged() {
        let mut cfg = HomConfig::standard();
        cfg.splitter = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let r = run_hom(&cfg, &[0.0]).unwrap();
        assert!(r.metadata.contains_key("warning"));
        // |t² - r²|² = 0.28² coincidences remain at zero delay.
        assert!((r.column("p_coincidence").unwrap()[0] - 0.0784).abs() < 1e-12);
    }

    #[test]
    fn window_makes_long_delays_distinguishable() {
        let mut cfg = HomConfig::standard();
        cfg.coincidence_window = Some(0.5 * cfg.coherence_time());
        let p = hom_point(&cfg, cfg.coherence_time() * 0.25).unwrap();
        assert!(!p.time_resolved);
        let p = hom_point(&cfg, cfg.coherence_time()).unwrap();
        assert!(p.time_resolved);
        assert!((p.p_coincidence - 0.5).abs() < 1e-15);
    }
}
