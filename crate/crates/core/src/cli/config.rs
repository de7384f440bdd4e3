//! JSON run configuration. Every field except `experiment` has a default;
//! `--print-config-defaults` prints them all.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{linspace, phase_sweep, HomConfig, Interaction, MzConfig, RamanScatterer};
use crate::fock::{EnvironmentState, Path};
use crate::sources::{ModeGrid, PumpSpectrum};
use crate::thermal::{Profile, SpatialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Hom,
    Mz,
    Gedanken,
    ThermalG2,
}

impl ExperimentKind {
    pub fn csv_name(self) -> &'static str {
        match self {
            ExperimentKind::Hom => "hom_dip.csv",
            ExperimentKind::Mz => "mz.csv",
            ExperimentKind::Gedanken => "gedanken.csv",
            ExperimentKind::ThermalG2 => "thermal_g2.csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub hom: HomSection,
    #[serde(default)]
    pub mz: MzSection,
    #[serde(default)]
    pub gedanken: GedankenSection,
    #[serde(default)]
    pub thermal_g2: ThermalSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub numeric: NumericSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Hom,
            hom: HomSection::default(),
            mz: MzSection::default(),
            gedanken: GedankenSection::default(),
            thermal_g2: ThermalSection::default(),
            output: OutputSection::default(),
            numeric: NumericSection::default(),
        }
    }
}

fn balanced() -> [Complex64; 2] {
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)]
}

/// HOM dip with a type-II source. Frequencies in rad/s, times in s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomSection {
    pub grid_center: f64,
    pub grid_spacing: f64,
    pub bins: usize,
    /// `null` puts a CW pump at twice the grid center.
    pub pump_center: Option<f64>,
    /// 0 for a CW pump.
    pub pump_bandwidth: f64,
    /// `[alpha, beta]`, each `[re, im]`.
    pub splitter: [Complex64; 2],
    /// Input polarizer angles in rad, `null` for none.
    pub polarizers: Option<[f64; 2]>,
    pub coincidence_window: Option<f64>,
    pub delay_steps: usize,
    /// Half-width of the delay sweep in coherence times.
    pub delay_span: f64,
}

impl Default for HomSection {
    fn default() -> Self {
        let std = HomConfig::standard();
        HomSection {
            grid_center: std.grid.center(),
            grid_spacing: std.grid.spacing(),
            bins: std.grid.len(),
            pump_center: None,
            pump_bandwidth: 0.0,
            splitter: balanced(),
            polarizers: Some([FRAC_PI_4, FRAC_PI_4]),
            coincidence_window: None,
            delay_steps: 81,
            delay_span: 4.0,
        }
    }
}

impl HomSection {
    pub fn build(&self) -> Result<(HomConfig, Vec<f64>)> {
        let grid = ModeGrid::centered(self.grid_center, self.grid_spacing, self.bins)?;
        let center = self.pump_center.unwrap_or(2.0 * grid.center());
        let pump = if self.pump_bandwidth == 0.0 {
            PumpSpectrum::cw(center)
        } else {
            PumpSpectrum::gaussian(center, self.pump_bandwidth)
        };
        let cfg = HomConfig {
            grid,
            pump,
            splitter: (self.splitter[0], self.splitter[1]),
            polarizers: self.polarizers.map(|[a, b]| (a, b)),
            coincidence_window: self.coincidence_window,
        };
        cfg.validate()?;
        if self.delay_steps == 0 || !(self.delay_span >= 0.0) {
            return Err(Error::InvalidParameter("delay sweep needs steps >= 1 and span >= 0".into()));
        }
        let t = self.delay_span * cfg.coherence_time();
        let delays = linspace(-t, t, self.delay_steps);
        Ok((cfg, delays))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    None,
    GenericEntangler,
    Raman,
}

/// Arm environments: either explicit state vectors, or a pair of the given
/// dimension with the given overlap `<E1|E2>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSection {
    pub overlap: Complex64,
    pub dim: usize,
    /// Overrides `overlap` and `dim`; normalized on load.
    pub states: Option<[Vec<Complex64>; 2]>,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        EnvironmentSection { overlap: Complex64::new(1.0, 0.0), dim: 2, states: None }
    }
}

impl EnvironmentSection {
    pub fn build(&self) -> Result<(EnvironmentState, EnvironmentState)> {
        match &self.states {
            Some([a, b]) => {
                if a.len() != b.len() {
                    return Err(Error::InvalidEnvironment("environment states differ in dimension".into()));
                }
                Ok((
                    EnvironmentState::normalized(a.clone(), Path::Arm1)?,
                    EnvironmentState::normalized(b.clone(), Path::Arm2)?,
                ))
            }
            None => EnvironmentState::pair_with_overlap(self.overlap, self.dim),
        }
    }
}

/// Single-photon Mach-Zehnder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MzSection {
    pub splitters: [[Complex64; 2]; 2],
    pub environments: EnvironmentSection,
    pub interaction: InteractionKind,
    /// Only read for the `raman` interaction.
    pub raman: RamanScatterer,
    pub phase_steps: usize,
}

impl Default for MzSection {
    fn default() -> Self {
        MzSection {
            splitters: [balanced(), balanced()],
            environments: EnvironmentSection {
                overlap: Complex64::from_polar(0.5, 0.0),
                ..EnvironmentSection::default()
            },
            interaction: InteractionKind::GenericEntangler,
            raman: RamanScatterer::standard(),
            phase_steps: 64,
        }
    }
}

impl MzSection {
    pub fn build(&self) -> Result<(MzConfig, Vec<f64>)> {
        let interaction = match self.interaction {
            InteractionKind::None => Interaction::None,
            InteractionKind::GenericEntangler => Interaction::GenericEntangler,
            InteractionKind::Raman => Interaction::Raman(checked_scatterer(&self.raman)?),
        };
        let cfg = MzConfig {
            splitters: self.splitters.map(|[a, b]| (a, b)),
            environments: self.environments.build()?,
            interaction,
        };
        cfg.validate()?;
        if self.phase_steps < 3 {
            return Err(Error::InvalidParameter("phase_steps must be at least 3 for the fringe fit".into()));
        }
        Ok((cfg, phase_sweep(self.phase_steps)))
    }
}

fn checked_scatterer(r: &RamanScatterer) -> Result<RamanScatterer> {
    ModeGrid::uniform(r.grid.start(), r.grid.spacing(), r.grid.len())?;
    r.validate()?;
    Ok(r.clone())
}

/// Raman chain: the MZ with scatterers in both arms, heralded on one output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GedankenSection {
    pub scatterer: RamanScatterer,
    pub splitters: [[Complex64; 2]; 2],
    pub environments: EnvironmentSection,
    pub phi: f64,
    pub herald: Path,
    /// Emission overlaps swept over `[0, 1]`.
    pub overlap_steps: usize,
}

impl Default for GedankenSection {
    fn default() -> Self {
        GedankenSection {
            scatterer: RamanScatterer::standard(),
            splitters: [balanced(), balanced()],
            environments: EnvironmentSection::default(),
            phi: 0.0,
            herald: Path::Out1,
            overlap_steps: 21,
        }
    }
}

impl GedankenSection {
    pub fn build(&self) -> Result<(MzConfig, Vec<f64>)> {
        let cfg = MzConfig {
            splitters: self.splitters.map(|[a, b]| (a, b)),
            environments: self.environments.build()?,
            interaction: Interaction::Raman(checked_scatterer(&self.scatterer)?),
        };
        cfg.validate()?;
        if !matches!(self.herald, Path::Out1 | Path::Out2) {
            return Err(Error::InvalidParameter("herald must be out1 or out2".into()));
        }
        if self.overlap_steps == 0 || !self.phi.is_finite() {
            return Err(Error::InvalidParameter("overlap_steps must be positive and phi finite".into()));
        }
        Ok((cfg, linspace(0.0, 1.0, self.overlap_steps)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    PlaneWave,
    Flat,
}

/// Thermal `G2` scan. Wavevectors in 1/m, positions in m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalSection {
    pub modes: usize,
    pub q_start: f64,
    pub q_spacing: f64,
    pub refractive_index: f64,
    pub profile: ProfileKind,
    /// Per-mode phases shared by both detectors, `null` for zeros.
    pub phases: Option<Vec<f64>>,
    pub x1: f64,
    pub x2_start: f64,
    pub x2_end: f64,
    pub x2_steps: usize,
}

impl Default for ThermalSection {
    fn default() -> Self {
        ThermalSection {
            modes: 2,
            q_start: 1.0e5,
            q_spacing: 2.0e4,
            refractive_index: 1.0,
            profile: ProfileKind::PlaneWave,
            phases: None,
            x1: 0.0,
            x2_start: 0.0,
            x2_end: TAU / 2.0e4,
            x2_steps: 101,
        }
    }
}

impl ThermalSection {
    pub fn build(&self) -> Result<(SpatialField, Vec<f64>)> {
        let grid = ModeGrid::uniform(self.q_start, self.q_spacing, self.modes)?;
        let mut field = SpatialField::plane_waves(grid);
        field.refractive_index = self.refractive_index;
        if let Some(p) = &self.phases {
            field = field.with_phases(p.clone());
        }
        if self.profile == ProfileKind::Flat {
            field = field.with_profile(Profile::Flat);
        }
        field.validate()?;
        if self.x2_steps == 0 || ![self.x1, self.x2_start, self.x2_end].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("scan needs finite positions and x2_steps >= 1".into()));
        }
        Ok((field, linspace(self.x2_start, self.x2_end, self.x2_steps)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Used when `--out-dir` is not given.
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericSection {
    /// Largest tolerated drift of conserved quantities during a run.
    pub invariant_tol: f64,
}

impl Default for NumericSection {
    fn default() -> Self {
        NumericSection { invariant_tol: 1e-10 }
    }
}

/// Parse or validation failure, with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// Built, validated inputs for one run.
#[derive(Debug, Clone)]
pub enum Prepared {
    Hom(HomConfig, Vec<f64>),
    Mz(MzConfig, Vec<f64>),
    Gedanken { cfg: MzConfig, phi: f64, herald: Path, overlaps: Vec<f64> },
    ThermalG2 { field: SpatialField, x1: f64, x2: Vec<f64> },
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError { field: String::new(), message: e.to_string() })
    }

    /// Builds the selected experiment. Other sections are left unchecked.
    pub fn prepare(&self) -> std::result::Result<Prepared, ConfigError> {
        fn wrap(field: &'static str) -> impl Fn(Error) -> ConfigError {
            move |e| ConfigError { field: field.into(), message: e.to_string() }
        }
        if !(self.numeric.invariant_tol > 0.0) {
            return Err(ConfigError { field: "numeric.invariant_tol".into(), message: "must be positive".into() });
        }
        match self.experiment {
            ExperimentKind::Hom => {
                let (c, d) = self.hom.build().map_err(wrap("hom"))?;
                Ok(Prepared::Hom(c, d))
            }
            ExperimentKind::Mz => {
                let (c, p) = self.mz.build().map_err(wrap("mz"))?;
                Ok(Prepared::Mz(c, p))
            }
            ExperimentKind::Gedanken => {
                let (cfg, overlaps) = self.gedanken.build().map_err(wrap("gedanken"))?;
                Ok(Prepared::Gedanken { cfg, phi: self.gedanken.phi, herald: self.gedanken.herald, overlaps })
            }
            ExperimentKind::ThermalG2 => {
                let (field, x2) = self.thermal_g2.build().map_err(wrap("thermal_g2"))?;
                Ok(Prepared::ThermalG2 { field, x1: self.thermal_g2.x1, x2 })
            }
        }
    }
}
