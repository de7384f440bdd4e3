//! Second-order spatial correlations of a thermal two-photon field.
//!
//! Three routes to `G2(x1; x2)`:
//!
//! * [`g2_direct`] sums `|f2(x2;q) f1(x1;q') + f2(x2;q') f1(x1;q)|²` over all
//!   ordered pairs `(q, q')`, diagonal included.
//! * [`g2_via_g1`] evaluates `G11 G22 + |G12|²` from first-order functions.
//! * [`g2_from_density`] builds `E_j⁽⁺⁾ = Σ_q f_j(x_j;q) a_q` and evaluates
//!   `Tr[ρ E1⁽⁻⁾ E2⁽⁻⁾ E2⁽⁺⁾ E1⁽⁺⁾]` on the mixture from
//!   [`make_thermal_pair_mixture`](crate::sources::make_thermal_pair_mixture).
//!
//! Normalization: all values are reported on the `G11 G22 + |G12|²` scale
//! after multiplying by the constants below. Expanding the direct sum gives
//! `2 (G11 G22 + |G12|²)` exactly. The mixture puts weight `1/M` on each of
//! the `M = N(N+1)/2` pair states, and `|2_q>` picks up a `√2` from `a_q²`,
//! so the trace equals `2 (G11 G22 + |G12|²) / (N(N+1))`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{sampled_visibility, ExperimentResult};
use crate::fock::maps::annihilate;
use crate::fock::{DensityOperator, FockBasisState};
use crate::sources::ModeGrid;

/// Multiplier taking [`g2_direct`] to the first-order scale.
pub const DIRECT_SCALE: f64 = 0.5;

/// Slack on `G2 >= 0` and `|G12|² <= G11 G22`.
pub const CAUCHY_SCHWARZ_TOL: f64 = 1e-12;

/// Multiplier taking [`g2_from_density`] on the `N`-mode thermal mixture to
/// the first-order scale: `N(N+1)/2`.
pub fn density_scale(n_modes: usize) -> f64 {
    (n_modes * (n_modes + 1)) as f64 / 2.0
}

/// User-supplied `f(detector, x, q)`, detector 0 or 1.
pub type Propagator = Arc<dyn Fn(usize, f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone, Default)]
pub enum Profile {
    /// `e^{i(n q x + φ_q)} / sqrt(N)`.
    #[default]
    PlaneWave,
    /// `e^{i φ_q} / sqrt(N)` regardless of position.
    Flat,
    Custom(Propagator),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::PlaneWave => f.write_str("PlaneWave"),
            Profile::Flat => f.write_str("Flat"),
            Profile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Spatial distribution functions `f_j(x_j; q)` of both detectors over a grid
/// of transverse wavevectors (1/m).
#[derive(Debug, Clone)]
pub struct SpatialField {
    pub grid: ModeGrid,
    pub refractive_index: f64,
    /// Per-mode phases `φ_{j,q}` for detector 1 and detector 2.
    pub phases: [Vec<f64>; 2],
    pub profile: Profile,
}

impl SpatialField {
    pub fn plane_waves(grid: ModeGrid) -> Self {
        let n = grid.len();
        SpatialField { grid, refractive_index: 1.0, phases: [vec![0.0; n], vec![0.0; n]], profile: Profile::PlaneWave }
    }

    /// Same phases seen by both detectors.
    pub fn with_phases(mut self, phases: Vec<f64>) -> Self {
        self.phases = [phases.clone(), phases];
        self
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.grid.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 {
            return Err(Error::DegenerateGrid(self.grid.len()));
        }
        if !(self.refractive_index > 0.0) || !self.refractive_index.is_finite() {
            return Err(Error::InvalidParameter(format!("refractive index {}", self.refractive_index)));
        }
        for p in &self.phases {
            if p.len() != self.grid.len() {
                return Err(Error::GridMismatch(format!("{} phases for {} modes", p.len(), self.grid.len())));
            }
        }
        Ok(())
    }

    /// `f_j(x; q)` for every mode.
    pub fn amplitudes(&self, detector: usize, x: f64) -> Vec<Complex64> {
        let norm = 1.0 / (self.grid.len() as f64).sqrt();
        let phases = &self.phases[detector];
        (0..self.grid.len())
            .map(|k| {
                let q = self.grid.value(k);
                match &self.profile {
                    Profile::PlaneWave => Complex64::from_polar(norm, self.refractive_index * q * x + phases[k]),
                    Profile::Flat => Complex64::from_polar(norm, phases[k]),
                    Profile::Custom(f) => f(detector, x, q),
                }
            })
            .collect()
    }
}

/// First-order functions at one detector pair and the `G2` they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrder {
    pub g11: f64,
    pub g22: f64,
    pub g12: Complex64,
    pub g2: f64,
}

/// Brute-force double sum over ordered `(q, q')`. Swapping `q` and `q'`
/// leaves each summand unchanged.
pub fn g2_direct(field: &SpatialField, x1: f64, x2: f64) -> Result<f64> {
    field.validate()?;
    let f1 = field.amplitudes(0, x1);
    let f2 = field.amplitudes(1, x2);
    let mut total = 0.0;
    for q in 0..f1.len() {
        for r in 0..f1.len() {
            total += (f2[q] * f1[r] + f2[r] * f1[q]).norm_sqr();
        }
    }
    Ok(total)
}

pub fn g2_via_g1(field: &SpatialField, x1: f64, x2: f64) -> Result<FirstOrder> {
    field.validate()?;
    let f1 = field.amplitudes(0, x1);
    let f2 = field.amplitudes(1, x2);
    let g11: f64 = f1.iter().map(|c| c.norm_sqr()).sum();
    let g22: f64 = f2.iter().map(|c| c.norm_sqr()).sum();
    let g12: Complex64 = f1.iter().zip(&f2).map(|(a, b)| a.conj() * b).sum();
    Ok(FirstOrder { g11, g22, g12, g2: g11 * g22 + g12.norm_sqr() })
}

fn apply_field(
    ket: &BTreeMap<FockBasisState, Complex64>,
    amps: &[(usize, Complex64)],
) -> BTreeMap<FockBasisState, Complex64> {
    let mut out = BTreeMap::new();
    for (s, c) in ket {
        for &(m, f) in amps {
            if let Some((t, k)) = annihilate(s, m) {
                *out.entry(t).or_insert(Complex64::new(0.0, 0.0)) += c * f * k;
            }
        }
    }
    out
}

/// `Tr[ρ E1⁽⁻⁾ E2⁽⁻⁾ E2⁽⁺⁾ E1⁽⁺⁾]` with the annihilators acting on the
/// density operator's own basis.
///
/// Every mode of the registry must be a photon mode carrying a bin of the
/// field's grid.
pub fn g2_from_density(rho: &DensityOperator, field: &SpatialField, x1: f64, x2: f64) -> Result<f64> {
    field.validate()?;
    let reg = rho.registry();
    let mut seen = vec![false; field.n_modes()];
    let mut bins = Vec::with_capacity(reg.len());
    for m in reg.modes() {
        match m.frequency_bin {
            Some(b) if m.is_photon() && b < seen.len() && !seen[b] => {
                seen[b] = true;
                bins.push(b);
            }
            _ => return Err(Error::GridMismatch(format!("mode {m} is not a distinct bin of the field grid"))),
        }
    }
    if let Some(s) = rho.basis().iter().find(|s| reg.excitations(s) > 2) {
        return Err(Error::UnsupportedState(format!(
            "support on {} photons, only up to two are handled",
            reg.excitations(s)
        )));
    }
    let f1 = field.amplitudes(0, x1);
    let f2 = field.amplitudes(1, x2);
    let e1: Vec<(usize, Complex64)> = bins.iter().enumerate().map(|(m, &b)| (m, f1[b])).collect();
    let e2: Vec<(usize, Complex64)> = bins.iter().enumerate().map(|(m, &b)| (m, f2[b])).collect();
    let images: Vec<BTreeMap<FockBasisState, Complex64>> = rho
        .basis()
        .iter()
        .map(|s| apply_field(&apply_field(&BTreeMap::from([(s.clone(), Complex64::new(1.0, 0.0))]), &e1), &e2))
        .collect();
    let m = rho.matrix();
    let mut total = Complex64::new(0.0, 0.0);
    for (i, vi) in images.iter().enumerate() {
        if vi.is_empty() {
            continue;
        }
        for (j, vj) in images.iter().enumerate() {
            let rho_ij = m[(i, j)];
            if rho_ij == Complex64::new(0.0, 0.0) {
                continue;
            }
            let overlap: Complex64 =
                vi.iter().filter_map(|(s, a)| vj.get(s).map(|b| b.conj() * a)).sum();
            total += rho_ij * overlap;
        }
    }
    Ok(total.re)
}

/// Fixed `x1`, scanned `x2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G2Result {
    pub x1: f64,
    pub x2: Vec<f64>,
    /// On the first-order scale.
    pub g2_direct: Vec<f64>,
    pub g11: Vec<f64>,
    pub g22: Vec<f64>,
    pub g12: Vec<Complex64>,
    pub g2_via_g1: Vec<f64>,
    /// `(max - min) / (max + min)` of `G2`.
    pub visibility: f64,
    /// Same for `|G12|²` alone, the `G11 G22` background removed.
    pub dc_subtracted_visibility: f64,
}

impl G2Result {
    pub fn into_experiment_result(self) -> ExperimentResult {
        let n = self.x2.len();
        let max_dev = self.g2_direct.iter().zip(&self.g2_via_g1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ExperimentResult::new(
            "second_order_correlation",
            vec![
                ("x1".into(), vec![self.x1; n]),
                ("x2".into(), self.x2),
                ("g2_direct".into(), self.g2_direct),
                ("g11".into(), self.g11),
                ("g22".into(), self.g22),
                ("re_g12".into(), self.g12.iter().map(|c| c.re).collect()),
                ("im_g12".into(), self.g12.iter().map(|c| c.im).collect()),
                ("g2_via_g1".into(), self.g2_via_g1),
            ],
        )
        .with_metric("visibility", self.visibility)
        .with_metric("dc_subtracted_visibility", self.dc_subtracted_visibility)
        .with_metric("max_route_deviation", max_dev)
    }
}

pub fn g2_scan(field: &SpatialField, x1: f64, x2: &[f64]) -> Result<G2Result> {
    field.validate()?;
    if x2.is_empty() || x2.iter().any(|x| !x.is_finite()) || !x1.is_finite() {
        return Err(Error::InvalidParameter("scan positions must be finite and non-empty".into()));
    }
    let points = x2
        .par_iter()
        .map(|&x| Ok((g2_direct(field, x1, x)? * DIRECT_SCALE, g2_via_g1(field, x1, x)?)))
        .collect::<Result<Vec<_>>>()?;
    for (x, (d, g)) in x2.iter().zip(&points) {
        let slack = CAUCHY_SCHWARZ_TOL * (1.0 + g.g11 * g.g22);
        if *d < -slack || g.g12.norm_sqr() > g.g11 * g.g22 + slack {
            return Err(Error::InvariantViolation(format!("G2 bounds broken at x2 = {x}")));
        }
    }
    let g2_via_g1: Vec<f64> = points.iter().map(|p| p.1.g2).collect();
    let cross: Vec<f64> = points.iter().map(|p| p.1.g12.norm_sqr()).collect();
    Ok(G2Result {
        x1,
        x2: x2.to_vec(),
        g2_direct: points.iter().map(|p| p.0).collect(),
        g11: points.iter().map(|p| p.1.g11).collect(),
        g22: points.iter().map(|p| p.1.g22).collect(),
        g12: points.iter().map(|p| p.1.g12).collect(),
        visibility: sampled_visibility(&g2_via_g1),
        dc_subtracted_visibility: sampled_visibility(&cross),
        g2_via_g1,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fock::{FockKet, ModeLabel, Path};
    use crate::sources::{make_thermal_pair_mixture, thermal_registry};

    fn two_modes() -> SpatialField {
        SpatialField::plane_waves(ModeGrid::uniform(1.0e5, 2.0e4, 2).unwrap())
    }

    /// Hand expansion for two plane waves `q1, q2` with amplitude `1/sqrt2`:
    /// diagonal pairs give 2, the two off-diagonal pairs give `1 + cos(Δq Δx)`.
    fn two_mode_oracle(dq: f64, dx: f64) -> f64 {
        3.0 + (dq * dx).cos()
    }

    #[test]
    fn two_modes_match_hand_expansion() {
        let f = two_modes();
        for dx in [0.0, 1e-5, 3.3e-5, PI / 2.0e4, 1e-3] {
            let d = g2_direct(&f, 0.0, dx).unwrap();
            assert!((d - two_mode_oracle(2.0e4, dx)).abs() < 1e-12, "dx {dx}");
        }
    }

    #[test]
    fn three_routes_agree() {
        let grid = ModeGrid::uniform(3.0e5, 1.3e4, 5).unwrap();
        let f = SpatialField::plane_waves(grid.clone()).with_phases(vec![0.1, 2.0, -0.7, 1.1, 0.4]);
        let rho = make_thermal_pair_mixture(&grid, true).unwrap();
        for (x1, x2) in [(0.0, 0.0), (1e-5, -4e-5), (2.2e-4, 7e-6)] {
            let d = g2_direct(&f, x1, x2).unwrap() * DIRECT_SCALE;
            let g = g2_via_g1(&f, x1, x2).unwrap().g2;
            let r = g2_from_density(&rho, &f, x1, x2).unwrap() * density_scale(5);
            assert!((d - g).abs() < 1e-12 && (r - g).abs() < 1e-12, "{d} {g} {r}");
        }
    }

    #[test]
    fn coincident_detectors_saturate_cauchy_schwarz() {
        let f = two_modes();
        let g = g2_via_g1(&f, 2e-5, 2e-5).unwrap();
        assert!((g.g12.norm_sqr() - g.g11 * g.g22).abs() < 1e-12);
        assert!((g.g2 - 2.0 * g.g11 * g.g22).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_supports_leave_the_accidental_floor() {
        let grid = ModeGrid::uniform(1.0, 1.0, 2).unwrap();
        let f = SpatialField::plane_waves(grid).with_profile(Profile::Custom(Arc::new(|det, _x, q| {
            let on = if det == 0 { q < 1.5 } else { q > 1.5 };
            Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
        })));
        let g = g2_via_g1(&f, 0.3, 0.9).unwrap();
        assert_eq!(g.g12, Complex64::new(0.0, 0.0));
        assert!((g.g2 - g.g11 * g.g22).abs() < 1e-15);
    }

    #[test]
    fn flat_profile_has_no_spatial_structure() {
        let f = two_modes().with_profile(Profile::Flat);
        let s = g2_scan(&f, 0.0, &[0.0, 1e-5, 5e-5, 1e-4]).unwrap();
        assert!(s.visibility < 1e-15);
    }

    #[test]
    fn vacuum_and_single_photons_give_nothing() {
        let grid = ModeGrid::uniform(1.0e5, 2.0e4, 3).unwrap();
        let f = SpatialField::plane_waves(grid.clone());
        let reg = thermal_registry(&grid).unwrap();
        let vac = DensityOperator::from_ket(&FockKet::vacuum(reg.clone()));
        assert_eq!(g2_from_density(&vac, &f, 0.0, 1e-5).unwrap(), 0.0);
        let one = FockKet::basis(reg, &[(ModeLabel::spectral(Path::Arm1, None, 1), 1)]).unwrap();
        assert_eq!(g2_from_density(&DensityOperator::from_ket(&one), &f, 0.0, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_grid_is_rejected() {
        let f = SpatialField {
            grid: ModeGrid::uniform(1.0, 1.0, 2).unwrap(),
            refractive_index: 1.0,
            phases: [vec![0.0], vec![0.0]],
            profile: Profile::PlaneWave,
        };
        assert!(matches!(g2_direct(&f, 0.0, 0.0), Err(Error::GridMismatch(_))));
        assert!(matches!(ModeGrid::uniform(1.0, 1.0, 1), Err(Error::DegenerateGrid(1))));
    }

    #[test]
    fn refractive_index_rescales_the_fringe() {
        let mut f = two_modes();
        f.refractive_index = 1.5;
        let d = g2_direct(&f, 0.0, 1e-5).unwrap();
        assert!((d - two_mode_oracle(1.5 * 2.0e4, 1e-5)).abs() < 1e-12);
    }
}
