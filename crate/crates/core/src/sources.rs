//! Source states: SPDC biphotons on a frequency grid, thermal two-photon
//! mixtures, and single photons.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockKet, ModeLabel, ModeRegistry, Path, Polarization};

/// Relative tolerance for "this frequency sits on a bin".
const GRID_TOL: f64 = 1e-9;

/// Uniform grid of angular frequencies (rad/s) or transverse momenta (1/m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    start: f64,
    spacing: f64,
    len: usize,
}

impl ModeGrid {
    pub fn uniform(start: f64, spacing: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::DegenerateGrid(len));
        }
        if !(spacing > 0.0) || !spacing.is_finite() || !start.is_finite() {
            return Err(Error::GridMismatch(format!("invalid spacing {spacing} or start {start}")));
        }
        Ok(ModeGrid { start, spacing, len })
    }

    /// Grid of `len` bins centred on `center`.
    pub fn centered(center: f64, spacing: f64, len: usize) -> Result<Self> {
        Self::uniform(center - spacing * (len as f64 - 1.0) / 2.0, spacing, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn center(&self) -> f64 {
        self.start + self.spacing * (self.len as f64 - 1.0) / 2.0
    }

    pub fn value(&self, k: usize) -> f64 {
        self.start + self.spacing * k as f64
    }

    /// `value(k) - center()`, computed without cancellation.
    pub fn offset(&self, k: usize) -> f64 {
        self.spacing * (k as f64 - (self.len as f64 - 1.0) / 2.0)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.value(k)).collect()
    }

    /// Full occupied bandwidth, `len * spacing`.
    pub fn bandwidth(&self) -> f64 {
        self.spacing * self.len as f64
    }

    /// Index of the bin at `value`, if it sits on the grid.
    pub fn bin_of(&self, value: f64) -> Option<usize> {
        let x = (value - self.start) / self.spacing;
        let k = x.round();
        ((x - k).abs() < GRID_TOL * x.abs().max(1.0) && k >= 0.0 && (k as usize) < self.len).then_some(k as usize)
    }
}

/// Gaussian pump amplitude `A(ω_p)`; zero bandwidth is the CW limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpectrum {
    pub center: f64,
    pub bandwidth: f64,
}

impl PumpSpectrum {
    pub fn cw(center: f64) -> Self {
        PumpSpectrum { center, bandwidth: 0.0 }
    }

    pub fn gaussian(center: f64, bandwidth: f64) -> Self {
        PumpSpectrum { center, bandwidth }
    }

    pub fn is_cw(&self) -> bool {
        self.bandwidth == 0.0
    }

    /// Normalized `A` on the pair-sum grid `ω_1 + ω_2 = 2 start + s·spacing`,
    /// `s = 0..=2(len-1)`.
    pub fn on_sum_grid(&self, grid: &ModeGrid) -> Result<Vec<f64>> {
        if self.bandwidth < 0.0 || !self.bandwidth.is_finite() {
            return Err(Error::InvalidParameter(format!("pump bandwidth {}", self.bandwidth)));
        }
        let n_sum = 2 * grid.len() - 1;
        let x = (self.center - 2.0 * grid.start) / grid.spacing;
        if x < -GRID_TOL || x > (n_sum - 1) as f64 + GRID_TOL {
            return Err(Error::GridMismatch(format!("pump centre {} outside the pair-sum range", self.center)));
        }
        let mut a = vec![0.0; n_sum];
        if self.is_cw() {
            let s = x.round();
            if (x - s).abs() > GRID_TOL * x.abs().max(1.0) {
                return Err(Error::GridMismatch(format!("CW pump at {} is not a bin sum", self.center)));
            }
            a[s as usize] = 1.0;
            return Ok(a);
        }
        for (s, v) in a.iter_mut().enumerate() {
            let d = grid.spacing * (s as f64 - x);
            *v = (-d * d / (4.0 * self.bandwidth * self.bandwidth)).exp();
        }
        let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::GridMismatch("pump has no weight on the grid".into()));
        }
        a.iter_mut().for_each(|v| *v /= n);
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpdcType {
    /// Signal and idler share one polarization.
    I,
    /// Signal ordinary (H), idler extraordinary (V).
    II,
}

/// Two-photon amplitude table `ψ(ω_1, ω_2)` with polarization and path labels.
#[derive(Debug, Clone)]
pub struct BiphotonState {
    pub grid: ModeGrid,
    pub amplitudes: DMatrix<Complex64>,
    pub kind: SpdcType,
    pub signal_path: Path,
    pub idler_path: Path,
}

impl BiphotonState {
    pub fn polarizations(&self) -> (Polarization, Polarization) {
        match self.kind {
            SpdcType::I => (Polarization::H, Polarization::H),
            SpdcType::II => (Polarization::H, Polarization::V),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability distribution of the signal bin.
    pub fn signal_marginal(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.amplitudes.row(i).iter().map(|a| a.norm_sqr()).sum()).collect()
    }

    /// Pearson correlation of `(ω_1, ω_2)` under `|ψ|²`.
    pub fn frequency_correlation(&self) -> f64 {
        let n = self.grid.len();
        let (mut m1, mut m2, mut m11, mut m22, mut m12) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let p = self.amplitudes[(i, j)].norm_sqr();
                let (x, y) = (self.grid.offset(i), self.grid.offset(j));
                m1 += p * x;
                m2 += p * y;
                m11 += p * x * x;
                m22 += p * y * y;
                m12 += p * x * y;
            }
        }
        let cov = m12 - m1 * m2;
        cov / ((m11 - m1 * m1) * (m22 - m2 * m2)).sqrt()
    }

    /// Signal/idler bin pairs with nonzero amplitude.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.grid.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.amplitudes[(i, j)].norm() > 0.0)
            .collect()
    }
}

/// `ψ(ω_1, ω_2) ∝ A(ω_1 + ω_2)` on the grid; energy conservation is a
/// Kronecker delta on bin sums.
pub fn make_spdc(grid: &ModeGrid, pump: &PumpSpectrum, kind: SpdcType) -> Result<BiphotonState> {
    let a = pump.on_sum_grid(grid)?;
    let n = grid.len();
    let mut amps = DMatrix::from_fn(n, n, |i, j| Complex64::new(a[i + j], 0.0));
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::GridMismatch("no bin pair satisfies phase matching".into()));
    }
    amps /= Complex64::new(norm, 0.0);
    Ok(BiphotonState { grid: grid.clone(), amplitudes: amps, kind, signal_path: Path::Arm1, idler_path: Path::Arm2 })
}

/// Registry of photon modes on the given paths, with H and V for every bin.
pub fn spectral_registry(grid: &ModeGrid, paths: &[Path], n_max: u32) -> Result<Arc<ModeRegistry>> {
    let mut b = ModeRegistry::builder(n_max).grid(grid.clone());
    for &p in paths {
        for pol in [Polarization::H, Polarization::V] {
            b = b.modes((0..grid.len()).map(|k| ModeLabel::spectral(p, Some(pol), k)));
        }
    }
    b.build()
}

/// `Σ ψ(k1, k2) a†_{signal,k1} a†_{idler,k2} |0>` on a spectral registry.
pub fn spdc_to_fock(b: &BiphotonState, registry: Arc<ModeRegistry>) -> Result<FockKet> {
    if registry.grid() != Some(&b.grid) {
        return Err(Error::GridMismatch("registry grid differs from the biphoton grid".into()));
    }
    let (ps, pi) = b.polarizations();
    let terms: Vec<(Complex64, Vec<ModeLabel>)> = b
        .support()
        .into_iter()
        .map(|(i, j)| {
            (
                b.amplitudes[(i, j)],
                vec![ModeLabel::spectral(b.signal_path, Some(ps), i), ModeLabel::spectral(b.idler_path, Some(pi), j)],
            )
        })
        .collect();
    FockKet::from_creations(registry, &terms)?.normalize()
}

/// Registry of one unpolarized photon mode per grid bin (momentum modes of a
/// thermal field).
pub fn thermal_registry(grid: &ModeGrid) -> Result<Arc<ModeRegistry>> {
    ModeRegistry::builder(2)
        .grid(grid.clone())
        .modes((0..grid.len()).map(|k| ModeLabel::spectral(Path::Arm1, None, k)))
        .build()
}

/// Diagonal two-photon mixture with equal weight on every unordered pair of
/// modes `{q, q'}`. Pairs with `q = q'` (the state |2_q>) are included unless
/// `include_diagonal` is false.
pub fn make_thermal_pair_mixture(grid: &ModeGrid, include_diagonal: bool) -> Result<DensityOperator> {
    if grid.len() < 2 {
        return Err(Error::DegenerateGrid(grid.len()));
    }
    let reg = thermal_registry(grid)?;
    let n = grid.len();
    let mut states = Vec::new();
    for q in 0..n {
        for r in q..n {
            if q == r && !include_diagonal {
                continue;
            }
            let mut s = reg.vacuum();
            s.set(q, if q == r { 2 } else { 1 });
            s.set(r, if q == r { 2 } else { 1 });
            states.push(s);
        }
    }
    let w = Complex64::new(1.0 / states.len() as f64, 0.0);
    let m = DMatrix::from_diagonal_element(states.len(), states.len(), w);
    DensityOperator::new(reg, states, m)
}

/// Spectral envelope of a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    /// Gaussian in amplitude, `exp(-(ω-center)²/(4 width²))`, so `|c|²` has
    /// standard deviation `width`.
    Gaussian { center: f64, width: f64 },
}

impl Envelope {
    /// Normalized amplitudes over the grid bins.
    pub fn amplitudes(&self, grid: &ModeGrid) -> Result<Vec<Complex64>> {
        match *self {
            Envelope::Gaussian { center, width } => {
                if !(width > 0.0) {
                    return Err(Error::InvalidParameter(format!("envelope width {width}")));
                }
                let mut c: Vec<f64> = (0..grid.len())
                    .map(|k| {
                        let d = grid.value(k) - center;
                        (-d * d / (4.0 * width * width)).exp()
                    })
                    .collect();
                let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n == 0.0 {
                    return Err(Error::GridMismatch("envelope has no weight on the grid".into()));
                }
                c.iter_mut().for_each(|v| *v /= n);
                Ok(c.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
            }
        }
    }
}

/// One photon in `mode`; with an envelope, spread over the frequency bins of
/// `mode`'s path and polarization.
pub fn make_single_photon(
    registry: Arc<ModeRegistry>,
    mode: ModeLabel,
    envelope: Option<&Envelope>,
) -> Result<FockKet> {
    match envelope {
        None => FockKet::basis(registry, &[(mode, 1)]),
        Some(env) => {
            let grid = registry.grid().ok_or(Error::MissingFrequencyGrid(mode))?.clone();
            let amps = env.amplitudes(&grid)?;
            let terms: Vec<_> = amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 0.0)
                .map(|(k, a)| (*a, vec![mode.with_bin(Some(k))]))
                .collect();
            FockKet::from_creations(registry, &terms)?.normalize()
        }
    }
}

/// `Σ_k conj(a_k) b_k`.
pub fn spectral_overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
