use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::ModeGrid;

/// Version tag for the mode and basis ordering rules below. Bump when either changes.
pub const BASIS_ORDERING_VERSION: &str = "lex(path,polarization,frequency_bin,species)/occupation-asc/v1";

/// Default truncation cap on the total number of excitations.
pub const DEFAULT_N_MAX: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    Arm1,
    Arm2,
    Out1,
    Out2,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Arm1 => "arm1",
            Path::Arm2 => "arm2",
            Path::Out1 => "out1",
            Path::Out2 => "out2",
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// What kind of excitation a mode holds.
///
/// `Environment` modes are pointer registers rather than bosonic modes: their
/// "occupation" is a level index in `0..dim` and does not count towards the
/// excitation cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Photon,
    Phonon,
    Environment,
}

/// A labelled mode. The derived ordering is the basis ordering: lexicographic
/// over (path, polarization, frequency_bin, species).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub path: Path,
    pub polarization: Option<Polarization>,
    pub frequency_bin: Option<usize>,
    pub species: Species,
}

impl ModeLabel {
    pub const fn photon(path: Path) -> Self {
        ModeLabel { path, polarization: None, frequency_bin: None, species: Species::Photon }
    }

    pub const fn polarized(path: Path, pol: Polarization) -> Self {
        ModeLabel { path, polarization: Some(pol), frequency_bin: None, species: Species::Photon }
    }

    pub const fn spectral(path: Path, pol: Option<Polarization>, bin: usize) -> Self {
        ModeLabel { path, polarization: pol, frequency_bin: Some(bin), species: Species::Photon }
    }

    pub const fn phonon(path: Path) -> Self {
        ModeLabel { path, polarization: None, frequency_bin: None, species: Species::Phonon }
    }

    pub const fn environment(path: Path) -> Self {
        ModeLabel { path, polarization: None, frequency_bin: None, species: Species::Environment }
    }

    pub fn is_photon(&self) -> bool {
        self.species == Species::Photon
    }

    pub fn with_path(self, path: Path) -> Self {
        ModeLabel { path, ..self }
    }

    pub fn with_polarization(self, pol: Option<Polarization>) -> Self {
        ModeLabel { polarization: pol, ..self }
    }

    pub fn with_bin(self, bin: Option<usize>) -> Self {
        ModeLabel { frequency_bin: bin, ..self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let species = match self.species {
            Species::Photon => "photon",
            Species::Phonon => "phonon",
            Species::Environment => "env",
        };
        write!(f, "{species}[{}", self.path)?;
        if let Some(p) = self.polarization {
            write!(f, ",{p:?}")?;
        }
        if let Some(k) = self.frequency_bin {
            write!(f, ",k{k}")?;
        }
        f.write_str("]")
    }
}

/// Occupation numbers of every mode of a registry, in registry order.
///
/// Basis states order lexicographically by this vector, so for two modes
/// `a < b` the order is |00>, |01>, |10>, |11>, ...
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState(pub(crate) Vec<u8>);

impl FockBasisState {
    pub fn vacuum(n_modes: usize) -> Self {
        FockBasisState(vec![0; n_modes])
    }

    pub fn from_occupations(occ: Vec<u8>) -> Self {
        FockBasisState(occ)
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, idx: usize) -> u8 {
        self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn set(&mut self, idx: usize, n: u8) {
        self.0[idx] = n;
    }

    /// Sub-vector over the given mode indices.
    pub fn project(&self, idx: &[usize]) -> FockBasisState {
        FockBasisState(idx.iter().map(|&i| self.0[i]).collect())
    }
}

/// The set of modes a state lives on, plus its truncation cap and optional
/// frequency grid. Modes are kept sorted and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRegistry {
    modes: Vec<ModeLabel>,
    /// `Some(d)` for environment registers of dimension `d`.
    levels: Vec<Option<u32>>,
    n_max: u32,
    grid: Option<ModeGrid>,
}

pub struct RegistryBuilder {
    entries: Vec<(ModeLabel, Option<u32>)>,
    n_max: u32,
    grid: Option<ModeGrid>,
}

impl RegistryBuilder {
    pub fn new(n_max: u32) -> Self {
        RegistryBuilder { entries: Vec::new(), n_max, grid: None }
    }

    pub fn grid(mut self, grid: ModeGrid) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn mode(mut self, label: ModeLabel) -> Self {
        self.entries.push((label, None));
        self
    }

    pub fn modes(mut self, labels: impl IntoIterator<Item = ModeLabel>) -> Self {
        self.entries.extend(labels.into_iter().map(|l| (l, None)));
        self
    }

    /// Adds an environment register with `dim` levels.
    pub fn register(mut self, label: ModeLabel, dim: u32) -> Self {
        self.entries.push((label, Some(dim)));
        self
    }

    pub fn build(self) -> Result<Arc<ModeRegistry>> {
        ModeRegistry::from_entries(self.entries, self.n_max, self.grid).map(Arc::new)
    }
}

impl ModeRegistry {
    pub fn builder(n_max: u32) -> RegistryBuilder {
        RegistryBuilder::new(n_max)
    }

    fn from_entries(
        mut entries: Vec<(ModeLabel, Option<u32>)>,
        n_max: u32,
        grid: Option<ModeGrid>,
    ) -> Result<Self> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::ModeCollision(w[0].0));
            }
        }
        for (label, level) in &entries {
            let is_env = label.species == Species::Environment;
            match level {
                Some(d) if !is_env || *d < 1 || *d > u8::MAX as u32 + 1 => {
                    return Err(Error::InvalidParameter(format!("register {label} with dimension {d}")))
                }
                None if is_env => {
                    return Err(Error::InvalidParameter(format!(
                        "environment mode {label} must be added as a register"
                    )))
                }
                _ => {}
            }
            if let Some(k) = label.frequency_bin {
                match &grid {
                    None => {
                        return Err(Error::GridMismatch(format!("mode {label} has a bin but no grid is set")))
                    }
                    Some(g) if k >= g.len() => {
                        return Err(Error::GridMismatch(format!("mode {label} indexes past {} bins", g.len())))
                    }
                    _ => {}
                }
            }
        }
        let (modes, levels) = entries.into_iter().unzip();
        Ok(ModeRegistry { modes, levels, n_max, grid })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn grid(&self) -> Option<&ModeGrid> {
        self.grid.as_ref()
    }

    pub fn index_of(&self, label: &ModeLabel) -> Option<usize> {
        self.modes.binary_search(label).ok()
    }

    pub fn require(&self, label: &ModeLabel) -> Result<usize> {
        self.index_of(label).ok_or(Error::UnknownMode(*label))
    }

    pub fn contains(&self, label: &ModeLabel) -> bool {
        self.index_of(label).is_some()
    }

    /// Register dimension, or `None` for bosonic modes.
    pub fn register_dim(&self, idx: usize) -> Option<u32> {
        self.levels[idx]
    }

    /// Indices of modes matching a predicate.
    pub fn select(&self, pred: impl Fn(&ModeLabel) -> bool) -> Vec<usize> {
        (0..self.modes.len()).filter(|&i| pred(&self.modes[i])).collect()
    }

    pub fn vacuum(&self) -> FockBasisState {
        FockBasisState::vacuum(self.modes.len())
    }

    /// Total bosonic excitation number (registers excluded).
    pub fn excitations(&self, state: &FockBasisState) -> u32 {
        state
            .0
            .iter()
            .zip(&self.levels)
            .filter(|(_, l)| l.is_none())
            .map(|(&n, _)| n as u32)
            .sum()
    }

    /// Checks the truncation cap and register ranges.
    pub fn check(&self, state: &FockBasisState) -> Result<()> {
        debug_assert_eq!(state.len(), self.modes.len());
        let total = self.excitations(state);
        if total > self.n_max {
            return Err(Error::TruncationOverflow { total, cap: self.n_max });
        }
        for (i, level) in self.levels.iter().enumerate() {
            if let Some(d) = level {
                if state.0[i] as u32 >= *d {
                    return Err(Error::InvalidParameter(format!(
                        "register {} level {} out of range {d}",
                        self.modes[i], state.0[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every basis state allowed by the cap and register dimensions, in order.
    /// Exponential in the number of modes; meant for small registries.
    pub fn basis(&self) -> Vec<FockBasisState> {
        let mut out = Vec::new();
        let mut occ = vec![0u8; self.modes.len()];
        self.enumerate(0, 0, &mut occ, &mut out);
        out
    }

    fn enumerate(&self, idx: usize, used: u32, occ: &mut Vec<u8>, out: &mut Vec<FockBasisState>) {
        if idx == self.modes.len() {
            out.push(FockBasisState(occ.clone()));
            return;
        }
        let (upper, bosonic) = match self.levels[idx] {
            Some(d) => (d - 1, false),
            None => (self.n_max - used, true),
        };
        for n in 0..=upper {
            occ[idx] = n as u8;
            self.enumerate(idx + 1, if bosonic { used + n } else { used }, occ, out);
        }
        occ[idx] = 0;
    }

    /// Registry over a subset of mode indices (sorted order is preserved).
    pub(crate) fn restrict(&self, keep: &[usize]) -> ModeRegistry {
        ModeRegistry {
            modes: keep.iter().map(|&i| self.modes[i]).collect(),
            levels: keep.iter().map(|&i| self.levels[i]).collect(),
            n_max: self.n_max,
            grid: self.grid.clone(),
        }
    }

    /// Union of two disjoint registries. Returns the combined registry and,
    /// for each operand, the position of its modes inside the union. The
    /// joint cap is the sum of the two caps.
    pub(crate) fn union(a: &ModeRegistry, b: &ModeRegistry) -> Result<(ModeRegistry, Vec<usize>, Vec<usize>)> {
        for m in &b.modes {
            if a.contains(m) {
                return Err(Error::ModeCollision(*m));
            }
        }
        let grid = match (&a.grid, &b.grid) {
            (Some(x), Some(y)) if x != y => {
                return Err(Error::GridMismatch("registries carry different grids".into()))
            }
            (Some(x), _) => Some(x.clone()),
            (None, y) => y.clone(),
        };
        let entries: Vec<_> = a
            .modes
            .iter()
            .zip(&a.levels)
            .chain(b.modes.iter().zip(&b.levels))
            .map(|(m, l)| (*m, *l))
            .collect();
        let joint = ModeRegistry::from_entries(entries, a.n_max + b.n_max, grid)?;
        let pos_a = a.modes.iter().map(|m| joint.index_of(m).unwrap()).collect();
        let pos_b = b.modes.iter().map(|m| joint.index_of(m).unwrap()).collect();
        Ok((joint, pos_a, pos_b))
    }

    /// Same registry with one extra environment register.
    pub(crate) fn with_register(&self, label: ModeLabel, dim: u32) -> Result<ModeRegistry> {
        if self.contains(&label) {
            return Err(Error::ModeCollision(label));
        }
        let mut entries: Vec<_> = self.modes.iter().copied().zip(self.levels.iter().copied()).collect();
        entries.push((label, Some(dim)));
        ModeRegistry::from_entries(entries, self.n_max, self.grid.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_order_by_path_then_polarization() {
        let a = ModeLabel::spectral(Path::Arm1, Some(Polarization::V), 0);
        let b = ModeLabel::spectral(Path::Arm2, Some(Polarization::H), 0);
        let c = ModeLabel::spectral(Path::Arm1, Some(Polarization::H), 5);
        assert!(c < a && a < b);
        assert!(ModeLabel::photon(Path::Arm1) < ModeLabel::phonon(Path::Arm1));
    }

    #[test]
    fn duplicate_modes_collide() {
        let err = ModeRegistry::builder(2)
            .mode(ModeLabel::photon(Path::Arm1))
            .mode(ModeLabel::photon(Path::Arm1))
            .build()
            .unwrap_err();
        assert_eq!(err, Error::ModeCollision(ModeLabel::photon(Path::Arm1)));
    }

    #[test]
    fn bins_require_a_grid() {
        let err = ModeRegistry::builder(2).mode(ModeLabel::spectral(Path::Arm1, None, 0)).build();
        assert!(matches!(err, Err(Error::GridMismatch(_))));
        let grid = ModeGrid::uniform(0.0, 1.0, 2).unwrap();
        let err = ModeRegistry::builder(2).grid(grid).mode(ModeLabel::spectral(Path::Arm1, None, 2)).build();
        assert!(matches!(err, Err(Error::GridMismatch(_))));
    }

    #[test]
    fn basis_respects_cap_and_register_dims() {
        let reg = ModeRegistry::builder(2)
            .mode(ModeLabel::photon(Path::Arm1))
            .mode(ModeLabel::photon(Path::Arm2))
            .register(ModeLabel::environment(Path::Arm1), 3)
            .build()
            .unwrap();
        // 6 photon patterns with n1 + n2 <= 2, times 3 register levels
        let basis = reg.basis();
        assert_eq!(basis.len(), 18);
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
        let mut over = reg.vacuum();
        over.set(reg.require(&ModeLabel::photon(Path::Arm1)).unwrap(), 2);
        over.set(reg.require(&ModeLabel::photon(Path::Arm2)).unwrap(), 1);
        assert_eq!(reg.check(&over), Err(Error::TruncationOverflow { total: 3, cap: 2 }));
    }
}
