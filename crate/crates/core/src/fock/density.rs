use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::ket::FockKet;
use super::maps::{FockMap, AMPLITUDE_FLOOR};
use super::mode::{FockBasisState, ModeLabel, ModeRegistry, Species};
use crate::error::{Error, Result};

/// Elementwise tolerance for Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for the unit-trace check.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const POSITIVITY_TOL: f64 = -1e-10;

/// A density operator over an explicit, sorted list of basis states of one
/// registry. States outside `basis` carry zero weight.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    registry: Arc<ModeRegistry>,
    basis: Vec<FockBasisState>,
    matrix: DMatrix<Complex64>,
}

/// Internal degree of freedom that can be traced out of every mode at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dof {
    Polarization,
    Frequency,
}

impl DensityOperator {
    /// Builds an operator from a basis and matrix; the basis is sorted
    /// (matrix permuted to match) and must be free of duplicates.
    pub fn new(registry: Arc<ModeRegistry>, basis: Vec<FockBasisState>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::InvalidParameter("matrix shape does not match basis".into()));
        }
        for s in &basis {
            if s.len() != registry.len() {
                return Err(Error::RegistryMismatch);
            }
            registry.check(s)?;
        }
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by(|&a, &b| basis[a].cmp(&basis[b]));
        if order.windows(2).any(|w| basis[w[0]] == basis[w[1]]) {
            return Err(Error::InvalidParameter("duplicate basis state".into()));
        }
        let sorted: Vec<_> = order.iter().map(|&i| basis[i].clone()).collect();
        let m = DMatrix::from_fn(basis.len(), basis.len(), |i, j| matrix[(order[i], order[j])]);
        Ok(DensityOperator { registry, basis: sorted, matrix: m })
    }

    pub fn from_ket(ket: &FockKet) -> Self {
        let basis: Vec<_> = ket.iter().map(|(s, _)| s.clone()).collect();
        let v: Vec<_> = ket.iter().map(|(_, a)| *a).collect();
        let matrix = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj());
        DensityOperator { registry: ket.registry().clone(), basis, matrix }
    }

    /// Incoherent mixture `Σ p_k |ψ_k><ψ_k|` of kets on one registry.
    pub fn mixture(components: &[(f64, FockKet)]) -> Result<Self> {
        let first = components.first().ok_or(Error::ZeroState)?;
        let registry = first.1.registry().clone();
        let mut acc: BTreeMap<(FockBasisState, FockBasisState), Complex64> = BTreeMap::new();
        for (p, ket) in components {
            if ket.registry() != &registry {
                return Err(Error::RegistryMismatch);
            }
            for (si, ai) in ket.iter() {
                for (sj, aj) in ket.iter() {
                    *acc.entry((si.clone(), sj.clone())).or_default() += ai * aj.conj() * *p;
                }
            }
        }
        Self::from_entries(registry, acc)
    }

    fn from_entries(
        registry: Arc<ModeRegistry>,
        entries: BTreeMap<(FockBasisState, FockBasisState), Complex64>,
    ) -> Result<Self> {
        let mut basis: Vec<FockBasisState> = entries.keys().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        basis.sort();
        basis.dedup();
        let index: HashMap<&FockBasisState, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for ((a, b), v) in &entries {
            m[(index[a], index[b])] += v;
        }
        Ok(DensityOperator { registry, basis, matrix: m })
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn basis(&self) -> &[FockBasisState] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn position(&self, s: &FockBasisState) -> Option<usize> {
        self.basis.binary_search(s).ok()
    }

    /// `<a|ρ|b>`.
    pub fn element(&self, a: &FockBasisState, b: &FockBasisState) -> Complex64 {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`, computed as `Σ|ρ_ij|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (Hermitian part).
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_error();
        if h > HERMITIAN_TOL {
            return Err(Error::InvariantViolation(format!("hermiticity error {h:e}")));
        }
        let t = self.trace();
        if (t.re - 1.0).abs() > TRACE_TOL || t.im.abs() > TRACE_TOL {
            return Err(Error::InvariantViolation(format!("trace {t}")));
        }
        let m = self.min_eigenvalue();
        if m < POSITIVITY_TOL {
            return Err(Error::InvariantViolation(format!("negative eigenvalue {m:e}")));
        }
        Ok(())
    }

    /// Rescales to unit trace; returns the original trace.
    pub fn normalized(&self) -> Result<(DensityOperator, f64)> {
        let t = self.trace().re;
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::ZeroState);
        }
        let mut out = self.clone();
        out.matrix /= Complex64::new(t, 0.0);
        Ok((out, t))
    }

    /// `Tr(ρ O)` for an operator given as a [`FockMap`].
    pub fn expectation(&self, op: &dyn FockMap) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, s) in self.basis.iter().enumerate() {
            for (t, a) in op.image(&self.registry, s)? {
                if let Some(j) = self.position(&t) {
                    acc += self.matrix[(i, j)] * a;
                }
            }
        }
        Ok(acc)
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_with_pure(&self, ket: &FockKet) -> Result<f64> {
        if ket.registry() != &self.registry {
            return Err(Error::RegistryMismatch);
        }
        let v: Vec<Complex64> = self.basis.iter().map(|s| ket.amplitude(s)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += v[i].conj() * self.matrix[(i, j)] * v[j];
            }
        }
        Ok(acc.re)
    }

    /// Uhlmann fidelity `(Tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`.
    pub fn fidelity(&self, other: &DensityOperator) -> Result<f64> {
        if other.registry != self.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut basis: Vec<FockBasisState> = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        basis.sort();
        basis.dedup();
        let a = self.embedded(&basis);
        let b = other.embedded(&basis);
        let sa = hermitian_sqrt(&a);
        let m = &sa * b * &sa;
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let root: f64 = m.symmetric_eigenvalues().iter().map(|&l| l.max(0.0).sqrt()).sum();
        Ok(root * root)
    }

    fn embedded(&self, basis: &[FockBasisState]) -> DMatrix<Complex64> {
        let pos: Vec<Option<usize>> = basis.iter().map(|s| self.position(s)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |i, j| match (pos[i], pos[j]) {
            (Some(a), Some(b)) => self.matrix[(a, b)],
            _ => Complex64::new(0.0, 0.0),
        })
    }

    /// `M ρ M†` where the columns of `M` are the images of the basis states.
    pub fn apply(&self, map: &dyn FockMap) -> Result<DensityOperator> {
        let images = self
            .basis
            .iter()
            .map(|s| map.image(&self.registry, s))
            .collect::<Result<Vec<_>>>()?;
        let mut out_basis: Vec<FockBasisState> = images.iter().flatten().map(|(t, _)| t.clone()).collect();
        out_basis.sort();
        out_basis.dedup();
        for s in &out_basis {
            self.registry.check(s)?;
        }
        let index: HashMap<&FockBasisState, usize> = out_basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut m = DMatrix::zeros(out_basis.len(), self.dim());
        for (j, img) in images.iter().enumerate() {
            for (t, a) in img {
                m[(index[t], j)] += a;
            }
        }
        let matrix = &m * &self.matrix * m.adjoint();
        Ok(DensityOperator { registry: self.registry.clone(), basis: out_basis, matrix }.pruned())
    }

    /// Drops basis states whose row and column are numerically empty.
    fn pruned(self) -> DensityOperator {
        let floor = AMPLITUDE_FLOOR * AMPLITUDE_FLOOR;
        let keep: Vec<usize> = (0..self.dim())
            .filter(|&i| self.matrix[(i, i)].re.abs() > floor || self.matrix.row(i).iter().any(|z| z.norm() > floor))
            .collect();
        if keep.len() == self.dim() {
            return self;
        }
        let basis = keep.iter().map(|&i| self.basis[i].clone()).collect();
        let matrix = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.matrix[(keep[i], keep[j])]);
        DensityOperator { registry: self.registry, basis, matrix }
    }

    /// Restricts to basis states accepted by `accept` (unnormalized projection).
    pub fn project(&self, accept: impl Fn(&FockBasisState) -> bool) -> DensityOperator {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| accept(&self.basis[i])).collect();
        let basis = keep.iter().map(|&i| self.basis[i].clone()).collect();
        let matrix = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.matrix[(keep[i], keep[j])]);
        DensityOperator { registry: self.registry.clone(), basis, matrix }
    }

    /// Projective conditioning: returns the normalized post-measurement state
    /// and the outcome probability.
    pub fn condition(&self, accept: impl Fn(&FockBasisState) -> bool) -> Result<(DensityOperator, f64)> {
        let p = self.project(accept);
        let prob = p.trace().re;
        if prob <= AMPLITUDE_FLOOR * AMPLITUDE_FLOOR {
            return Err(Error::HeraldFailure);
        }
        let (rho, _) = p.normalized()?;
        Ok((rho, prob))
    }

    /// Removes coherences between basis states that differ in the occupation
    /// of any of `modes`: the effect of a perfect, immediately discarded record
    /// of those occupations.
    pub fn dephase(&self, modes: &[ModeLabel]) -> Result<DensityOperator> {
        let idx = modes.iter().map(|m| self.registry.require(m)).collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if idx.iter().any(|&k| self.basis[i].get(k) != self.basis[j].get(k)) {
                    out.matrix[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(out)
    }

    /// Tensor product with an operator on a disjoint registry.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let (joint, pa, pb) = ModeRegistry::union(&self.registry, &other.registry)?;
        let joint = Arc::new(joint);
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for sa in &self.basis {
            for sb in &other.basis {
                let mut s = joint.vacuum();
                for (i, &p) in pa.iter().enumerate() {
                    s.set(p, sa.get(i));
                }
                for (i, &p) in pb.iter().enumerate() {
                    s.set(p, sb.get(i));
                }
                joint.check(&s)?;
                basis.push(s);
            }
        }
        let matrix = self.matrix.kronecker(&other.matrix);
        DensityOperator::new(joint, basis, matrix)
    }

    /// Reduced operator on the kept modes.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        let mut kept = keep.iter().map(|m| self.registry.require(m)).collect::<Result<Vec<_>>>()?;
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.registry.len()).filter(|i| !kept.contains(i)).collect();
        let reduced = Arc::new(self.registry.restrict(&kept));
        let split: Vec<(FockBasisState, FockBasisState)> =
            self.basis.iter().map(|s| (s.project(&kept), s.project(&traced))).collect();
        reduce(reduced, &split, &self.matrix)
    }

    /// Traces one internal degree of freedom out of every photon mode.
    ///
    /// Modes are merged by stripping the kept field (e.g. tracing frequency
    /// keeps `(path, polarization)` labels). Fails with `UnsupportedState` if
    /// the support does not factor into the two degrees of freedom, which
    /// happens when one path carries several photons.
    pub fn trace_dof(&self, dof: Dof) -> Result<DensityOperator> {
        let strip_traced = |m: &ModeLabel| match dof {
            Dof::Polarization => m.with_polarization(None),
            Dof::Frequency => m.with_bin(None),
        };
        let strip_kept = |m: &ModeLabel| match dof {
            Dof::Polarization => m.with_bin(None),
            Dof::Frequency => m.with_polarization(None),
        };
        let modes = self.registry.modes();
        for (i, m) in modes.iter().enumerate() {
            if m.species == Species::Environment || self.registry.register_dim(i).is_some() {
                return Err(Error::UnsupportedState("trace out environment registers first".into()));
            }
        }
        let mut kept_labels: Vec<ModeLabel> = modes.iter().map(strip_traced).collect();
        kept_labels.sort();
        kept_labels.dedup();
        let mut traced_labels: Vec<ModeLabel> = modes.iter().map(strip_kept).collect();
        traced_labels.sort();
        traced_labels.dedup();
        let kept_of: Vec<usize> = modes.iter().map(|m| kept_labels.binary_search(&strip_traced(m)).unwrap()).collect();
        let traced_of: Vec<usize> =
            modes.iter().map(|m| traced_labels.binary_search(&strip_kept(m)).unwrap()).collect();

        let mut split = Vec::with_capacity(self.dim());
        let mut seen: HashMap<(FockBasisState, FockBasisState), usize> = HashMap::new();
        for (i, s) in self.basis.iter().enumerate() {
            let mut k = vec![0u8; kept_labels.len()];
            let mut t = vec![0u8; traced_labels.len()];
            for (m, &n) in s.occupations().iter().enumerate() {
                k[kept_of[m]] += n;
                t[traced_of[m]] += n;
            }
            let key = (FockBasisState::from_occupations(k), FockBasisState::from_occupations(t));
            if seen.insert(key.clone(), i).is_some() {
                return Err(Error::UnsupportedState(format!("{dof:?} does not factor out of this support")));
            }
            split.push(key);
        }
        let mut builder = ModeRegistry::builder(self.registry.n_max()).modes(kept_labels);
        if let Some(g) = self.registry.grid() {
            builder = builder.grid(g.clone());
        }
        reduce(builder.build()?, &split, &self.matrix)
    }

    /// JSON debug form: mode list, basis list and the matrix as rows of `[re, im]`.
    pub fn to_debug_json(&self) -> Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect();
        json!({
            "modes": self.registry.modes().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(|s| s.occupations().to_vec()).collect::<Vec<_>>(),
            "matrix": rows,
        })
    }
}

/// Sums `ρ_ij` over pairs whose traced parts agree.
fn reduce(
    registry: Arc<ModeRegistry>,
    split: &[(FockBasisState, FockBasisState)],
    matrix: &DMatrix<Complex64>,
) -> Result<DensityOperator> {
    let mut basis: Vec<FockBasisState> = split.iter().map(|(k, _)| k.clone()).collect();
    basis.sort();
    basis.dedup();
    let kpos: Vec<usize> = split.iter().map(|(k, _)| basis.binary_search(k).unwrap()).collect();
    let mut tid: HashMap<&FockBasisState, usize> = HashMap::new();
    let tpos: Vec<usize> = split
        .iter()
        .map(|(_, t)| {
            let n = tid.len();
            *tid.entry(t).or_insert(n)
        })
        .collect();
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for i in 0..split.len() {
        for j in 0..split.len() {
            if tpos[i] == tpos[j] {
                m[(kpos[i], kpos[j])] += matrix[(i, j)];
            }
        }
    }
    for s in &basis {
        registry.check(s)?;
    }
    Ok(DensityOperator { registry, basis, matrix: m })
}

pub(crate) fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::Path;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_pair() -> Arc<ModeRegistry> {
        ModeRegistry::builder(2)
            .mode(ModeLabel::phonon(Path::Arm1))
            .mode(ModeLabel::phonon(Path::Arm2))
            .build()
            .unwrap()
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let reg = qubit_pair();
        let (a, b) = (ModeLabel::phonon(Path::Arm1), ModeLabel::phonon(Path::Arm2));
        let s = 1.0 / 2f64.sqrt();
        let k01 = FockKet::basis(reg.clone(), &[(b, 1)]).unwrap();
        let k10 = FockKet::basis(reg.clone(), &[(a, 1)]).unwrap();
        let bell = k01.scale(c(s, 0.0)).add(&k10.scale(c(s, 0.0))).unwrap();
        let rho = DensityOperator::from_ket(&bell);
        let red = rho.partial_trace(&[a]).unwrap();
        assert_eq!(red.dim(), 2);
        assert!((red.matrix[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((red.matrix[(1, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(red.matrix[(0, 1)].norm() < 1e-15);
        assert!((red.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_keep_set_is_an_error() {
        let rho = DensityOperator::from_ket(&FockKet::vacuum(qubit_pair()));
        assert_eq!(rho.partial_trace(&[]).unwrap_err(), Error::EmptySubsystem);
    }

    #[test]
    fn pure_state_has_unit_purity_and_fidelity() {
        let reg = qubit_pair();
        let k = FockKet::basis(reg, &[(ModeLabel::phonon(Path::Arm1), 1)]).unwrap();
        let rho = DensityOperator::from_ket(&k);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((rho.fidelity(&rho).unwrap() - 1.0).abs() < 1e-12);
        assert!((rho.fidelity_with_pure(&k).unwrap() - 1.0).abs() < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn tensor_traces_multiply() {
        let ra = ModeRegistry::builder(2).mode(ModeLabel::phonon(Path::Arm1)).build().unwrap();
        let rb = ModeRegistry::builder(2).mode(ModeLabel::phonon(Path::Arm2)).build().unwrap();
        let a0 = FockKet::vacuum(ra.clone());
        let a1 = FockKet::basis(ra, &[(ModeLabel::phonon(Path::Arm1), 1)]).unwrap();
        let rho_a = DensityOperator::mixture(&[(0.3, a0), (0.7, a1)]).unwrap();
        let rho_b = DensityOperator::from_ket(&FockKet::vacuum(rb));
        let ab = rho_a.tensor(&rho_b).unwrap();
        assert!((ab.trace() - c(1.0, 0.0)).norm() < 1e-15);
        let back = ab.partial_trace(&[ModeLabel::phonon(Path::Arm1)]).unwrap();
        assert!((back.matrix() - rho_a.matrix()).norm() < 1e-15);
    }
}
