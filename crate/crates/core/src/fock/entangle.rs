//! Pointer-state entanglement: `(Σ c_i |s_i>)|a_r> -> Σ c_i |s_i>|a_i>`.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::ket::{FockKet, NORM_TOL};
use super::mode::{FockBasisState, ModeLabel, Path};
use crate::error::{Error, Result};

/// Default environment dimension.
pub const DEFAULT_ENV_DIM: usize = 2;

/// Register label used by [`entangle_map`] when the caller does not name one.
pub const POINTER_REGISTER: ModeLabel = ModeLabel::environment(Path::Arm1);

/// A unit vector in a small environment space, tagged with the arm it sits in.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentState {
    amplitudes: DVector<Complex64>,
    pub arm: Path,
}

impl EnvironmentState {
    pub fn new(amplitudes: Vec<Complex64>, arm: Path) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidEnvironment("empty environment vector".into()));
        }
        let v = DVector::from_vec(amplitudes);
        let n = v.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnvironment(format!("norm {n} is not 1")));
        }
        Ok(EnvironmentState { amplitudes: v, arm })
    }

    /// Normalizes the given vector first.
    pub fn normalized(amplitudes: Vec<Complex64>, arm: Path) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidEnvironment("zero environment vector".into()));
        }
        Self::new((v / Complex64::new(n, 0.0)).data.into(), arm)
    }

    /// `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize, arm: Path) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidEnvironment(format!("level {k} outside dimension {dim}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self::new(v, arm)
    }

    /// Pair `(|0>, γ|0> + sqrt(1-|γ|²)|1>)` with inner product `<E1|E2> = γ`.
    pub fn pair_with_overlap(overlap: Complex64, dim: usize) -> Result<(Self, Self)> {
        if dim < 2 {
            return Err(Error::InvalidEnvironment("need dimension >= 2 for a tunable overlap".into()));
        }
        let m = overlap.norm();
        if m > 1.0 + NORM_TOL {
            return Err(Error::InvalidEnvironment(format!("overlap magnitude {m} exceeds 1")));
        }
        let e1 = Self::basis(dim, 0, Path::Arm1)?;
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = overlap;
        v[1] = Complex64::new((1.0 - m.min(1.0).powi(2)).sqrt(), 0.0);
        Ok((e1, Self::new(v, Path::Arm2)?))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &EnvironmentState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidEnvironment(format!(
                "dimension mismatch {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Entangles each principal basis state with its pointer state, writing the
/// pointer into a new environment register. Pointers are assigned to the
/// principal's support in basis order.
pub fn entangle_map(principal: &FockKet, pointers: &[EnvironmentState]) -> Result<FockKet> {
    if principal.len() != pointers.len() {
        return Err(Error::BranchPointerMismatch { branches: principal.len(), pointers: pointers.len() });
    }
    let branches: Vec<FockBasisState> = principal.iter().map(|(s, _)| s.clone()).collect();
    entangle_with(principal, POINTER_REGISTER, |s| {
        let i = branches.binary_search(s).expect("support state");
        Ok(&pointers[i])
    })
}

/// As [`entangle_map`], with an explicit register label and a rule choosing
/// the pointer for each principal basis state.
pub fn entangle_with<'a>(
    principal: &FockKet,
    register: ModeLabel,
    pointer_for: impl Fn(&FockBasisState) -> Result<&'a EnvironmentState>,
) -> Result<FockKet> {
    let mut dim = None;
    let mut assigned = Vec::with_capacity(principal.len());
    for (s, a) in principal.iter() {
        let p = pointer_for(s)?;
        match dim {
            None => dim = Some(p.dim()),
            Some(d) if d != p.dim() => {
                return Err(Error::InvalidEnvironment("pointer states differ in dimension".into()))
            }
            _ => {}
        }
        let n = p.amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidEnvironment(format!("pointer norm {n}")));
        }
        assigned.push((s.clone(), *a, p));
    }
    let dim = dim.unwrap_or(DEFAULT_ENV_DIM);
    let joint = Arc::new(principal.registry().with_register(register, dim as u32)?);
    let reg_idx = joint.require(&register)?;
    let pos: Vec<usize> = principal.registry().modes().iter().map(|m| joint.index_of(m).unwrap()).collect();
    let mut terms = Vec::new();
    for (s, a, p) in assigned {
        for (k, e) in p.amplitudes.iter().enumerate() {
            let mut t = joint.vacuum();
            for (i, &q) in pos.iter().enumerate() {
                t.set(q, s.get(i));
            }
            t.set(reg_idx, k as u8);
            terms.push((t, a * e));
        }
    }
    FockKet::from_terms(joint, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::density::DensityOperator;
    use crate::fock::mode::ModeRegistry;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn superposed() -> FockKet {
        let reg = ModeRegistry::builder(2)
            .mode(ModeLabel::photon(Path::Arm1))
            .mode(ModeLabel::photon(Path::Arm2))
            .build()
            .unwrap();
        let s = 1.0 / 2f64.sqrt();
        let k1 = FockKet::basis(reg.clone(), &[(ModeLabel::photon(Path::Arm1), 1)]).unwrap();
        let k2 = FockKet::basis(reg, &[(ModeLabel::photon(Path::Arm2), 1)]).unwrap();
        k1.scale(c(s, 0.0)).add(&k2.scale(c(s, 0.0))).unwrap()
    }

    fn reduced_principal(k: &FockKet) -> DensityOperator {
        DensityOperator::from_ket(k)
            .partial_trace(&[ModeLabel::photon(Path::Arm1), ModeLabel::photon(Path::Arm2)])
            .unwrap()
    }

    #[test]
    fn single_branch_stays_product() {
        let reg = ModeRegistry::builder(2).mode(ModeLabel::photon(Path::Arm1)).build().unwrap();
        let k = FockKet::basis(reg, &[(ModeLabel::photon(Path::Arm1), 1)]).unwrap();
        let e = EnvironmentState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)], Path::Arm1).unwrap();
        let out = entangle_map(&k, &[e]).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-15);
        let red = DensityOperator::from_ket(&out).partial_trace(&[ModeLabel::photon(Path::Arm1)]).unwrap();
        assert!((red.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_pointers_fully_decohere() {
        let e0 = EnvironmentState::basis(2, 0, Path::Arm1).unwrap();
        let e1 = EnvironmentState::basis(2, 1, Path::Arm2).unwrap();
        let red = reduced_principal(&entangle_map(&superposed(), &[e0, e1]).unwrap());
        assert!(red.matrix()[(0, 1)].norm() < 1e-15);
        assert!((red.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn half_overlap_gives_quarter_coherence() {
        // Hand-built joint state: (|s1>|a1> + |s2>|a2>)/sqrt2 with a1 = |0>,
        // a2 = (|0> + sqrt3|1>)/2. Reduced off-diagonal = (1/2)<a2|a1> = 1/4.
        let (e1, e2) = EnvironmentState::pair_with_overlap(c(0.5, 0.0), 2).unwrap();
        let k = superposed();
        let out = entangle_map(&k, &[e1, e2]).unwrap();
        let red = reduced_principal(&out);
        assert!((red.matrix()[(0, 1)].norm() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pointer_count_must_match() {
        let e = EnvironmentState::basis(2, 0, Path::Arm1).unwrap();
        let err = entangle_map(&superposed(), &[e]).unwrap_err();
        assert_eq!(err, Error::BranchPointerMismatch { branches: 2, pointers: 1 });
    }
}
