use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::maps::{accumulate, FockMap};
use super::mode::{FockBasisState, ModeLabel, ModeRegistry};
use crate::error::{Error, Result};

/// Tolerance for norm checks.
pub const NORM_TOL: f64 = 1e-10;

/// A pure state: sparse complex amplitudes over Fock basis states of one registry.
#[derive(Debug, Clone)]
pub struct FockKet {
    registry: Arc<ModeRegistry>,
    amps: BTreeMap<FockBasisState, Complex64>,
}

impl FockKet {
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(registry.vacuum(), Complex64::new(1.0, 0.0));
        FockKet { registry, amps }
    }

    pub fn from_terms(
        registry: Arc<ModeRegistry>,
        terms: impl IntoIterator<Item = (FockBasisState, Complex64)>,
    ) -> Result<Self> {
        let amps = accumulate(&registry, terms)?;
        Ok(FockKet { registry, amps })
    }

    /// Basis state with the listed occupations (other modes empty).
    pub fn basis(registry: Arc<ModeRegistry>, occupations: &[(ModeLabel, u8)]) -> Result<Self> {
        let mut s = registry.vacuum();
        for (label, n) in occupations {
            s.set(registry.require(label)?, *n);
        }
        registry.check(&s)?;
        Self::from_terms(registry, [(s, Complex64::new(1.0, 0.0))])
    }

    /// `Σ_t c_t Π_{m in t} a†_m |0>` with the proper sqrt(n!) factors.
    pub fn from_creations(registry: Arc<ModeRegistry>, terms: &[(Complex64, Vec<ModeLabel>)]) -> Result<Self> {
        let mut out = Vec::new();
        for (c, modes) in terms {
            let idx = modes.iter().map(|m| registry.require(m)).collect::<Result<Vec<_>>>()?;
            // Build the monomial by substituting creation operators into the vacuum.
            let vac = FockKet::vacuum(registry.clone());
            let mut ket = vac;
            for &i in &idx {
                ket = ket.create(i)?;
            }
            out.extend(ket.amps.into_iter().map(|(s, a)| (s, a * c)));
        }
        Self::from_terms(registry, out)
    }

    fn create(&self, mode: usize) -> Result<FockKet> {
        let terms = self.amps.iter().map(|(s, a)| {
            let n = s.get(mode);
            let mut t = s.clone();
            t.set(mode, n + 1);
            (t, a * ((n + 1) as f64).sqrt())
        });
        Self::from_terms(self.registry.clone(), terms.collect::<Vec<_>>())
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn amplitude(&self, state: &FockBasisState) -> Complex64 {
        self.amps.get(state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisState, &Complex64)> {
        self.amps.iter()
    }

    /// Number of basis states in the support.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy. The zero vector is rejected rather than normalized.
    pub fn normalize(&self) -> Result<FockKet> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> FockKet {
        FockKet { registry: self.registry.clone(), amps: self.amps.iter().map(|(s, a)| (s.clone(), a * c)).collect() }
    }

    fn same_registry(&self, other: &FockKet) -> Result<()> {
        if Arc::ptr_eq(&self.registry, &other.registry) || self.registry == other.registry {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockKet) -> Result<Complex64> {
        self.same_registry(other)?;
        Ok(self.amps.iter().map(|(s, a)| a.conj() * other.amplitude(s)).sum())
    }

    pub fn add(&self, other: &FockKet) -> Result<FockKet> {
        self.same_registry(other)?;
        let terms = self.amps.iter().chain(other.amps.iter()).map(|(s, a)| (s.clone(), *a));
        Self::from_terms(self.registry.clone(), terms.collect::<Vec<_>>())
    }

    /// `|<self|other>|^2` for normalized states.
    pub fn fidelity(&self, other: &FockKet) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `<self| O |self>`.
    pub fn expectation(&self, op: &dyn FockMap) -> Result<Complex64> {
        let image = self.apply(op)?;
        self.inner(&image)
    }

    /// Mean occupation of a mode.
    pub fn mean_occupation(&self, label: &ModeLabel) -> Result<f64> {
        let i = self.registry.require(label)?;
        Ok(self.amps.iter().map(|(s, a)| a.norm_sqr() * s.get(i) as f64).sum())
    }

    pub fn apply(&self, map: &dyn FockMap) -> Result<FockKet> {
        let mut terms = Vec::new();
        for (s, a) in &self.amps {
            for (t, b) in map.image(&self.registry, s)? {
                terms.push((t, a * b));
            }
        }
        Self::from_terms(self.registry.clone(), terms)
    }

    /// Keeps only the basis states accepted by `accept`; returns the
    /// unnormalized branch.
    pub fn filter(&self, accept: impl Fn(&FockBasisState) -> bool) -> FockKet {
        FockKet {
            registry: self.registry.clone(),
            amps: self.amps.iter().filter(|(s, _)| accept(s)).map(|(s, a)| (s.clone(), *a)).collect(),
        }
    }

    /// Same amplitudes on a larger registry containing every current mode.
    pub fn embed(&self, target: Arc<ModeRegistry>) -> Result<FockKet> {
        let pos = self.registry.modes().iter().map(|m| target.require(m)).collect::<Result<Vec<_>>>()?;
        let terms = self.amps.iter().map(|(s, a)| {
            let mut t = target.vacuum();
            for (i, &p) in pos.iter().enumerate() {
                t.set(p, s.get(i));
            }
            (t, *a)
        });
        Self::from_terms(target.clone(), terms.collect::<Vec<_>>())
    }

    /// Tensor product of states on disjoint registries.
    pub fn tensor(&self, other: &FockKet) -> Result<FockKet> {
        let (joint, pa, pb) = ModeRegistry::union(&self.registry, &other.registry)?;
        let joint = Arc::new(joint);
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (sa, a) in &self.amps {
            for (sb, b) in &other.amps {
                let mut s = joint.vacuum();
                for (i, &p) in pa.iter().enumerate() {
                    s.set(p, sa.get(i));
                }
                for (i, &p) in pb.iter().enumerate() {
                    s.set(p, sb.get(i));
                }
                terms.push((s, a * b));
            }
        }
        Self::from_terms(joint, terms)
    }

    /// JSON debug form: mode list, basis list and `[re, im]` amplitudes.
    pub fn to_debug_json(&self) -> Value {
        json!({
            "modes": self.registry.modes().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "basis": self.amps.keys().map(|s| s.occupations().to_vec()).collect::<Vec<_>>(),
            "amplitudes": self.amps.values().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::Path;

    fn two_modes() -> Arc<ModeRegistry> {
        ModeRegistry::builder(2)
            .mode(ModeLabel::photon(Path::Arm1))
            .mode(ModeLabel::photon(Path::Arm2))
            .build()
            .unwrap()
    }

    #[test]
    fn zero_vector_is_rejected() {
        let k = FockKet::from_terms(two_modes(), []).unwrap();
        assert_eq!(k.normalize().unwrap_err(), Error::ZeroState);
    }

    #[test]
    fn creation_of_same_mode_twice_gives_sqrt2() {
        let reg = two_modes();
        let a = ModeLabel::photon(Path::Arm1);
        let k = FockKet::from_creations(reg.clone(), &[(Complex64::new(1.0, 0.0), vec![a, a])]).unwrap();
        let two = FockKet::basis(reg, &[(a, 2)]).unwrap();
        assert!((k.inner(&two).unwrap().re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tensor_of_basis_states() {
        let ra = ModeRegistry::builder(2).mode(ModeLabel::photon(Path::Arm1)).build().unwrap();
        let rb = ModeRegistry::builder(2).mode(ModeLabel::photon(Path::Arm2)).build().unwrap();
        let one = FockKet::basis(ra.clone(), &[(ModeLabel::photon(Path::Arm1), 1)]).unwrap();
        let zero = FockKet::vacuum(rb.clone());
        let k = one.tensor(&zero).unwrap();
        assert_eq!(k.len(), 1);
        let (s, a) = k.iter().next().unwrap();
        assert_eq!(s.occupations(), &[1, 0]);
        assert_eq!(*a, Complex64::new(1.0, 0.0));

        // (α|0> + β|1>)_a ⊗ |1>_b = α|0,1> + β|1,1>
        let (al, be) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let sup = FockKet::vacuum(ra.clone()).scale(al).add(&one.scale(be)).unwrap();
        let b1 = FockKet::basis(rb, &[(ModeLabel::photon(Path::Arm2), 1)]).unwrap();
        let k = sup.tensor(&b1).unwrap();
        let amps: Vec<_> = k.iter().map(|(s, a)| (s.occupations().to_vec(), *a)).collect();
        assert_eq!(amps, vec![(vec![0, 1], al), (vec![1, 1], be)]);
    }

    #[test]
    fn tensor_rejects_overlap_and_adds_caps() {
        let ra = two_modes();
        let err = FockKet::vacuum(ra.clone()).tensor(&FockKet::vacuum(ra)).unwrap_err();
        assert!(matches!(err, Error::ModeCollision(_)));

        let ra = ModeRegistry::builder(2).mode(ModeLabel::photon(Path::Arm1)).build().unwrap();
        let rb = ModeRegistry::builder(2).mode(ModeLabel::photon(Path::Arm2)).build().unwrap();
        let a = FockKet::basis(ra, &[(ModeLabel::photon(Path::Arm1), 2)]).unwrap();
        let b = FockKet::basis(rb, &[(ModeLabel::photon(Path::Arm2), 1)]).unwrap();
        let joint = a.tensor(&b).unwrap();
        assert_eq!(joint.registry().n_max(), 4);
        assert!((joint.norm() - 1.0).abs() < 1e-15);
    }
}
