//! Linear maps on Fock basis states.
//!
//! Every optical element, interaction and projection in the crate is a
//! [`FockMap`]: a rule sending one basis state to a superposition of basis
//! states. Kets and density operators extend it linearly.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::mode::{FockBasisState, ModeRegistry};
use crate::error::{Error, Result};

/// Amplitudes with magnitude below this are dropped from sparse supports.
pub const AMPLITUDE_FLOOR: f64 = 1e-14;

pub trait FockMap {
    /// Image of one basis state. Duplicated output states are summed by the caller.
    fn image(&self, registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>>;
}

/// Sums duplicates and drops amplitudes under [`AMPLITUDE_FLOOR`].
pub(crate) fn accumulate(
    registry: &ModeRegistry,
    terms: impl IntoIterator<Item = (FockBasisState, Complex64)>,
) -> Result<BTreeMap<FockBasisState, Complex64>> {
    let mut out: BTreeMap<FockBasisState, Complex64> = BTreeMap::new();
    for (s, a) in terms {
        *out.entry(s).or_insert(Complex64::new(0.0, 0.0)) += a;
    }
    out.retain(|_, a| a.norm() >= AMPLITUDE_FLOOR);
    for s in out.keys() {
        registry.check(s)?;
    }
    Ok(out)
}

fn factorial_sqrt(n: u8) -> f64 {
    (1..=n as u32).map(|k| k as f64).product::<f64>().sqrt()
}

/// Substitution of creation operators, `a†_m -> Σ_k u_km · Π a†`, for each
/// mode `m` in the domain.
///
/// Each image term is a coefficient and a list of mode indices whose creation
/// operators are multiplied together. Single-index terms give ordinary linear
/// optics (beam splitters, phases, polarization rotations); multi-index terms
/// give interactions such as Raman scattering.
#[derive(Debug, Clone, Default)]
pub struct CreationSubstitution {
    images: BTreeMap<usize, Vec<(Complex64, Vec<usize>)>>,
}

impl CreationSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, mode: usize, image: Vec<(Complex64, Vec<usize>)>) {
        self.images.insert(mode, image);
    }

    /// Linear mode map `a†_m -> Σ_k u_k a†_k`.
    pub fn set_linear(&mut self, mode: usize, image: &[(usize, Complex64)]) {
        self.set(mode, image.iter().map(|&(k, u)| (u, vec![k])).collect());
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

impl FockMap for CreationSubstitution {
    fn image(&self, registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>> {
        // Work with raw monomials Π (a†_k)^{p_k} |0>; restore sqrt(p!) at the end.
        let mut norm = 1.0;
        let mut base = state.clone();
        let mut pending = Vec::new();
        for (idx, &n) in state.occupations().iter().enumerate() {
            if n == 0 || registry.register_dim(idx).is_some() {
                continue;
            }
            norm /= factorial_sqrt(n);
            if let Some(img) = self.images.get(&idx) {
                base.set(idx, 0);
                pending.extend(std::iter::repeat_n(img, n as usize));
            }
        }
        if pending.is_empty() {
            return Ok(vec![(state.clone(), Complex64::new(1.0, 0.0))]);
        }
        let mut terms: BTreeMap<FockBasisState, Complex64> = BTreeMap::new();
        terms.insert(base, Complex64::new(norm, 0.0));
        for img in pending {
            let mut next: BTreeMap<FockBasisState, Complex64> = BTreeMap::new();
            for (occ, c) in &terms {
                for (u, product) in img {
                    let mut o = occ.clone();
                    for &k in product {
                        let v = o.get(k).checked_add(1).ok_or(Error::TruncationOverflow {
                            total: u8::MAX as u32 + 1,
                            cap: registry.n_max(),
                        })?;
                        o.set(k, v);
                    }
                    *next.entry(o).or_insert(Complex64::new(0.0, 0.0)) += c * u;
                }
            }
            terms = next;
        }
        Ok(terms
            .into_iter()
            .map(|(occ, c)| {
                let f: f64 = occ
                    .occupations()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| registry.register_dim(*i).is_none())
                    .map(|(_, &p)| factorial_sqrt(p))
                    .product();
                (occ, c * f)
            })
            .collect())
    }
}

/// Diagonal map: each basis state picks up a phase computed from its occupations.
pub struct DiagonalPhase<F: Fn(&FockBasisState) -> f64> {
    pub phase: F,
}

impl<F: Fn(&FockBasisState) -> f64> FockMap for DiagonalPhase<F> {
    fn image(&self, _registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>> {
        Ok(vec![(state.clone(), Complex64::from_polar(1.0, (self.phase)(state)))])
    }
}

/// Projector onto the basis states accepted by a predicate.
pub struct Projector<F: Fn(&FockBasisState) -> bool> {
    pub accept: F,
}

impl<F: Fn(&FockBasisState) -> bool> FockMap for Projector<F> {
    fn image(&self, _registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>> {
        if (self.accept)(state) {
            Ok(vec![(state.clone(), Complex64::new(1.0, 0.0))])
        } else {
            Ok(Vec::new())
        }
    }
}

/// Composition: `second ∘ first`.
pub struct Then<'a>(pub &'a dyn FockMap, pub &'a dyn FockMap);

impl FockMap for Then<'_> {
    fn image(&self, registry: &ModeRegistry, state: &FockBasisState) -> Result<Vec<(FockBasisState, Complex64)>> {
        let mut out = Vec::new();
        for (s, a) in self.0.image(registry, state)? {
            for (t, b) in self.1.image(registry, &s)? {
                out.push((t, a * b));
            }
        }
        Ok(out)
    }
}

/// Annihilation operator on one mode: `a|n> = sqrt(n)|n-1>`.
pub(crate) fn annihilate(state: &FockBasisState, mode: usize) -> Option<(FockBasisState, f64)> {
    let n = state.get(mode);
    if n == 0 {
        return None;
    }
    let mut s = state.clone();
    s.set(mode, n - 1);
    Some((s, (n as f64).sqrt()))
}

/// Dense matrix of a map on the full truncated basis of a registry, columns
/// indexed by input state. Used for unitarity checks on small registries.
pub fn dense_matrix(map: &dyn FockMap, registry: &ModeRegistry) -> Result<nalgebra::DMatrix<Complex64>> {
    let basis = registry.basis();
    let index: BTreeMap<&FockBasisState, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = nalgebra::DMatrix::zeros(basis.len(), basis.len());
    for (j, s) in basis.iter().enumerate() {
        for (t, a) in map.image(registry, s)? {
            registry.check(&t)?;
            let i = *index
                .get(&t)
                .ok_or_else(|| Error::InvalidParameter("image leaves the truncated basis".into()))?;
            m[(i, j)] += a;
        }
    }
    Ok(m)
}
