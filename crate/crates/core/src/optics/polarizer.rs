use serde::{Deserialize, Serialize};

use super::QuantumState;
use crate::error::{Error, Result};
use crate::fock::maps::{CreationSubstitution, AMPLITUDE_FLOOR};
use crate::fock::{ModeRegistry, Path, Polarization};

/// Linear polarizer on one path, transmitting `cos θ |H> + sin θ |V>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarizer {
    pub path: Path,
    pub angle: f64,
}

impl Polarizer {
    pub fn new(path: Path, angle: f64) -> Self {
        Polarizer { path, angle }
    }

    /// Rotation of every (H, V) pair on the path by `phi`, plus the indices
    /// of the V modes.
    fn rotation(&self, registry: &ModeRegistry, phi: f64) -> Result<(CreationSubstitution, Vec<usize>)> {
        let (s, c) = phi.sin_cos();
        let mut sub = CreationSubstitution::new();
        let mut v_modes = Vec::new();
        for (h, m) in registry.modes().iter().enumerate() {
            if !m.is_photon() || m.path != self.path || m.polarization != Some(Polarization::H) {
                continue;
            }
            let v = registry
                .index_of(&m.with_polarization(Some(Polarization::V)))
                .ok_or_else(|| Error::UnpolarizedState(format!("{m} has no V partner")))?;
            sub.set_linear(h, &[(h, c.into()), (v, s.into())]);
            sub.set_linear(v, &[(h, (-s).into()), (v, c.into())]);
            v_modes.push(v);
        }
        let unpaired_v = registry.modes().iter().enumerate().any(|(i, m)| {
            m.is_photon() && m.path == self.path && m.polarization == Some(Polarization::V) && !v_modes.contains(&i)
        });
        if v_modes.is_empty() || unpaired_v {
            return Err(Error::UnpolarizedState(self.path.to_string()));
        }
        Ok((sub, v_modes))
    }

    /// Unnormalized projection onto the transmitted polarization.
    pub fn project<S: QuantumState>(&self, state: &S) -> Result<S> {
        let reg = state.registry().clone();
        let (to_h, v_modes) = self.rotation(&reg, -self.angle)?;
        let (back, _) = self.rotation(&reg, self.angle)?;
        let rotated = state.evolve(&to_h)?;
        let kept = rotated.project(&|s| v_modes.iter().all(|&v| s.get(v) == 0));
        kept.evolve(&back)
    }

    /// Projected, renormalized state and the pass probability. When nothing
    /// passes the returned state is the (zero) projected branch.
    pub fn apply<S: QuantumState>(&self, state: &S) -> Result<(S, f64)> {
        let p = self.project(state)?;
        let prob = p.weight() / state.weight();
        if prob <= AMPLITUDE_FLOOR * AMPLITUDE_FLOOR {
            return Ok((p, 0.0));
        }
        Ok((p.renormalized()?, prob))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use num_complex::Complex64;

    use super::*;
    use crate::fock::{DensityOperator, FockKet, ModeLabel};

    fn reg() -> std::sync::Arc<ModeRegistry> {
        ModeRegistry::builder(2)
            .modes([Path::Arm1, Path::Arm2].into_iter().flat_map(|p| {
                [ModeLabel::polarized(p, Polarization::H), ModeLabel::polarized(p, Polarization::V)]
            }))
            .build()
            .unwrap()
    }

    fn h1() -> FockKet {
        FockKet::basis(reg(), &[(ModeLabel::polarized(Path::Arm1, Polarization::H), 1)]).unwrap()
    }

    #[test]
    fn aligned_polarizer_passes_everything() {
        let (out, p) = Polarizer::new(Path::Arm1, 0.0).apply(&h1()).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((out.fidelity(&h1()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crossed_polarizer_blocks() {
        let (_, p) = Polarizer::new(Path::Arm1, FRAC_PI_2).apply(&h1()).unwrap();
        assert!(p < 1e-28);
    }

    #[test]
    fn singlet_through_diagonal_polarizers() {
        // (|H1 V2> - |V1 H2>)/sqrt2 projected on +45 in arm 1 and -45 in arm 2:
        // amplitude <D,A|ψ-> = (cos²(π/4) + sin²(π/4))/sqrt2 = 1/sqrt2, so probability 1/2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let l = |p, q| ModeLabel::polarized(p, q);
        let psi = FockKet::from_creations(
            reg(),
            &[
                (Complex64::new(s, 0.0), vec![l(Path::Arm1, Polarization::H), l(Path::Arm2, Polarization::V)]),
                (Complex64::new(-s, 0.0), vec![l(Path::Arm1, Polarization::V), l(Path::Arm2, Polarization::H)]),
            ],
        )
        .unwrap();
        let (a, pa) = Polarizer::new(Path::Arm1, FRAC_PI_4).apply(&psi).unwrap();
        let (_, pb) = Polarizer::new(Path::Arm2, 3.0 * FRAC_PI_4).apply(&a).unwrap();
        assert!((pa * pb - 0.5).abs() < 1e-14);
        let (_, pc) = Polarizer::new(Path::Arm2, FRAC_PI_4).apply(&a).unwrap();
        assert!(pc < 1e-28);
    }

    #[test]
    fn projection_is_idempotent_on_density_operators() {
        let rho = DensityOperator::from_ket(&h1());
        let pol = Polarizer::new(Path::Arm1, 0.3);
        let once = pol.project(&rho).unwrap();
        let twice = pol.project(&once).unwrap();
        let (_, p2) = pol.apply(&pol.apply(&rho).unwrap().0).unwrap();
        assert!((p2 - 1.0).abs() < 1e-12);
        assert_eq!(once.basis(), twice.basis());
        assert!((once.matrix() - twice.matrix()).camax() < 1e-12);
    }

    #[test]
    fn unpolarized_path_is_rejected() {
        let a = ModeLabel::photon(Path::Arm1);
        let r = ModeRegistry::builder(2).mode(a).build().unwrap();
        let e = Polarizer::new(Path::Arm1, 0.0).apply(&FockKet::vacuum(r)).unwrap_err();
        assert!(matches!(e, Error::UnpolarizedState(_)));
    }
}
