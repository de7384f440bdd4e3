use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantumState;
use crate::error::{Error, Result};
use crate::fock::maps::CreationSubstitution;
use crate::fock::{ModeLabel, ModeRegistry, Path};

/// Tolerance on `|α|² + |β|² = 1`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Lossless two-port splitter.
///
/// Creation operators transform as
/// `a†_in1 -> α a†_out1 + β a†_out2` and `a†_in2 -> -β* a†_out1 + α* a†_out2`,
/// which is unitary for any `|α|² + |β|² = 1`. With `α = t`, `β = i r` for
/// real `t, r` this is the symmetric convention, where reflection carries a
/// factor `i` on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub inputs: (Path, Path),
    pub outputs: (Path, Path),
}

impl BeamSplitter {
    pub fn new(alpha: Complex64, beta: Complex64, inputs: (Path, Path), outputs: (Path, Path)) -> Result<Self> {
        let bs = BeamSplitter { alpha, beta, inputs, outputs };
        bs.validate()?;
        Ok(bs)
    }

    /// Real transmission and reflection magnitudes; reflection gets the factor `i`.
    pub fn from_magnitudes(t: f64, r: f64, inputs: (Path, Path), outputs: (Path, Path)) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0), Complex64::new(0.0, r), inputs, outputs)
    }

    pub fn balanced(inputs: (Path, Path), outputs: (Path, Path)) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_magnitudes(s, s, inputs, outputs).expect("balanced splitter is unitary")
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (s - 1.0).abs() > UNITARITY_TOL || !s.is_finite() {
            return Err(Error::NonUnitaryElement(s));
        }
        if self.inputs.0 == self.inputs.1 || self.outputs.0 == self.outputs.1 {
            return Err(Error::InvalidParameter("beam splitter ports must be distinct paths".into()));
        }
        Ok(())
    }

    pub fn is_balanced(&self) -> bool {
        (self.alpha.norm_sqr() - 0.5).abs() <= UNITARITY_TOL
    }

    /// Single-photon mode matrix, columns = inputs, rows = outputs.
    pub fn mode_matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.alpha, -self.beta.conj()], [self.beta, self.alpha.conj()]]
    }

    /// The induced substitution on a registry. Only photon modes are touched.
    pub fn substitution(&self, registry: &ModeRegistry) -> Result<CreationSubstitution> {
        self.validate()?;
        let u = self.mode_matrix();
        let mut sub = CreationSubstitution::new();
        let mut seen = [false, false];
        for (idx, m) in registry.modes().iter().enumerate() {
            if !m.is_photon() {
                continue;
            }
            let col = if m.path == self.inputs.0 {
                0
            } else if m.path == self.inputs.1 {
                1
            } else {
                continue;
            };
            seen[col] = true;
            let o1 = registry.require(&m.with_path(self.outputs.0))?;
            let o2 = registry.require(&m.with_path(self.outputs.1))?;
            sub.set_linear(idx, &[(o1, u[0][col]), (o2, u[1][col])]);
        }
        for (col, path) in [self.inputs.0, self.inputs.1].into_iter().enumerate() {
            if !seen[col] {
                return Err(Error::UnknownMode(ModeLabel::photon(path)));
            }
        }
        Ok(sub)
    }

    pub fn apply<S: QuantumState>(&self, state: &S) -> Result<S> {
        let sub = self.substitution(state.registry())?;
        state.evolve(&sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::maps::dense_matrix;
    use crate::fock::FockKet;

    const A1: ModeLabel = ModeLabel::photon(Path::Arm1);
    const A2: ModeLabel = ModeLabel::photon(Path::Arm2);

    fn reg() -> std::sync::Arc<ModeRegistry> {
        ModeRegistry::builder(2).mode(A1).mode(A2).build().unwrap()
    }

    fn bs() -> BeamSplitter {
        BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Arm1, Path::Arm2))
    }

    #[test]
    fn single_photon_gets_i_on_reflection() {
        let out = bs().apply(&FockKet::basis(reg(), &[(A1, 1)]).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = FockKet::basis(reg(), &[(A1, 1)]).unwrap();
        let r = FockKet::basis(reg(), &[(A2, 1)]).unwrap();
        assert!((t.inner(&out).unwrap() - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((r.inner(&out).unwrap() - Complex64::new(0.0, s)).norm() < 1e-15);
    }

    #[test]
    fn two_photons_bunch() {
        let out = bs().apply(&FockKet::basis(reg(), &[(A1, 1), (A2, 1)]).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(out.len(), 2);
        for (k, a) in out.iter() {
            assert_ne!(k.occupations(), &[1, 1]);
            assert!((a - Complex64::new(0.0, s)).norm() < 1e-15);
        }
    }

    #[test]
    fn vacuum_is_invariant() {
        let v = FockKet::vacuum(reg());
        let out = bs().apply(&v).unwrap();
        assert!((out.inner(&v).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn induced_operator_is_unitary() {
        let r = reg();
        let b = BeamSplitter::new(Complex64::from_polar(0.6, 0.3), Complex64::from_polar(0.8, -1.1), (Path::Arm1, Path::Arm2), (Path::Arm1, Path::Arm2)).unwrap();
        let u = dense_matrix(&b.substitution(&r).unwrap(), &r).unwrap();
        let id = nalgebra::DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
        assert!((u.adjoint() * &u - id).camax() < 1e-12);
    }

    #[test]
    fn rejects_lossy_and_missing_ports() {
        let e = BeamSplitter::from_magnitudes(0.5, 0.5, (Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2)).unwrap_err();
        assert!(matches!(e, Error::NonUnitaryElement(_)));
        let b = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2));
        let e = b.apply(&FockKet::vacuum(reg())).unwrap_err();
        assert!(matches!(e, Error::UnknownMode(_)));
    }
}
