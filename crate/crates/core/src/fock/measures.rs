//! Two-qubit views of Fock-space states and the concurrence.

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::density::DensityOperator;
use super::mode::{FockBasisState, ModeLabel, Path, Polarization};
use crate::error::{Error, Result};

/// A two-qubit density matrix in the order |00>, |01>, |10>, |11>
/// (first qubit most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    pub matrix: Matrix4<Complex64>,
}

/// Eigenvalues of ρ at or below this are treated as exact zeros by [`TwoQubitState::concurrence`].
pub const RANK_FLOOR: f64 = 1e-13;

fn local_key(s: &FockBasisState) -> (u32, std::cmp::Reverse<Vec<u8>>) {
    let total = s.occupations().iter().map(|&n| n as u32).sum();
    (total, std::cmp::Reverse(s.occupations().to_vec()))
}

impl TwoQubitState {
    pub fn new(matrix: Matrix4<Complex64>) -> Self {
        TwoQubitState { matrix }
    }

    pub fn from_ket(amps: [Complex64; 4]) -> Self {
        TwoQubitState { matrix: Matrix4::from_fn(|i, j| amps[i] * amps[j].conj()) }
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitState { matrix: Matrix4::identity() * Complex64::new(0.25, 0.0) }
    }

    /// Splits the registry into two parties by path and maps each party's
    /// local support onto a qubit.
    ///
    /// Local states are ordered by total occupation, then with the earliest
    /// occupied mode first: |0> before |1> for occupation qubits and H before
    /// V for dual-rail polarization qubits.
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        let reg = rho.registry();
        // Modes never occupied in the support carry no information.
        let active: Vec<usize> = (0..reg.len()).filter(|&i| rho.basis().iter().any(|s| s.get(i) > 0)).collect();
        let mut all_paths: Vec<Path> = reg.modes().iter().map(|m| m.path).collect();
        all_paths.dedup();
        let active = if all_paths.len() == 2 { (0..reg.len()).collect() } else { active };
        let mut paths: Vec<Path> = active.iter().map(|&i| reg.modes()[i].path).collect();
        paths.dedup();
        if paths.len() != 2 {
            return Err(Error::UnsupportedDimension(format!("expected two parties, found {} paths", paths.len())));
        }
        let party = |p: Path| -> Vec<usize> { active.iter().copied().filter(|&i| reg.modes()[i].path == p).collect() };
        let party_a = party(paths[0]);
        let party_b = party(paths[1]);
        let local = |idx: &[usize]| -> Result<Vec<FockBasisState>> {
            let mut states: Vec<FockBasisState> = rho.basis().iter().map(|s| s.project(idx)).collect();
            states.sort_by_key(local_key);
            states.dedup();
            if states.len() > 2 {
                return Err(Error::UnsupportedDimension(format!("party has {} local states", states.len())));
            }
            Ok(states)
        };
        let la = local(&party_a)?;
        let lb = local(&party_b)?;
        let qubit = |s: &FockBasisState| -> usize {
            let a = la.iter().position(|x| *x == s.project(&party_a)).unwrap();
            let b = lb.iter().position(|x| *x == s.project(&party_b)).unwrap();
            2 * a + b
        };
        Ok(Self::gather(rho, qubit))
    }

    /// Polarization qubits (H = |0>, V = |1>) of one photon in each of two paths.
    /// Other labels must already be traced out.
    pub fn from_polarization(rho: &DensityOperator, path_a: Path, path_b: Path) -> Result<Self> {
        let reg = rho.registry();
        let h_a = reg.require(&ModeLabel::polarized(path_a, Polarization::H))?;
        let v_a = reg.require(&ModeLabel::polarized(path_a, Polarization::V))?;
        let h_b = reg.require(&ModeLabel::polarized(path_b, Polarization::H))?;
        let v_b = reg.require(&ModeLabel::polarized(path_b, Polarization::V))?;
        let bit = |s: &FockBasisState, h: usize, v: usize| -> Result<usize> {
            match (s.get(h), s.get(v)) {
                (1, 0) => Ok(0),
                (0, 1) => Ok(1),
                _ => Err(Error::UnsupportedDimension("path must carry exactly one photon".into())),
            }
        };
        for s in rho.basis() {
            bit(s, h_a, v_a)?;
            bit(s, h_b, v_b)?;
        }
        Ok(Self::gather(rho, |s| 2 * bit(s, h_a, v_a).unwrap() + bit(s, h_b, v_b).unwrap()))
    }

    /// Occupation qubits (|0>, |1>) of two modes, e.g. two phonon modes.
    pub fn from_occupation(rho: &DensityOperator, mode_a: ModeLabel, mode_b: ModeLabel) -> Result<Self> {
        let reg = rho.registry();
        if reg.len() != 2 {
            return Err(Error::UnsupportedDimension("trace out all other modes first".into()));
        }
        let a = reg.require(&mode_a)?;
        let b = reg.require(&mode_b)?;
        for s in rho.basis() {
            if s.get(a) > 1 || s.get(b) > 1 {
                return Err(Error::UnsupportedDimension("occupation above 1".into()));
            }
        }
        Ok(Self::gather(rho, |s| 2 * s.get(a) as usize + s.get(b) as usize))
    }

    fn gather(rho: &DensityOperator, qubit: impl Fn(&FockBasisState) -> usize) -> Self {
        let q: Vec<usize> = rho.basis().iter().map(qubit).collect();
        let mut m = Matrix4::zeros();
        for i in 0..q.len() {
            for j in 0..q.len() {
                m[(q[i], q[j])] += rho.matrix()[(i, j)];
            }
        }
        TwoQubitState { matrix: m }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Wootters concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
    ///
    /// The λ are taken as the singular values of `τ = Wᵀ (Y⊗Y) W`, where
    /// `ρ = W W†` keeps only eigenvalues above [`RANK_FLOOR`]. This avoids the
    /// square roots of round-off eigenvalues that limit the textbook route
    /// through `sqrt(ρ) ρ̃ sqrt(ρ)` to ~1e-8 accuracy on low-rank states.
    pub fn concurrence(&self) -> f64 {
        let rho = nalgebra::DMatrix::from_fn(4, 4, |i, j| self.matrix[(i, j)]);
        let h = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let kept: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > RANK_FLOOR).collect();
        if kept.is_empty() {
            return 0.0;
        }
        let w = nalgebra::DMatrix::from_fn(4, kept.len(), |r, c| {
            eig.eigenvectors[(r, kept[c])] * eig.eigenvalues[kept[c]].sqrt()
        });
        let yy = nalgebra::DMatrix::from_fn(4, 4, |i, j| spin_flip()[(i, j)]);
        let tau = w.transpose() * yy * &w;
        let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let rest: f64 = lambdas[1..].iter().sum();
        (lambdas[0] - rest).clamp(0.0, 1.0)
    }

    /// `U ρ U†` with `U = ua ⊗ ub`.
    pub fn local_unitary(&self, ua: &nalgebra::Matrix2<Complex64>, ub: &nalgebra::Matrix2<Complex64>) -> Self {
        let u: Matrix4<Complex64> = ua.kronecker(ub);
        TwoQubitState { matrix: u * self.matrix * u.adjoint() }
    }
}

/// σ_y ⊗ σ_y.
fn spin_flip() -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // σ_y ⊗ σ_y = antidiag(-1, 1, 1, -1)
    Matrix4::new(z, z, z, -one, z, z, one, z, z, one, z, z, -one, z, z, z)
}

/// Concurrence of a state supported on two qubits, parties split by path.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    Ok(TwoQubitState::from_density(rho)?.concurrence())
}
