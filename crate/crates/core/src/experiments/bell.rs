use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hom::HomConfig;
use crate::error::Result;
use crate::fock::{DensityOperator, Dof, FockKet, ModeLabel, Path, TwoQubitState};
use crate::optics::{herald, DetectorModel, PhaseElement};

/// Post-selected coincidence state of the HOM splitter.
#[derive(Debug, Clone)]
pub struct BellOutcome {
    /// Full two-photon state (frequency and polarization) given one click per output.
    pub state: FockKet,
    pub probability: f64,
    /// Polarization qubits of `out1` and `out2` (H = |0>, V = |1>).
    pub polarization: TwoQubitState,
    pub concurrence: f64,
    /// Fidelity of the polarization state with `(|HV> - |VH>)/sqrt2`.
    pub bell_fidelity: f64,
    /// Purity of the `out1` photon's frequency state.
    pub frequency_purity: f64,
}

/// Bare type-II pair at delay `tau` through the splitter, post-selected on
/// coincidences. No input polarizers are applied: the H/V labels are the
/// qubits. Analyzer angles belong to [`chsh`].
pub fn hom_bell_state(cfg: &HomConfig, tau: f64) -> Result<BellOutcome> {
    cfg.validate()?;
    let delayed = PhaseElement::delay(Path::Arm1, tau).apply(&cfg.source()?)?;
    let out = cfg.beam_splitter()?.apply(&delayed)?;
    let reg = out.registry().clone();
    let detectors = [DetectorModel::on_path(&reg, Path::Out1), DetectorModel::on_path(&reg, Path::Out2)];
    let (state, probability) = herald(&out, &detectors, &[1, 1])?;

    let rho = DensityOperator::from_ket(&state);
    let pol = rho.trace_dof(Dof::Frequency)?;
    let polarization = TwoQubitState::from_polarization(&pol, Path::Out1, Path::Out2)?;
    let freq = rho.trace_dof(Dof::Polarization)?;
    let out1: Vec<ModeLabel> = freq.registry().modes().iter().filter(|m| m.path == Path::Out1).copied().collect();
    let frequency_purity = freq.partial_trace(&out1)?.purity();

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let singlet = TwoQubitState::from_ket([z, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), z]);
    let bell_fidelity = (polarization.matrix * singlet.matrix).trace().re;
    Ok(BellOutcome {
        concurrence: polarization.concurrence(),
        state,
        probability,
        polarization,
        bell_fidelity,
        frequency_purity,
    })
}

/// Analyzer angles for the two parties, in polarizer convention (θ = 0 is H).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshAngles {
    /// Settings that reach `2√2` on a maximally entangled state.
    pub fn optimal() -> Self {
        ChshAngles { a: 0.0, a_prime: PI / 4.0, b: PI / 8.0, b_prime: 3.0 * PI / 8.0 }
    }
}

/// `cos 2θ σ_z + sin 2θ σ_x`: ±1 for transmission through a polarizer at θ
/// or its orthogonal partner.
fn analyzer(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = (2.0 * theta).sin_cos();
    Matrix2::new(c.into(), s.into(), s.into(), (-c).into())
}

/// `E(θa, θb) = <σ_θa ⊗ σ_θb>`.
pub fn correlation(state: &TwoQubitState, theta_a: f64, theta_b: f64) -> f64 {
    let op: Matrix4<Complex64> = analyzer(theta_a).kronecker(&analyzer(theta_b));
    (state.matrix * op).trace().re
}

/// `|E(a,b) - E(a,b') + E(a',b) + E(a',b')|`.
pub fn chsh(state: &TwoQubitState, angles: &ChshAngles) -> f64 {
    let e = |x, y| correlation(state, x, y);
    (e(angles.a, angles.b) - e(angles.a, angles.b_prime) + e(angles.a_prime, angles.b) + e(angles.a_prime, angles.b_prime))
        .abs()
}

/// Largest CHSH value over all measurement directions, `2 sqrt(m1 + m2)` with
/// `m1, m2` the two largest eigenvalues of `TᵀT`.
pub fn max_chsh(state: &TwoQubitState) -> f64 {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let paulis = [Matrix2::new(z, one, one, z), Matrix2::new(z, -i, i, z), Matrix2::new(one, z, z, -one)];
    let t = Matrix3::from_fn(|r, c| (state.matrix * paulis[r].kronecker(&paulis[c])).trace().re);
    let mut ev: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * (ev[0] + ev[1]).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn singlet_reaches_tsirelson_bound() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = TwoQubitState::from_ket([c(0.0), c(s), c(-s), c(0.0)]);
        // Oracle: E(a, b) = -cos 2(a - b) for the singlet.
        let a = ChshAngles::optimal();
        let e = |x: f64, y: f64| -(2.0 * (x - y)).cos();
        let s_oracle = (e(a.a, a.b) - e(a.a, a.b_prime) + e(a.a_prime, a.b) + e(a.a_prime, a.b_prime)).abs();
        assert!((chsh(&psi, &a) - s_oracle).abs() < 1e-14);
        assert!((chsh(&psi, &a) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((max_chsh(&psi) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn classical_states_respect_the_bound() {
        let hv = TwoQubitState::from_ket([c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(chsh(&hv, &ChshAngles::optimal()) <= 2.0);
        assert!(max_chsh(&hv) <= 2.0 + 1e-12);
        let mixed = TwoQubitState::maximally_mixed();
        assert!(chsh(&mixed, &ChshAngles::optimal()).abs() < 1e-15);
    }

    #[test]
    fn zero_delay_coincidences_form_a_singlet() {
        let out = hom_bell_state(&HomConfig::standard(), 0.0).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert!((out.concurrence - 1.0).abs() < 1e-10);
        assert!((out.bell_fidelity - 1.0).abs() < 1e-12);
        assert!(out.frequency_purity < 1.0);
    }
}
