#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use photon_interference::fock::{DensityOperator, FockKet, ModeLabel, ModeRegistry, Path};
use photon_interference::optics::{BeamSplitter, PhaseElement};
use photon_interference::Result;

pub const PATHS: [Path; 4] = [Path::Arm1, Path::Arm2, Path::Out1, Path::Out2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller; a normalized vector of these is Haar-uniform on the sphere.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::new(r * (TAU * u2).cos(), r * (TAU * u2).sin())
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    let th: f64 = rng.random::<f64>() * TAU;
    let [a, b, c] = [0; 3].map(|_| rng.random::<f64>() * TAU);
    let (s, co) = th.sin_cos();
    let e = |x: f64| Complex64::from_polar(1.0, x);
    Matrix2::new(e(a) * co, e(b) * s, -e(-b) * s * e(c), e(-a) * co * e(c))
}

/// Four photon modes, one per path, at most two photons.
pub fn path_registry() -> Arc<ModeRegistry> {
    ModeRegistry::builder(2).modes(PATHS.map(ModeLabel::photon)).build().unwrap()
}

#[derive(Debug, Clone)]
pub enum Element {
    Splitter(BeamSplitter),
    Phase(PhaseElement),
}

pub fn random_circuit(rng: &mut ChaCha8Rng, len: usize) -> Vec<Element> {
    (0..len)
        .map(|_| {
            if rng.random_bool(0.6) {
                let i = rng.random_range(0..4);
                let j = (i + rng.random_range(1..4)) % 4;
                let th: f64 = rng.random::<f64>() * TAU;
                let alpha = Complex64::from_polar(th.cos(), rng.random::<f64>() * TAU);
                let beta = Complex64::from_polar(th.sin(), rng.random::<f64>() * TAU);
                let bs = BeamSplitter::new(alpha, beta, (PATHS[i], PATHS[j]), (PATHS[i], PATHS[j])).unwrap();
                Element::Splitter(bs)
            } else {
                Element::Phase(PhaseElement::fixed(PATHS[rng.random_range(0..4)], rng.random::<f64>() * TAU))
            }
        })
        .collect()
}

pub fn run_ket(circuit: &[Element], ket: &FockKet) -> Result<FockKet> {
    let mut k = ket.clone();
    for e in circuit {
        k = match e {
            Element::Splitter(b) => b.apply(&k)?,
            Element::Phase(p) => p.apply(&k)?,
        };
    }
    Ok(k)
}

pub fn run_density(circuit: &[Element], rho: &DensityOperator) -> Result<DensityOperator> {
    let mut r = rho.clone();
    for e in circuit {
        r = match e {
            Element::Splitter(b) => b.apply(&r)?,
            Element::Phase(p) => p.apply(&r)?,
        };
    }
    Ok(r)
}

/// Matrix of the circuit on the full truncated basis, built column by column.
pub fn circuit_matrix(circuit: &[Element], reg: &Arc<ModeRegistry>) -> Result<DMatrix<Complex64>> {
    let basis = reg.basis();
    let mut u = DMatrix::zeros(basis.len(), basis.len());
    for (j, s) in basis.iter().enumerate() {
        let ket = FockKet::from_terms(reg.clone(), [(s.clone(), Complex64::new(1.0, 0.0))])?;
        let out = run_ket(circuit, &ket)?;
        for (i, t) in basis.iter().enumerate() {
            u[(i, j)] = out.amplitude(t);
        }
    }
    Ok(u)
}

pub fn random_ket(rng: &mut ChaCha8Rng, reg: &Arc<ModeRegistry>) -> FockKet {
    let basis = reg.basis();
    let amps = random_vector(rng, basis.len());
    FockKet::from_terms(reg.clone(), basis.into_iter().zip(amps)).unwrap()
}

/// Mixture of `k` random pure states with random weights.
pub fn random_density(rng: &mut ChaCha8Rng, reg: &Arc<ModeRegistry>, k: usize) -> DensityOperator {
    let parts: Vec<(f64, FockKet)> = (0..k).map(|_| (rng.random::<f64>() + 0.05, random_ket(rng, reg))).collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let parts: Vec<(f64, FockKet)> = parts.into_iter().map(|(w, k)| (w / total, k)).collect();
    DensityOperator::mixture(&parts).unwrap()
}
