//! A photon Raman-scatters in either arm of an interferometer. A click at
//! one output heralds a phonon shared between the two arms.

use num_complex::Complex64;
use photon_interference::experiments::{gedanken_chain, Interaction, MzConfig, RamanScatterer};
use photon_interference::fock::{EnvironmentState, Path};

fn main() -> photon_interference::Result<()> {
    for (label, markovian, overlap) in [("identical arms", false, 1.0), ("half overlap", false, 0.5), ("eager trace", true, 1.0)]
    {
        let mut raman = RamanScatterer::standard();
        raman.markovian = markovian;
        let envs = EnvironmentState::pair_with_overlap(Complex64::new(overlap, 0.0), 2)?;
        let out = gedanken_chain(&MzConfig::balanced(envs, Interaction::Raman(raman)), 0.0, Path::Out1)?;
        println!(
            "{label:<15} P(herald) {:.4}  <10|rho|01> {:.4}  concurrence {:.6}",
            out.herald_probability, out.off_diagonal, out.concurrence
        );
    }
    Ok(())
}
