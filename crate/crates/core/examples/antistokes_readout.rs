use num_complex::Complex64;
use photon_interference::experiments::{
    gedanken_chain, phase_sweep, run_antistokes_probe, Interaction, MzConfig, RamanScatterer,
};
use photon_interference::fock::{EnvironmentState, Path};

fn main() -> photon_interference::Result<()> {
    let envs = EnvironmentState::pair_with_overlap(Complex64::new(0.8, 0.0), 2)?;
    let cfg = MzConfig::balanced(envs, Interaction::Raman(RamanScatterer::standard()));
    let heralded = gedanken_chain(&cfg, 0.0, Path::Out1)?;
    let probe = run_antistokes_probe(&heralded.phonons, &phase_sweep(24))?;
    println!("stored coherence 2|rho_10,01| = {:.6}", 2.0 * heralded.off_diagonal.norm());
    println!("anti-Stokes fringe visibility = {:.6}", probe.metric("visibility").unwrap());
    for (phi, p) in probe.sweep().iter().zip(probe.column("p_as_d1").unwrap()).step_by(4) {
        println!("  phi {phi:.3}  P(anti-Stokes at out1) {p:.4}");
    }
    Ok(())
}
