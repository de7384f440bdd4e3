//! Fringe visibility of a single photon whose arms leave marks in local
//! environments. The visibility equals `|<E1|E2>|`.

use num_complex::Complex64;
use photon_interference::experiments::{phase_sweep, run_mz, Interaction, MzConfig};
use photon_interference::fock::EnvironmentState;

fn main() -> photon_interference::Result<()> {
    let phases = phase_sweep(32);
    println!("{:>8} {:>12} {:>12}", "|g|", "visibility", "offset");
    for g in [1.0, 0.75, 0.5, 0.25, 0.0] {
        let envs = EnvironmentState::pair_with_overlap(Complex64::from_polar(g, 0.3), 3)?;
        let r = run_mz(&MzConfig::balanced(envs, Interaction::GenericEntangler), &phases)?;
        println!("{g:>8.2} {:>12.9} {:>12.6}", r.metric("visibility").unwrap(), r.metric("fringe_phase").unwrap());
    }
    Ok(())
}
