use photon_interference::experiments::{chsh, hom_bell_state, max_chsh, ChshAngles, HomConfig};

fn main() -> photon_interference::Result<()> {
    let cfg = HomConfig::standard();
    for tau in [0.0, 0.5 * cfg.coherence_time(), 2.0 * cfg.coherence_time()] {
        let out = hom_bell_state(&cfg, tau)?;
        println!(
            "tau {:.3e} s: P(coinc) {:.4}  C {:.6}  F(psi-) {:.6}  S {:.6}  S_max {:.6}",
            tau,
            out.probability,
            out.concurrence,
            out.bell_fidelity,
            chsh(&out.polarization, &ChshAngles::optimal()),
            max_chsh(&out.polarization),
        );
    }
    Ok(())
}
