//! Coincidence dip of a type-II pair behind diagonal polarizers.
//!
//! Run with `cargo run --example hom_dip`.

use photon_interference::experiments::{run_hom, HomConfig};

fn main() -> photon_interference::Result<()> {
    let cfg = HomConfig::standard();
    let delays = cfg.default_delays(33);
    let r = run_hom(&cfg, &delays)?;
    let tc = cfg.coherence_time();
    println!("{:>10} {:>12}", "tau/tau_c", "P_c");
    for (t, p) in r.sweep().iter().zip(r.column("p_coincidence").unwrap()) {
        let bar = "#".repeat((p * 60.0).round() as usize);
        println!("{:>10.3} {:>12.6} {bar}", t / tc, p);
    }
    println!("dip visibility {:.6}", r.metric("dip_visibility").unwrap());
    Ok(())
}
