//! Without polarizers the pair stays frequency-entangled but shows no dip:
//! the H/V labels tell the photons apart.

use photon_interference::experiments::{hom_point, HomConfig};
use photon_interference::sources::{make_spdc, SpdcType};

fn main() -> photon_interference::Result<()> {
    let mut cfg = HomConfig::standard();
    cfg.polarizers = None;
    let pair = make_spdc(&cfg.grid, &cfg.pump, SpdcType::II)?;
    println!("bins {}, support {} pairs", cfg.grid.len(), pair.support().len());
    println!("signal/idler frequency correlation {:.6}", pair.frequency_correlation());

    for k in [-2.0, 0.0, 0.5, 2.0] {
        let p = hom_point(&cfg, k * cfg.coherence_time())?;
        println!(
            "tau = {k:>4} tau_c   P_c = {:.6}   signal purity = {:.6}",
            p.p_coincidence, p.signal_purity
        );
    }
    Ok(())
}
