//! Registries, kets, a beam splitter and a partial trace.

use std::sync::Arc;

use photon_interference::fock::{concurrence, DensityOperator, FockKet, ModeLabel, ModeRegistry, Path};
use photon_interference::optics::BeamSplitter;

fn main() -> photon_interference::Result<()> {
    let reg: Arc<ModeRegistry> =
        ModeRegistry::builder(2).modes([Path::Arm1, Path::Arm2, Path::Out1, Path::Out2].map(ModeLabel::photon)).build()?;
    println!("{} modes, {} basis states up to two photons", reg.len(), reg.basis().len());

    let photon = FockKet::basis(reg.clone(), &[(ModeLabel::photon(Path::Arm1), 1)])?;
    let bs = BeamSplitter::balanced((Path::Arm1, Path::Arm2), (Path::Out1, Path::Out2));
    let out = bs.apply(&photon)?;
    for (s, a) in out.iter() {
        println!("  {:?}  {a:.4}", s.occupations());
    }

    let rho = DensityOperator::from_ket(&out);
    let keep = [ModeLabel::photon(Path::Out1), ModeLabel::photon(Path::Out2)];
    let reduced = rho.partial_trace(&keep)?;
    println!("purity of the output pair {:.6}", reduced.purity());
    println!("path-mode concurrence {:.6}", concurrence(&reduced)?);
    Ok(())
}
