//! Ghost-interference fringe of thermal light computed three ways.

use std::f64::consts::TAU;

use photon_interference::experiments::linspace;
use photon_interference::sources::{make_thermal_pair_mixture, ModeGrid};
use photon_interference::thermal::{density_scale, g2_from_density, g2_scan, SpatialField};

fn main() -> photon_interference::Result<()> {
    let grid = ModeGrid::uniform(1.0e5, 2.0e4, 2)?;
    let field = SpatialField::plane_waves(grid.clone());
    let rho = make_thermal_pair_mixture(&grid, true)?;
    let xs = linspace(0.0, TAU / 2.0e4, 9);
    let scan = g2_scan(&field, 0.0, &xs)?;
    println!("{:>12} {:>10} {:>10} {:>10}", "x2 (m)", "direct", "via G1", "density");
    for (i, x) in xs.iter().enumerate() {
        let d = g2_from_density(&rho, &field, 0.0, *x)? * density_scale(grid.len());
        println!("{x:>12.4e} {:>10.6} {:>10.6} {d:>10.6}", scan.g2_direct[i], scan.g2_via_g1[i]);
    }
    println!("visibility {:.6}, with G11 G22 removed {:.6}", scan.visibility, scan.dc_subtracted_visibility);
    Ok(())
}
