use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares sinusoid `mean · (1 - visibility · cos(φ + phase))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fringe {
    pub mean: f64,
    pub amplitude: f64,
    /// Offset of the dark fringe from `φ = 0`.
    pub phase: f64,
}

impl Fringe {
    pub fn visibility(&self) -> f64 {
        if self.mean <= 0.0 {
            0.0
        } else {
            self.amplitude / self.mean
        }
    }
}

/// Fits `A + B cos φ + C sin φ` to the samples.
///
/// The fit recovers the fringe contrast exactly for any sampling that is not
/// degenerate, whereas max/min over a finite sweep misses the true extrema
/// unless a sample lands on them.
pub fn fit_fringe(phis: &[f64], values: &[f64]) -> Result<Fringe> {
    if phis.len() != values.len() || phis.len() < 3 {
        return Err(Error::InvalidParameter("fringe fit needs at least three paired samples".into()));
    }
    let a = DMatrix::from_fn(phis.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => phis[i].cos(),
        _ => phis[i].sin(),
    });
    let y = DVector::from_column_slice(values);
    let normal = a.transpose() * &a;
    let rhs = a.transpose() * y;
    let x = normal
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("fringe samples do not resolve a sinusoid".into()))?
        .solve(&rhs);
    let (b, c) = (x[1], x[2]);
    let amplitude = b.hypot(c);
    let phase = if amplitude > 0.0 { c.atan2(-b) } else { 0.0 };
    Ok(Fringe { mean: x[0], amplitude, phase })
}

/// `(max - min) / (max + min)` over the samples.
pub fn sampled_visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::phase_sweep;

    #[test]
    fn recovers_contrast_and_offset() {
        let phis = phase_sweep(64);
        let (v, d) = (0.37, 1.1);
        let ys: Vec<f64> = phis.iter().map(|p| 0.5 * (1.0 - v * (p + d).cos())).collect();
        let f = fit_fringe(&phis, &ys).unwrap();
        assert!((f.visibility() - v).abs() < 1e-14);
        assert!((f.phase - d).abs() < 1e-13);
        assert!((f.mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampled_visibility_of_flat_data_is_zero() {
        assert_eq!(sampled_visibility(&[0.5; 8]), 0.0);
        assert!((sampled_visibility(&[0.0, 1.0]) - 1.0).abs() < 1e-15);
    }
}
