//! The interferometer experiments: HOM with an SPDC source, Bell/CHSH
//! analysis of its coincidences, the single-photon Mach-Zehnder with arm
//! environments, and the Raman/phonon chain with anti-Stokes readout.

mod bell;
mod fringe;
mod hom;
mod mz;
mod raman;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fock::BASIS_ORDERING_VERSION;

pub use bell::{chsh, hom_bell_state, max_chsh, BellOutcome, ChshAngles};
pub use fringe::{fit_fringe, sampled_visibility, Fringe};
pub use hom::{coherence_time, hom_point, run_hom, HomConfig, HomPoint};
pub use mz::{mz_point, run_mz, Interaction, MzConfig, MzPoint};
pub use raman::{
    gedanken_chain, run_antistokes_probe, run_gedanken, GedankenOutcome, RamanScatterer, EMISSION_REGISTER,
};

/// Slack allowed on probability and visibility ranges before a run is
/// declared numerically broken.
pub const RANGE_TOL: f64 = 1e-10;

/// Tabulated sweep plus scalar metrics.
///
/// The first column is the sweep variable. Columns named `p_*` hold
/// probabilities and columns or metrics containing `visibility` hold
/// visibilities; both are range-checked by [`ExperimentResult::check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub observable: String,
    pub columns: Vec<(String, Vec<f64>)>,
    pub metrics: BTreeMap<String, f64>,
    pub metadata: BTreeMap<String, Value>,
}

impl ExperimentResult {
    pub fn new(observable: &str, columns: Vec<(String, Vec<f64>)>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("basis_ordering_version".into(), Value::from(BASIS_ORDERING_VERSION));
        ExperimentResult { observable: observable.into(), columns, metrics: BTreeMap::new(), metadata }
    }

    pub fn sweep_variable(&self) -> &str {
        self.columns.first().map(|(n, _)| n.as_str()).unwrap_or("")
    }

    pub fn sweep(&self) -> &[f64] {
        self.columns.first().map(|(_, v)| v.as_slice()).unwrap_or(&[])
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.sweep().len()
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn with_metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    /// Range checks on probability and visibility data, and NaN detection.
    pub fn check(&self) -> Result<()> {
        let in_unit = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::InvariantViolation(format!("{name} is not finite")));
            }
            if v < -RANGE_TOL || v > 1.0 + RANGE_TOL {
                return Err(Error::InvariantViolation(format!("{name} = {v} outside [0, 1]")));
            }
            Ok(())
        };
        for (name, values) in &self.columns {
            if values.len() != self.rows() {
                return Err(Error::InvariantViolation(format!("column {name} has {} rows", values.len())));
            }
            let ranged = name.starts_with("p_") || name.contains("visibility");
            for &v in values {
                if ranged {
                    in_unit(name, v)?;
                } else if !v.is_finite() {
                    return Err(Error::InvariantViolation(format!("{name} is not finite")));
                }
            }
        }
        for (name, &v) in &self.metrics {
            if name.contains("visibility") || name.starts_with("p_") {
                in_unit(name, v)?;
            }
        }
        Ok(())
    }
}

/// `steps` evenly spaced points in `[start, end]`.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps).map(|i| start + (end - start) * i as f64 / (steps - 1) as f64).collect(),
    }
}

/// `steps` phases covering `[0, 2π)`.
pub fn phase_sweep(steps: usize) -> Vec<f64> {
    (0..steps).map(|i| std::f64::consts::TAU * i as f64 / steps as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_check_catches_bad_probabilities() {
        let ok = ExperimentResult::new("x", vec![("phi".into(), vec![0.0, 1.0]), ("p_d1".into(), vec![0.2, 1.0])]);
        assert!(ok.check().is_ok());
        let bad = ExperimentResult::new("x", vec![("phi".into(), vec![0.0]), ("p_d1".into(), vec![1.1])]);
        assert!(matches!(bad.check(), Err(Error::InvariantViolation(_))));
        let bad = ok.clone().with_metric("visibility", f64::NAN);
        assert!(bad.check().is_err());
    }

    #[test]
    fn sweeps_have_requested_shape() {
        assert_eq!(linspace(-1.0, 1.0, 81).len(), 81);
        assert_eq!(linspace(-1.0, 1.0, 81)[40], 0.0);
        let p = phase_sweep(64);
        assert_eq!(p.len(), 64);
        assert!(p[63] < std::f64::consts::TAU);
    }
}
