//! Numerical thresholds shared by validation and the decision procedures.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const TOL_HERM: f64 = 1e-9;
pub const TOL_TRACE: f64 = 1e-9;
pub const TOL_PSD: f64 = 1e-9;
/// HS distance below which `ρ` counts as a product state.
pub const TOL_PRODUCT: f64 = 1e-7;
/// Reduced-state entropy below which a pure state counts as a product.
pub const TOL_ENTROPY: f64 = 1e-9;
/// HS residual below which a point is inside a vertex hull.
pub const TOL_HULL: f64 = 1e-7;
/// HS distance below which two vertices are treated as duplicates.
pub const TOL_PRUNE: f64 = 1e-9;

/// Bundle of thresholds, overridable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub product: f64,
    pub entropy: f64,
    pub hull: f64,
    pub prune: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            trace: TOL_TRACE,
            psd: TOL_PSD,
            product: TOL_PRODUCT,
            entropy: TOL_ENTROPY,
            hull: TOL_HULL,
            prune: TOL_PRUNE,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 7] = ["herm", "trace", "psd", "product", "entropy", "hull", "prune"];

    /// Sets one named threshold. Values must be finite and positive.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::BadParameter(format!("tolerance {key} must be finite and positive, got {value}")));
        }
        let slot = match key {
            "herm" => &mut self.herm,
            "trace" => &mut self.trace,
            "psd" => &mut self.psd,
            "product" => &mut self.product,
            "entropy" => &mut self.entropy,
            "hull" => &mut self.hull,
            "prune" => &mut self.prune,
            other => {
                return Err(Error::BadParameter(format!(
                    "unknown tolerance key '{other}' (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Parses `key=value` and applies it.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) =
            spec.split_once('=').ok_or_else(|| Error::BadParameter(format!("expected key=value, got '{spec}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::BadParameter(format!("tolerance value '{value}' is not a number")))?;
        self.set(key.trim(), value)
    }
}
