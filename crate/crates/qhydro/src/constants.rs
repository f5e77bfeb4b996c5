use serde::{Deserialize, Serialize};

use crate::error::{QhError, Result};

/// Carrier mass and reduced Planck constant for a run.
///
/// The diffusion coefficient is never stored; it is derived as
/// `D = hbar / (2 m)` so the relation holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { m: 1.0, hbar: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(m: f64, hbar: f64) -> Result<Self> {
        let c = Self { m, hbar };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(QhError::config("constants.m", "mass must be finite and > 0"));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(QhError::config("constants.hbar", "hbar must be finite and > 0"));
        }
        Ok(())
    }

    /// Diffusion coefficient of the carrier Wiener process, `hbar / (2 m)`.
    pub fn diffusion(&self) -> f64 {
        self.hbar / (2.0 * self.m)
    }
}
