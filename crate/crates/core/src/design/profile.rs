use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian refractive-index bump of one waveguide:
/// `Δn(x, y) = δn·exp(−x²/σx² − y²/σy²)`. Widths in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexProfile {
    pub delta_n: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    /// Background index.
    pub n0: f64,
}

impl Default for IndexProfile {
    fn default() -> Self {
        IndexProfile {
            delta_n: 2.8e-3,
            sigma_x: 3.5,
            sigma_y: 5.35,
            n0: 1.473,
        }
    }
}

impl IndexProfile {
    pub fn validate(&self) -> Result<()> {
        let fields = [self.delta_n, self.sigma_x, self.sigma_y, self.n0];
        if fields.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("index profile must be positive: {self:?}")));
        }
        // paraxial: the guiding contrast has to be a small perturbation
        if self.delta_n > 0.05 * self.n0 {
            return Err(Error::InvalidSpec(format!(
                "delta_n = {} is not small against n0 = {}",
                self.delta_n, self.n0
            )));
        }
        Ok(())
    }

    /// Background wavenumber `k₀ = 2π·n₀/λ` in µm⁻¹.
    pub fn wavenumber(&self, wavelength_nm: f64) -> f64 {
        std::f64::consts::TAU * self.n0 / (wavelength_nm * 1e-3)
    }

    pub fn contrast(&self, x: f64, y: f64) -> f64 {
        self.delta_n * (-(x * x) / (self.sigma_x * self.sigma_x) - (y * y) / (self.sigma_y * self.sigma_y)).exp()
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_x.min(self.sigma_y)
    }
}
