//! All-pairs couplings of a waveguide layout through the exponential law.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::design::{CouplingLaw, WaveguideLayout};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometricOptions {
    /// Pairs weaker than this (cm⁻¹) are dropped.
    pub cutoff: f64,
    /// `η` in `s = sqrt(Δx² + (η·Δy)²)`.
    pub anisotropy: f64,
    /// Allow wavelengths outside the calibrated table.
    pub extrapolate: bool,
}

impl Default for GeometricOptions {
    fn default() -> Self {
        GeometricOptions {
            cutoff: 0.01,
            anisotropy: 1.0,
            extrapolate: false,
        }
    }
}

pub fn build_geometric_model(
    layout: &WaveguideLayout,
    law: &CouplingLaw,
    wavelength_nm: f64,
    z: f64,
    options: GeometricOptions,
) -> Result<HermitianOperator> {
    let positions = layout.positions_at(z);
    geometric_from_positions(&positions, layout.size_x(), layout.size_y(), law, wavelength_nm, options)
}

/// Same as [`build_geometric_model`] for positions given directly (µm),
/// ordered by flat site index.
pub fn geometric_from_positions(
    positions: &[(f64, f64)],
    size_x: usize,
    size_y: usize,
    law: &CouplingLaw,
    wavelength_nm: f64,
    options: GeometricOptions,
) -> Result<HermitianOperator> {
    let n = size_x * size_y;
    if positions.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: positions.len(),
        });
    }
    if !(options.anisotropy > 0.0) || !(options.cutoff >= 0.0) {
        return Err(Error::InvalidSpec(format!("bad geometric options {options:?}")));
    }
    let (a, gamma) = law.params_at(wavelength_nm, options.extrapolate)?;
    let eta = options.anisotropy;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for p in 0..n {
        for q in p + 1..n {
            let dx = positions[p].0 - positions[q].0;
            let dy = eta * (positions[p].1 - positions[q].1);
            let t = a * (-gamma * dx.hypot(dy)).exp();
            if t >= options.cutoff {
                h[(p, q)] = t;
                h[(q, p)] = t;
            }
        }
    }
    HermitianOperator::from_real(&h, size_x, size_y)
}
