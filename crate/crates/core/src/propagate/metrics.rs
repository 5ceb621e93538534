use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::spectral::{boundary_weights, BoundaryWeights, Corner, Side};

/// Accepted deviation of the total intensity from one.
pub const INTENSITY_TOL: f64 = 1e-9;

/// Where the light ended up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpMetrics {
    pub edge_depth: usize,
    pub corner_block: usize,
    #[serde(flatten)]
    pub weights: BoundaryWeights,
    pub centroid_x: f64,
    pub centroid_y: f64,
}

impl PumpMetrics {
    pub fn side(&self, side: Side) -> f64 {
        self.weights.side(side)
    }

    pub fn corner(&self, corner: Corner) -> f64 {
        self.weights.corner(corner)
    }

    pub fn dominant_corner(&self) -> Corner {
        self.weights.dominant_corner()
    }
}

/// Side-strip and corner-block occupations plus the intensity centroid
/// (in site units).
pub fn pump_metrics(intensity: &[f64], spec: &LatticeSpec, edge_depth: usize, corner_block: usize) -> Result<PumpMetrics> {
    let n = spec.num_sites();
    if intensity.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: intensity.len(),
        });
    }
    if let Some(v) = intensity.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::NotNormalized(format!("negative or NaN intensity {v}")));
    }
    let total: f64 = intensity.iter().sum();
    if (total - 1.0).abs() > INTENSITY_TOL {
        return Err(Error::NotNormalized(format!("intensities sum to {total:.12}")));
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for (i, &p) in intensity.iter().enumerate() {
        let (x, y) = spec.site_coords(i);
        cx += p * x as f64;
        cy += p * y as f64;
    }
    Ok(PumpMetrics {
        edge_depth,
        corner_block,
        weights: boundary_weights(intensity, spec.size_x, spec.size_y, edge_depth, corner_block),
        centroid_x: cx,
        centroid_y: cy,
    })
}
