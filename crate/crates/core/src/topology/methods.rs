use super::first::{axis_band_cherns, chern_1, chern_1_curvature, DEFAULT_DELTA};
use super::grid::{ChernReport, ParamGrid};
use super::second::{
    axis_band_ranges, chern_2_direct, chern_2_product, direct_sum_bloch4, pairs_below_gap, select_gap, GapChoice,
};
use crate::error::Result;
use crate::lattice::{Axis, LatticeSpec};
use crate::operator::HermitianOperator;

pub type Bloch2<'a> = dyn Fn(f64, f64) -> Result<HermitianOperator> + Sync + 'a;

/// A way of evaluating the first Chern number of a band set over a 2-torus.
pub trait FirstChernMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn compute(&self, bloch: &Bloch2<'_>, band_set: &[usize], grid: &ParamGrid) -> Result<ChernReport>;
}

/// Plaquette link variables.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fhs;

impl FirstChernMethod for Fhs {
    fn name(&self) -> &'static str {
        "fhs"
    }

    fn compute(&self, bloch: &Bloch2<'_>, band_set: &[usize], grid: &ParamGrid) -> Result<ChernReport> {
        chern_1(&bloch, band_set, grid)
    }
}

/// Midpoint-rule integral of the finite-difference curvature.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureIntegral {
    pub delta: f64,
}

impl Default for CurvatureIntegral {
    fn default() -> Self {
        CurvatureIntegral { delta: DEFAULT_DELTA }
    }
}

impl FirstChernMethod for CurvatureIntegral {
    fn name(&self) -> &'static str {
        "curvature"
    }

    fn compute(&self, bloch: &Bloch2<'_>, band_set: &[usize], grid: &ParamGrid) -> Result<ChernReport> {
        chern_1_curvature(&bloch, band_set, grid, self.delta)
    }
}

/// A way of evaluating the second Chern number of a gap of the direct-sum
/// pump, on an `n⁴` grid.
pub trait SecondChernMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn compute(&self, spec: &LatticeSpec, gap: GapChoice, n: usize) -> Result<ChernReport>;
}

/// `Σ ν_m ν_n` over the axis-band pairs below the gap.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductFormula;

impl SecondChernMethod for ProductFormula {
    fn name(&self) -> &'static str {
        "product"
    }

    fn compute(&self, spec: &LatticeSpec, gap: GapChoice, n: usize) -> Result<ChernReport> {
        let grid = ParamGrid::hypercube(n)?;
        let energy = select_gap(spec, gap, n)?.centre();
        let pairs = pairs_below_gap(
            &axis_band_ranges(spec, Axis::X, n)?,
            &axis_band_ranges(spec, Axis::Y, n)?,
            energy,
        )?;
        let nu_x = axis_band_cherns(spec, Axis::X, n)?;
        let nu_y = axis_band_cherns(spec, Axis::Y, n)?;
        let value = chern_2_product(&nu_x, &nu_y, &pairs);
        Ok(ChernReport::new("chern2", gap.to_string(), grid, value as f64))
    }
}

/// 4D integral of the projector's Chern density.
#[derive(Debug, Clone, Copy)]
pub struct DirectIntegration {
    pub delta: f64,
}

impl Default for DirectIntegration {
    fn default() -> Self {
        DirectIntegration { delta: DEFAULT_DELTA }
    }
}

impl SecondChernMethod for DirectIntegration {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn compute(&self, spec: &LatticeSpec, gap: GapChoice, n: usize) -> Result<ChernReport> {
        let grid = ParamGrid::hypercube(n)?;
        let energy = select_gap(spec, gap, n)?.centre();
        let bloch4 = direct_sum_bloch4(spec, &grid)?;
        let mut report = chern_2_direct(&bloch4, energy, &grid, self.delta)?;
        report.band_or_gap = gap.to_string();
        Ok(report)
    }
}
