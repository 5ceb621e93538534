//! Berry curvature, first Chern numbers of pump bands and second Chern
//! numbers of the two-dimensional pump's gaps.

mod first;
mod grid;
mod methods;
mod second;

pub use first::{
    axis_band_cherns, band_frames, band_set_gap, berry_curvature, chain_bloch, chern_1, chern_1_curvature,
    fhs_from_frames, DEFAULT_DELTA, GAP_TOL,
};
pub use methods::{
    Bloch2, CurvatureIntegral, DirectIntegration, Fhs, FirstChernMethod, ProductFormula, SecondChernMethod,
};
pub use grid::{ChernReport, GridAxis, ParamGrid, MIN_GRID_COUNT};
pub use second::{
    axis_band_ranges, chern_2_direct, chern_2_direct_raw, chern_2_product, direct_sum_bloch4, direct_sum_gaps,
    pairs_below_gap, select_gap, CompositeGap, GapChoice, INTEGRALITY_TOL,
};
