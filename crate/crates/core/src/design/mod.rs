//! Waveguide calibration and inverse design: continuum supermode solver,
//! exponential coupling law, and layouts realising lattice couplings.

mod calibrate;
mod law;
mod layout;
mod profile;
mod waveguide;

pub use calibrate::{calibrate, Calibration};
pub use law::{
    fit_coupling_law, spacing_for_coupling, spacing_for_coupling_ext, CouplingLaw, CouplingSamples, FitDiagnostics,
    LawRow,
};
pub use layout::{build_layout, rectilinear_positions, LayoutRecord, WaveguideLayout, MIN_SPACING_UM};
pub use profile::IndexProfile;
pub use waveguide::{
    solve_single_waveguide, solve_two_waveguide, solve_two_waveguide_unchecked, GridSpec, TwoWaveguideSolution,
    REFINEMENT_TOL,
};
