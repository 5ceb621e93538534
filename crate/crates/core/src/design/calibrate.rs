use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::{fit_coupling_law, CouplingLaw, CouplingSamples, FitDiagnostics};
use super::profile::IndexProfile;
use super::waveguide::{solve_two_waveguide, solve_two_waveguide_unchecked, GridSpec};
use crate::error::Result;

/// Solver samples plus the fitted law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub law: CouplingLaw,
    pub diagnostics: Vec<FitDiagnostics>,
    pub samples: Vec<CouplingSamples>,
}

/// Solves every (separation, wavelength) pair and fits `t = A·exp(−γs)` per
/// wavelength. With `check_refinement` each point is also solved on the
/// half-spacing grid.
pub fn calibrate(
    profile: &IndexProfile,
    separations_um: &[f64],
    wavelengths_nm: &[f64],
    grid: GridSpec,
    check_refinement: bool,
) -> Result<Calibration> {
    let jobs: Vec<(usize, f64)> = (0..wavelengths_nm.len())
        .flat_map(|w| separations_um.iter().map(move |&s| (w, s)))
        .collect();
    let couplings = jobs
        .par_iter()
        .map(|&(w, s)| {
            let sol = if check_refinement {
                solve_two_waveguide(profile, s, wavelengths_nm[w], grid)?
            } else {
                solve_two_waveguide_unchecked(profile, s, wavelengths_nm[w], grid)?
            };
            Ok(sol.coupling)
        })
        .collect::<Result<Vec<f64>>>()?;
    let samples: Vec<CouplingSamples> = wavelengths_nm
        .iter()
        .enumerate()
        .map(|(w, &wavelength_nm)| CouplingSamples {
            wavelength_nm,
            points: jobs
                .iter()
                .zip(&couplings)
                .filter(|((jw, _), _)| *jw == w)
                .map(|((_, s), &t)| (*s, t))
                .collect(),
        })
        .collect();
    let (law, diagnostics) = fit_coupling_law(&samples)?;
    Ok(Calibration {
        law,
        diagnostics,
        samples,
    })
}
