use rayon::prelude::*;

use super::evolve::{evolve, steps_for, EvolveOptions, Evolution};
use super::metrics::{pump_metrics, PumpMetrics};
use super::models::{PumpModel, ScheduledModel};
use super::state::{inject, InjectionSite};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::schedule::PumpSchedule;
use crate::spectral::RegionOptions;

/// Default wavelength sweep, nm.
pub fn default_wavelengths() -> Vec<f64> {
    (0..=16).map(|k| 1510.0 + 5.0 * k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Fixed step count; chosen from the norm bound when absent.
    pub steps: Option<usize>,
    pub snapshot_every: Option<usize>,
    pub region: RegionOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            steps: None,
            snapshot_every: None,
            region: RegionOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WavelengthRun {
    pub wavelength_nm: f64,
    pub evolution: Evolution,
}

#[derive(Debug, Clone)]
pub struct PumpResult {
    pub runs: Vec<WavelengthRun>,
    /// Equal-weight average over wavelengths, per site.
    pub intensity: Vec<f64>,
    pub metrics: PumpMetrics,
    pub size_x: usize,
    pub size_y: usize,
}

impl PumpResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.runs.iter().map(|r| r.evolution.max_norm_drift).fold(0.0, f64::max)
    }
}

/// Step count satisfying the per-step phase bound over the whole schedule.
pub fn choose_steps(model: &dyn PumpModel, schedule: &PumpSchedule, wavelength_nm: f64) -> Result<usize> {
    let bound = match model.uniform_norm_bound(wavelength_nm) {
        Some(b) => b,
        None => {
            const PROBES: usize = 256;
            let mut b: f64 = 0.0;
            for k in 0..=PROBES {
                let z = schedule.z_total * k as f64 / PROBES as f64;
                b = b.max(model.norm_bound(schedule.at(z), wavelength_nm)?);
            }
            // the bound between probes can exceed the sampled maximum slightly
            1.05 * b
        }
    };
    Ok(steps_for(schedule.z_total, bound))
}

/// Evolves one injected site per wavelength and averages the output
/// intensities with equal weights. A non-dispersive model is evolved once and
/// the result shared by every wavelength.
pub fn run_pump(
    model: &dyn PumpModel,
    schedule: &PumpSchedule,
    injection: InjectionSite,
    wavelengths: &[f64],
    options: RunOptions,
) -> Result<PumpResult> {
    schedule.validate()?;
    if wavelengths.is_empty() {
        return Err(Error::InvalidSpec("no wavelengths to run".into()));
    }
    let spec = model.spec();
    let psi0 = inject(spec, injection)?;
    let evolve_at = |wavelength_nm: f64| -> Result<Evolution> {
        let steps = match options.steps {
            Some(s) => s,
            None => choose_steps(model, schedule, wavelength_nm)?,
        };
        let generator = ScheduledModel {
            model,
            schedule,
            wavelength_nm,
        };
        evolve(
            &generator,
            &psi0,
            schedule.z_total,
            steps,
            EvolveOptions {
                snapshot_every: options.snapshot_every,
                ..EvolveOptions::default()
            },
        )
    };
    let evolutions: Vec<Evolution> = if model.dispersive() {
        wavelengths.par_iter().map(|&w| evolve_at(w)).collect::<Result<_>>()?
    } else {
        let shared = evolve_at(wavelengths[0])?;
        vec![shared; wavelengths.len()]
    };
    let runs: Vec<WavelengthRun> = wavelengths
        .iter()
        .zip(evolutions)
        .map(|(&wavelength_nm, evolution)| WavelengthRun {
            wavelength_nm,
            evolution,
        })
        .collect();

    let n = spec.num_sites();
    let per_run: Vec<Vec<f64>> = runs.iter().map(|r| r.evolution.final_state.intensities()).collect();
    let intensity: Vec<f64> = (0..n)
        .map(|i| {
            let acc: CompensatedSum = per_run.iter().map(|v| v[i]).collect();
            acc.total() / runs.len() as f64
        })
        .collect();
    let metrics = pump_metrics(&intensity, spec, options.region.edge_depth, options.region.corner_block)?;
    Ok(PumpResult {
        runs,
        intensity,
        metrics,
        size_x: spec.size_x,
        size_y: spec.size_y,
    })
}
