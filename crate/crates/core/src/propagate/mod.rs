//! Paraxial z-evolution of injected light under pump schedules.

mod evolve;
mod metrics;
mod models;
mod run;
mod state;

pub use evolve::{
    evolve, exp_i, exp_i_real, steps_for, Direction, EvolveOptions, Evolution, FnGenerator, Generator, Propagator,
    Snapshot, MAX_PHASE_PER_STEP,
};
pub use metrics::{pump_metrics, PumpMetrics, INTENSITY_TOL};
pub use models::{Dispersion, GeometricModel, NearestModel, PumpModel, ScheduledModel};
pub use run::{choose_steps, default_wavelengths, run_pump, PumpResult, RunOptions, WavelengthRun};
pub use state::{inject, FieldState, InjectionSite, NORM_TOL};
