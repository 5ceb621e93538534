//! Two-dimensional topological pumps built from modulated-hopping lattices.

pub mod config;
pub mod design;
pub mod error;
pub mod io;
pub mod lattice;
pub mod model;
pub mod numeric;
pub mod operator;
pub mod propagate;
pub mod registry;
pub mod schedule;
pub mod spectral;
pub mod topology;

pub use error::{Error, Result};
pub use lattice::{Axis, Boundary, Frequency, LatticeSpec, PumpParams};
pub use operator::HermitianOperator;
pub use schedule::PumpSchedule;
