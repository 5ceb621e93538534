//! Lattice Hamiltonians as a function of pump phases and wavelength.

use nalgebra::DMatrix;

use super::evolve::{exp_i_real, Generator, Propagator};
use crate::design::{rectilinear_positions, spacing_for_coupling, CouplingLaw, MIN_SPACING_UM};
use crate::error::Result;
use crate::lattice::{Axis, LatticeSpec, PumpParams};
use crate::model::{axis_chain_matrix, geometric_from_positions, real_kron_sum, GeometricOptions};
use crate::operator::HermitianOperator;
use crate::schedule::PumpSchedule;

/// A pumpable lattice model. Implementations are registered by name in
/// [`crate::registry::pump_models`].
pub trait PumpModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn spec(&self) -> &LatticeSpec;

    fn hamiltonian(&self, pump: PumpParams, wavelength_nm: f64) -> Result<HermitianOperator>;

    /// Whether the Hamiltonian depends on wavelength.
    fn dispersive(&self) -> bool;

    fn norm_bound(&self, pump: PumpParams, wavelength_nm: f64) -> Result<f64> {
        Ok(self.hamiltonian(pump, wavelength_nm)?.norm_bound())
    }

    /// A bound on `‖H‖` valid for every pump value, when cheaply known.
    fn uniform_norm_bound(&self, _wavelength_nm: f64) -> Option<f64> {
        None
    }

    fn propagator(&self, pump: PumpParams, wavelength_nm: f64, dz: f64) -> Result<Propagator> {
        Propagator::for_hamiltonian(&self.hamiltonian(pump, wavelength_nm)?, dz)
    }
}

/// Couplings designed at one wavelength, read out at another through the
/// same waveguide spacings.
#[derive(Debug, Clone)]
pub struct Dispersion {
    pub law: CouplingLaw,
    pub design_wavelength_nm: f64,
}

impl Dispersion {
    /// Coupling at `wavelength_nm` of the bond designed to carry `t`.
    pub fn map(&self, t: f64, wavelength_nm: f64) -> Result<f64> {
        let s = spacing_for_coupling(&self.law, self.design_wavelength_nm, t)?;
        self.law.coupling(wavelength_nm, s, false)
    }
}

/// Nearest-neighbour direct-sum lattice.
#[derive(Debug, Clone)]
pub struct NearestModel {
    spec: LatticeSpec,
    dispersion: Option<Dispersion>,
}

impl NearestModel {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        spec.validate()?;
        Ok(NearestModel { spec, dispersion: None })
    }

    pub fn with_dispersion(spec: LatticeSpec, dispersion: Dispersion) -> Result<Self> {
        spec.validate_geometric()?;
        Ok(NearestModel {
            spec,
            dispersion: Some(dispersion),
        })
    }

    fn axis_matrix(&self, axis: Axis, phi: f64, wavelength_nm: f64) -> Result<DMatrix<f64>> {
        let mut h = axis_chain_matrix(&self.spec, axis, phi);
        if let Some(d) = &self.dispersion {
            for v in h.iter_mut() {
                if *v != 0.0 {
                    *v = d.map(*v, wavelength_nm)?;
                }
            }
        }
        Ok(h)
    }

    fn axes(&self, pump: PumpParams, wavelength_nm: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok((
            self.axis_matrix(Axis::X, pump.phi_x(), wavelength_nm)?,
            self.axis_matrix(Axis::Y, pump.phi_y(), wavelength_nm)?,
        ))
    }
}

fn gershgorin(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

impl PumpModel for NearestModel {
    fn name(&self) -> &'static str {
        "nearest"
    }

    fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn hamiltonian(&self, pump: PumpParams, wavelength_nm: f64) -> Result<HermitianOperator> {
        let (hx, hy) = self.axes(pump, wavelength_nm)?;
        real_kron_sum(&hx, &hy)
    }

    fn dispersive(&self) -> bool {
        self.dispersion.is_some()
    }

    fn norm_bound(&self, pump: PumpParams, wavelength_nm: f64) -> Result<f64> {
        let (hx, hy) = self.axes(pump, wavelength_nm)?;
        Ok(gershgorin(&hx) + gershgorin(&hy))
    }

    fn uniform_norm_bound(&self, wavelength_nm: f64) -> Option<f64> {
        let axis = |axis: Axis| -> Option<f64> {
            if self.spec.size(axis) < 2 {
                return Some(0.0);
            }
            let t = self.spec.bare(axis).abs() + self.spec.modulation(axis).abs();
            let t = match &self.dispersion {
                // the coupling map is increasing in t
                Some(d) => d.map(t, wavelength_nm).ok()?,
                None => t,
            };
            Some(2.0 * t)
        };
        Some(axis(Axis::X)? + axis(Axis::Y)?)
    }

    fn propagator(&self, pump: PumpParams, wavelength_nm: f64, dz: f64) -> Result<Propagator> {
        let (hx, hy) = self.axes(pump, wavelength_nm)?;
        Ok(Propagator::separable(exp_i_real(hx, dz), exp_i_real(hy, dz)))
    }
}

/// All-pairs couplings of the ideal rectilinear waveguide layout designed at
/// `design_wavelength_nm`.
#[derive(Debug, Clone)]
pub struct GeometricModel {
    spec: LatticeSpec,
    law: CouplingLaw,
    design_wavelength_nm: f64,
    options: GeometricOptions,
    min_spacing: f64,
}

impl GeometricModel {
    pub fn new(spec: LatticeSpec, law: CouplingLaw, design_wavelength_nm: f64, options: GeometricOptions) -> Result<Self> {
        spec.validate_geometric()?;
        law.params_at(design_wavelength_nm, options.extrapolate)?;
        Ok(GeometricModel {
            spec,
            law,
            design_wavelength_nm,
            options,
            min_spacing: MIN_SPACING_UM,
        })
    }

    pub fn with_min_spacing(mut self, min_spacing: f64) -> Self {
        self.min_spacing = min_spacing;
        self
    }

    pub fn positions(&self, pump: PumpParams) -> Result<Vec<(f64, f64)>> {
        let (xs, ys) = rectilinear_positions(&self.spec, &self.law, self.design_wavelength_nm, pump, self.min_spacing)?;
        Ok(ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect())
    }
}

impl PumpModel for GeometricModel {
    fn name(&self) -> &'static str {
        "geometric"
    }

    fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn hamiltonian(&self, pump: PumpParams, wavelength_nm: f64) -> Result<HermitianOperator> {
        geometric_from_positions(
            &self.positions(pump)?,
            self.spec.size_x,
            self.spec.size_y,
            &self.law,
            wavelength_nm,
            self.options,
        )
    }

    fn dispersive(&self) -> bool {
        true
    }
}

/// `z ↦ H(schedule(z), λ)`.
pub struct ScheduledModel<'a> {
    pub model: &'a dyn PumpModel,
    pub schedule: &'a PumpSchedule,
    pub wavelength_nm: f64,
}

impl Generator for ScheduledModel<'_> {
    fn size(&self) -> (usize, usize) {
        (self.model.spec().size_x, self.model.spec().size_y)
    }

    fn hamiltonian(&self, z: f64) -> Result<HermitianOperator> {
        self.model.hamiltonian(self.schedule.at(z), self.wavelength_nm)
    }

    fn norm_bound(&self, z: f64) -> Result<f64> {
        self.model.norm_bound(self.schedule.at(z), self.wavelength_nm)
    }

    fn propagator(&self, z: f64, dz: f64) -> Result<Propagator> {
        self.model.propagator(self.schedule.at(z), self.wavelength_nm, dz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_2d_direct_sum;

    fn law() -> CouplingLaw {
        CouplingLaw::new(vec![
            crate::design::LawRow {
                wavelength_nm: 1510.0,
                a_per_cm: 73.3,
                gamma_per_um: 0.1845,
            },
            crate::design::LawRow {
                wavelength_nm: 1590.0,
                a_per_cm: 62.06,
                gamma_per_um: 0.1678,
            },
        ])
        .unwrap()
    }

    #[test]
    fn nearest_matches_builder() {
        let spec = LatticeSpec::default();
        let m = NearestModel::new(spec.clone()).unwrap();
        let pump = PumpParams::new(0.7, 2.1);
        assert_eq!(m.hamiltonian(pump, 1550.0).unwrap(), build_2d_direct_sum(&spec, pump).unwrap());
        let bound = m.uniform_norm_bound(1550.0).unwrap();
        assert!(m.norm_bound(pump, 1550.0).unwrap() <= bound + 1e-12);
        assert!(m.hamiltonian(pump, 1550.0).unwrap().norm_bound() <= bound + 1e-12);
    }

    #[test]
    fn dispersion_is_identity_at_design_wavelength() {
        let spec = LatticeSpec::default();
        let d = Dispersion {
            law: law(),
            design_wavelength_nm: 1550.0,
        };
        let m = NearestModel::with_dispersion(spec.clone(), d).unwrap();
        let pump = PumpParams::new(0.7, 2.1);
        let a = m.hamiltonian(pump, 1550.0).unwrap();
        let b = build_2d_direct_sum(&spec, pump).unwrap();
        assert!((a.matrix() - b.matrix()).iter().all(|z| z.norm() < 1e-12));
        // longer wavelength couples more strongly at fixed spacing
        let red = m.hamiltonian(pump, 1590.0).unwrap();
        assert!(red.entry(0, 1).re > a.entry(0, 1).re);
    }

    #[test]
    fn geometric_contains_nearest_bonds() {
        let spec = LatticeSpec::default();
        let m = GeometricModel::new(spec.clone(), law(), 1550.0, GeometricOptions::default()).unwrap();
        let pump = PumpParams::new(1.5, 0.2);
        let g = m.hamiltonian(pump, 1550.0).unwrap();
        let nn = build_2d_direct_sum(&spec, pump).unwrap();
        for i in 0..91 {
            for j in 0..91 {
                if nn.entry(i, j).re != 0.0 {
                    assert!((g.entry(i, j).re - nn.entry(i, j).re).abs() < 1e-6);
                }
            }
        }
        assert!(m.dispersive());
    }
}
