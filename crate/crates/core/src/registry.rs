//! Named strategy variants selected at runtime.

use crate::design::{CouplingLaw, MIN_SPACING_UM};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::model::GeometricOptions;
use crate::propagate::{Dispersion, GeometricModel, NearestModel, PumpModel};
use crate::topology::{CurvatureIntegral, DirectIntegration, Fhs, FirstChernMethod, ProductFormula, SecondChernMethod};

type Factory<T, C> = Box<dyn Fn(&C) -> Result<Box<T>> + Send + Sync>;

/// Name → factory table for one kind of strategy.
pub struct Registry<T: ?Sized, C> {
    kind: &'static str,
    entries: Vec<(&'static str, Factory<T, C>)>,
}

impl<T: ?Sized, C> Registry<T, C> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds or replaces `name`.
    pub fn register<F>(&mut self, name: &'static str, factory: F) -> &mut Self
    where
        F: Fn(&C) -> Result<Box<T>> + Send + Sync + 'static,
    {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, Box::new(factory)));
        self
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn create(&self, name: &str, context: &C) -> Result<Box<T>> {
        match self.entries.iter().find(|(n, _)| *n == name) {
            Some((_, factory)) => factory(context),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            }),
        }
    }
}

/// Everything a pump model factory may need.
#[derive(Debug, Clone)]
pub struct ModelContext {
    pub spec: LatticeSpec,
    pub law: Option<CouplingLaw>,
    pub design_wavelength_nm: f64,
    /// Nearest model only: map couplings through the law across wavelengths.
    pub dispersive: bool,
    pub geometric: GeometricOptions,
    pub min_spacing_um: f64,
}

impl ModelContext {
    pub fn new(spec: LatticeSpec) -> Self {
        ModelContext {
            spec,
            law: None,
            design_wavelength_nm: 1550.0,
            dispersive: false,
            geometric: GeometricOptions::default(),
            min_spacing_um: MIN_SPACING_UM,
        }
    }

    fn require_law(&self, what: &str) -> Result<CouplingLaw> {
        self.law
            .clone()
            .ok_or_else(|| Error::Config(format!("{what} needs a coupling law")))
    }
}

pub fn pump_models() -> Registry<dyn PumpModel, ModelContext> {
    let mut r: Registry<dyn PumpModel, ModelContext> = Registry::new("pump model");
    r.register("nearest", |c: &ModelContext| {
        let model = if c.dispersive {
            let dispersion = Dispersion {
                law: c.require_law("a dispersive nearest model")?,
                design_wavelength_nm: c.design_wavelength_nm,
            };
            NearestModel::with_dispersion(c.spec.clone(), dispersion)?
        } else {
            NearestModel::new(c.spec.clone())?
        };
        Ok(Box::new(model) as Box<dyn PumpModel>)
    });
    r.register("geometric", |c: &ModelContext| {
        let model = GeometricModel::new(
            c.spec.clone(),
            c.require_law("the geometric model")?,
            c.design_wavelength_nm,
            c.geometric,
        )?
        .with_min_spacing(c.min_spacing_um);
        Ok(Box::new(model) as Box<dyn PumpModel>)
    });
    r
}

pub fn first_chern_methods() -> Registry<dyn FirstChernMethod, ()> {
    let mut r: Registry<dyn FirstChernMethod, ()> = Registry::new("first Chern method");
    r.register("fhs", |_: &()| Ok(Box::new(Fhs) as Box<dyn FirstChernMethod>));
    r.register("curvature", |_: &()| {
        Ok(Box::new(CurvatureIntegral::default()) as Box<dyn FirstChernMethod>)
    });
    r
}

pub fn second_chern_methods() -> Registry<dyn SecondChernMethod, ()> {
    let mut r: Registry<dyn SecondChernMethod, ()> = Registry::new("second Chern method");
    r.register("product", |_: &()| Ok(Box::new(ProductFormula) as Box<dyn SecondChernMethod>));
    r.register("direct", |_: &()| {
        Ok(Box::new(DirectIntegration::default()) as Box<dyn SecondChernMethod>)
    });
    r
}
