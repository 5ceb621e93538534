//! JSON run configuration shared by the command-line subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::design::{CouplingLaw, MIN_SPACING_UM};
use crate::error::{Error, Result};
use crate::io::read_law_file;
use crate::lattice::{LatticeSpec, PumpParams};
use crate::model::GeometricOptions;
use crate::propagate::default_wavelengths;
use crate::registry::{pump_models, ModelContext};
use crate::schedule::{PumpSchedule, DEVICE_LENGTH_CM, SCAN_START_PI};
use crate::spectral::RegionOptions;

/// Named schedules over the experimental scan window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulePreset {
    /// Both phases ramp.
    Both,
    XOnly,
    YOnly,
    /// Both phases held at the scan start.
    Frozen,
}

impl SchedulePreset {
    pub fn schedule(self, z_total: f64) -> PumpSchedule {
        match self {
            SchedulePreset::Both => PumpSchedule::scan(z_total, true, true),
            SchedulePreset::XOnly => PumpSchedule::scan(z_total, true, false),
            SchedulePreset::YOnly => PumpSchedule::scan(z_total, false, true),
            SchedulePreset::Frozen => {
                let phi = SCAN_START_PI * std::f64::consts::PI;
                PumpSchedule::frozen(PumpParams::new(phi, phi), z_total)
            }
        }
    }
}

impl fmt::Display for SchedulePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulePreset::Both => "both",
            SchedulePreset::XOnly => "x-only",
            SchedulePreset::YOnly => "y-only",
            SchedulePreset::Frozen => "frozen",
        })
    }
}

impl FromStr for SchedulePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(SchedulePreset::Both),
            "x-only" => Ok(SchedulePreset::XOnly),
            "y-only" => Ok(SchedulePreset::YOnly),
            "frozen" => Ok(SchedulePreset::Frozen),
            _ => Err(Error::Parse(format!(
                "unknown schedule preset {s:?} (expected both, x-only, y-only or frozen)"
            ))),
        }
    }
}

fn device_length() -> f64 {
    DEVICE_LENGTH_CM
}

/// Either explicit phases or a preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleConfig {
    Preset {
        preset: SchedulePreset,
        #[serde(default = "device_length")]
        z_total: f64,
    },
    Explicit(PumpSchedule),
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig::Explicit(PumpSchedule::default())
    }
}

impl ScheduleConfig {
    pub fn resolve(&self) -> PumpSchedule {
        match self {
            ScheduleConfig::Preset { preset, z_total } => preset.schedule(*z_total),
            ScheduleConfig::Explicit(s) => s.clone(),
        }
    }
}

fn nearest() -> String {
    "nearest".to_string()
}

fn design_wavelength() -> f64 {
    1550.0
}

fn min_spacing() -> f64 {
    MIN_SPACING_UM
}

/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// A registered pump model name.
    #[serde(default = "nearest")]
    pub model: String,
    /// nm
    #[serde(default = "default_wavelengths")]
    pub wavelengths: Vec<f64>,
    #[serde(default = "design_wavelength")]
    pub design_wavelength_nm: f64,
    /// Coupling-law CSV; must exist.
    #[serde(default)]
    pub law: Option<PathBuf>,
    /// Default output path of `design`.
    #[serde(default)]
    pub layout: Option<PathBuf>,
    /// Directory for outputs without an explicit path.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Nearest model: carry couplings through the law across wavelengths.
    #[serde(default)]
    pub dispersive: bool,
    #[serde(default)]
    pub geometric: GeometricOptions,
    #[serde(default)]
    pub region: RegionOptions,
    #[serde(default = "min_spacing")]
    pub min_spacing_um: f64,
    /// Fixed evolution step count.
    #[serde(default)]
    pub steps: Option<usize>,
    /// For randomised checks; every command is deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lattice: LatticeSpec::default(),
            schedule: ScheduleConfig::default(),
            model: nearest(),
            wavelengths: default_wavelengths(),
            design_wavelength_nm: design_wavelength(),
            law: None,
            layout: None,
            output_dir: None,
            dispersive: false,
            geometric: GeometricOptions::default(),
            region: RegionOptions::default(),
            min_spacing_um: MIN_SPACING_UM,
            steps: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for p in [&mut cfg.law, &mut cfg.layout, &mut cfg.output_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_json(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.schedule().validate()?;
        if !pump_models().contains(&self.model) {
            return Err(Error::UnknownStrategy {
                kind: "pump model",
                name: self.model.clone(),
                available: pump_models().names().join(", "),
            });
        }
        if self.wavelengths.is_empty() || self.wavelengths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("wavelengths must be a non-empty list of positive values".into()));
        }
        if !(self.design_wavelength_nm > 0.0) || !(self.min_spacing_um >= 0.0) {
            return Err(Error::Config("design wavelength and minimum spacing must be positive".into()));
        }
        if self.steps == Some(0) {
            return Err(Error::Config("steps must be positive".into()));
        }
        if let Some(law) = &self.law {
            if !law.is_file() {
                return Err(Error::Config(format!("law file {} does not exist", law.display())));
            }
        }
        let parent = self.layout.as_deref().and_then(Path::parent);
        for dir in [self.output_dir.as_deref(), parent].into_iter().flatten() {
            if !dir.as_os_str().is_empty() && !dir.is_dir() {
                return Err(Error::Config(format!("directory {} does not exist", dir.display())));
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> PumpSchedule {
        self.schedule.resolve()
    }

    pub fn read_law(&self) -> Result<Option<CouplingLaw>> {
        self.law.as_deref().map(read_law_file).transpose()
    }

    pub fn model_context(&self) -> Result<ModelContext> {
        Ok(ModelContext {
            spec: self.lattice.clone(),
            law: self.read_law()?,
            design_wavelength_nm: self.design_wavelength_nm,
            dispersive: self.dispersive,
            geometric: self.geometric,
            min_spacing_um: self.min_spacing_um,
        })
    }

    /// `name` inside `output_dir` (or the working directory).
    pub fn output_path(&self, name: &str) -> PathBuf {
        match &self.output_dir {
            Some(d) => d.join(name),
            None => PathBuf::from(name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Frequency;

    #[test]
    fn empty_object_is_paper_default() {
        let cfg = RunConfig::from_json("{}", Path::new(".")).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.wavelengths.len(), 17);
        assert_eq!(cfg.schedule(), PumpSchedule::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_json(r#"{"lattise": {}}"#, Path::new(".")).unwrap_err();
        assert_eq!(err.name(), "Config");
        assert!(RunConfig::from_json(r#"{"lattice": {"size_z": 3}}"#, Path::new(".")).is_err());
    }

    #[test]
    fn presets_and_lattice() {
        let cfg = RunConfig::from_json(
            r#"{"lattice": {"size_x": 9, "b_x": "2/6"}, "schedule": {"preset": "x-only", "z_total": 150}}"#,
            Path::new("."),
        )
        .unwrap();
        assert_eq!(cfg.lattice.size_x, 9);
        assert_eq!(cfg.lattice.b_x, Frequency::rational(1, 3).unwrap());
        let s = cfg.schedule();
        assert_eq!(s.z_total, 150.0);
        assert_eq!(s.phi_y_start, s.phi_y_end);
        assert!(s.phi_x_end > s.phi_x_start);
    }

    #[test]
    fn law_must_exist() {
        let dir = tempfile::tempdir().unwrap();
        let err = RunConfig::from_json(r#"{"law": "missing.csv"}"#, dir.path()).unwrap_err();
        assert_eq!(err.name(), "Config");
        std::fs::write(dir.path().join("law.csv"), "wavelength_nm,A_per_cm,gamma_per_um\n1550,67.4,0.176\n").unwrap();
        let cfg = RunConfig::from_json(r#"{"law": "law.csv", "model": "geometric"}"#, dir.path()).unwrap();
        let ctx = cfg.model_context().unwrap();
        assert!(ctx.law.is_some());
        assert!(pump_models().create(&cfg.model, &ctx).is_ok());
    }

    #[test]
    fn unknown_model() {
        let err = RunConfig::from_json(r#"{"model": "nnn"}"#, Path::new(".")).unwrap_err();
        assert_eq!(err.name(), "UnknownStrategy");
    }
}
