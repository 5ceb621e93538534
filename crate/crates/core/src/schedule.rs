use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PumpParams;

/// Start of the experimental pump scan, in units of π.
pub const SCAN_START_PI: f64 = 0.477;
/// End of the experimental pump scan, in units of π.
pub const SCAN_END_PI: f64 = 2.19;
/// Device length, cm.
pub const DEVICE_LENGTH_CM: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleShape {
    #[default]
    Linear,
}

/// z-parametrised pump phases. A frozen axis has `start == end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSchedule {
    pub phi_x_start: f64,
    pub phi_x_end: f64,
    pub phi_y_start: f64,
    pub phi_y_end: f64,
    /// cm
    pub z_total: f64,
    #[serde(default)]
    pub shape: ScheduleShape,
}

impl Default for PumpSchedule {
    fn default() -> Self {
        PumpSchedule::scan(DEVICE_LENGTH_CM, true, true)
    }
}

impl PumpSchedule {
    /// The experimental scan `0.477π → 2.19π` on the selected axes; the other
    /// axis is held at `0.477π`.
    pub fn scan(z_total: f64, pump_x: bool, pump_y: bool) -> Self {
        let start = SCAN_START_PI * PI;
        let end = SCAN_END_PI * PI;
        PumpSchedule {
            phi_x_start: start,
            phi_x_end: if pump_x { end } else { start },
            phi_y_start: start,
            phi_y_end: if pump_y { end } else { start },
            z_total,
            shape: ScheduleShape::Linear,
        }
    }

    pub fn frozen(pump: PumpParams, z_total: f64) -> Self {
        PumpSchedule {
            phi_x_start: pump.phi_x(),
            phi_x_end: pump.phi_x(),
            phi_y_start: pump.phi_y(),
            phi_y_end: pump.phi_y(),
            z_total,
            shape: ScheduleShape::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_total > 0.0) || !self.z_total.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "schedule z_total must be positive, got {}",
                self.z_total
            )));
        }
        Ok(())
    }

    pub fn is_frozen(&self) -> bool {
        self.phi_x_start == self.phi_x_end && self.phi_y_start == self.phi_y_end
    }

    /// Phases at propagation distance `z` (clamped to `[0, z_total]`).
    pub fn at(&self, z: f64) -> PumpParams {
        let s = match self.shape {
            ScheduleShape::Linear => (z / self.z_total).clamp(0.0, 1.0),
        };
        PumpParams::new(
            self.phi_x_start + (self.phi_x_end - self.phi_x_start) * s,
            self.phi_y_start + (self.phi_y_end - self.phi_y_start) * s,
        )
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Self {
        PumpSchedule {
            phi_x_start: self.phi_x_end,
            phi_x_end: self.phi_x_start,
            phi_y_start: self.phi_y_end,
            phi_y_end: self.phi_y_start,
            ..self.clone()
        }
    }

    pub fn with_length(&self, z_total: f64) -> Self {
        PumpSchedule {
            z_total,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_ramp_endpoints() {
        let s = PumpSchedule::scan(15.0, true, false);
        let a = s.at(0.0);
        let b = s.at(15.0);
        assert!((a.phi_x() - 0.477 * PI).abs() < 1e-12);
        assert!((b.phi_x() - (2.19 - 2.0) * PI).abs() < 1e-12);
        assert_eq!(a.phi_y(), b.phi_y());
        assert!(!s.is_frozen());
        assert!(PumpSchedule::scan(15.0, false, false).is_frozen());
    }

    #[test]
    fn reversed_schedule_mirrors() {
        let s = PumpSchedule::scan(10.0, true, true);
        let r = s.reversed();
        for z in [0.0, 2.5, 7.0, 10.0] {
            let a = s.at(z);
            let b = r.at(10.0 - z);
            assert!((a.phi_x() - b.phi_x()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_nonpositive_length() {
        assert!(PumpSchedule::scan(0.0, true, true).validate().is_err());
    }
}
