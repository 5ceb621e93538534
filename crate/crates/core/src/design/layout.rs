use serde::{Deserialize, Serialize};

use super::law::{spacing_for_coupling, CouplingLaw};
use crate::error::{Error, Result};
use crate::lattice::{Axis, LatticeSpec, PumpParams};
use crate::model::hopping_amplitude;
use crate::schedule::PumpSchedule;

/// Default smallest allowed centre-to-centre spacing, µm.
pub const MIN_SPACING_UM: f64 = 8.0;

/// Transverse waveguide positions (µm) on a uniform z grid (cm). Waveguide
/// `w` sits at lattice site `(w % size_x, w / size_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideLayout {
    size_x: usize,
    size_y: usize,
    z_cm: Vec<f64>,
    /// `positions[zi][w] = (x, y)`.
    positions: Vec<Vec<(f64, f64)>>,
}

impl WaveguideLayout {
    /// Checks sizes, a uniform increasing z grid and that no two waveguides
    /// coincide at any sample.
    pub fn new(size_x: usize, size_y: usize, z_cm: Vec<f64>, positions: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let n = size_x * size_y;
        if z_cm.is_empty() || z_cm.len() != positions.len() {
            return Err(Error::InvalidSpec(format!(
                "layout has {} z samples but {} position rows",
                z_cm.len(),
                positions.len()
            )));
        }
        if let Some(row) = positions.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        if z_cm.len() > 1 {
            let dz = (z_cm[z_cm.len() - 1] - z_cm[0]) / (z_cm.len() - 1) as f64;
            let uniform = z_cm
                .windows(2)
                .all(|w| w[1] > w[0] && ((w[1] - w[0]) - dz).abs() <= 1e-9 * dz.abs().max(1.0));
            if !uniform {
                return Err(Error::InvalidSpec("layout z grid must be uniform and increasing".into()));
            }
        }
        let layout = WaveguideLayout {
            size_x,
            size_y,
            z_cm,
            positions,
        };
        for zi in 0..layout.z_cm.len() {
            let d = layout.min_distance_at(zi);
            if !(d > 0.0) {
                return Err(Error::OverlapError(format!(
                    "waveguides coincide at z = {} cm",
                    layout.z_cm[zi]
                )));
            }
        }
        Ok(layout)
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn num_waveguides(&self) -> usize {
        self.size_x * self.size_y
    }

    pub fn z_samples(&self) -> &[f64] {
        &self.z_cm
    }

    pub fn positions_at_sample(&self, zi: usize) -> &[(f64, f64)] {
        &self.positions[zi]
    }

    pub fn lattice_index(&self, w: usize) -> (usize, usize) {
        (w % self.size_x, w / self.size_x)
    }

    /// Positions at `z`, linearly interpolated and clamped to the sampled span.
    pub fn positions_at(&self, z: f64) -> Vec<(f64, f64)> {
        let m = self.z_cm.len();
        if m == 1 || z <= self.z_cm[0] {
            return self.positions[0].clone();
        }
        if z >= self.z_cm[m - 1] {
            return self.positions[m - 1].clone();
        }
        let dz = (self.z_cm[m - 1] - self.z_cm[0]) / (m - 1) as f64;
        let f = (z - self.z_cm[0]) / dz;
        let k = (f.floor() as usize).min(m - 2);
        let s = f - k as f64;
        self.positions[k]
            .iter()
            .zip(&self.positions[k + 1])
            .map(|(a, b)| (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)))
            .collect()
    }

    pub fn min_distance_at(&self, zi: usize) -> f64 {
        let p = &self.positions[zi];
        let mut best = f64::INFINITY;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                best = best.min((p[i].0 - p[j].0).hypot(p[i].1 - p[j].1));
            }
        }
        best
    }

    /// Largest displacement of any waveguide between neighbouring z samples.
    pub fn max_step_displacement(&self) -> f64 {
        self.positions
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a.0 - b.0).hypot(a.1 - b.1)))
            .fold(0.0, f64::max)
    }
}

/// Column positions `X_i` and row positions `Y_j` (µm) whose nearest-neighbour
/// spacings realise the lattice couplings at `pump`.
pub fn rectilinear_positions(
    spec: &LatticeSpec,
    law: &CouplingLaw,
    wavelength_nm: f64,
    pump: PumpParams,
    min_spacing: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let axis_positions = |axis: Axis| -> Result<Vec<f64>> {
        let mut pos = vec![0.0];
        for i in 0..spec.size(axis).saturating_sub(1) {
            let t = hopping_amplitude(spec, axis, i as i64, pump.phi(axis));
            let s = spacing_for_coupling(law, wavelength_nm, t)?;
            if s < min_spacing {
                return Err(Error::OverlapError(format!(
                    "bond {i} along {axis:?} needs {s:.3} um < minimum {min_spacing} um (t = {t:.4} per cm)"
                )));
            }
            pos.push(pos[i] + s);
        }
        Ok(pos)
    };
    Ok((axis_positions(Axis::X)?, axis_positions(Axis::Y)?))
}

/// Rectilinear layout tracing `schedule` over `z_samples` uniform z points.
pub fn build_layout(
    spec: &LatticeSpec,
    law: &CouplingLaw,
    wavelength_nm: f64,
    schedule: &PumpSchedule,
    z_samples: usize,
    min_spacing: f64,
) -> Result<WaveguideLayout> {
    spec.validate_geometric()?;
    schedule.validate()?;
    if z_samples < 2 {
        return Err(Error::InvalidSpec(format!("layout needs >= 2 z samples, got {z_samples}")));
    }
    let z_cm: Vec<f64> = (0..z_samples)
        .map(|k| schedule.z_total * k as f64 / (z_samples - 1) as f64)
        .collect();
    let positions = z_cm
        .iter()
        .map(|&z| {
            let (xs, ys) = rectilinear_positions(spec, law, wavelength_nm, schedule.at(z), min_spacing)?;
            Ok(ys
                .iter()
                .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    WaveguideLayout::new(spec.size_x, spec.size_y, z_cm, positions)
}

/// CSV row of a layout file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutRecord {
    pub z_cm: f64,
    pub wg_index: usize,
    pub ix: usize,
    pub iy: usize,
    pub x_um: f64,
    pub y_um: f64,
}

impl WaveguideLayout {
    pub fn records(&self) -> Vec<LayoutRecord> {
        let mut out = Vec::with_capacity(self.z_cm.len() * self.num_waveguides());
        for (zi, &z) in self.z_cm.iter().enumerate() {
            for (w, &(x, y)) in self.positions[zi].iter().enumerate() {
                let (ix, iy) = self.lattice_index(w);
                out.push(LayoutRecord {
                    z_cm: z,
                    wg_index: w,
                    ix,
                    iy,
                    x_um: x,
                    y_um: y,
                });
            }
        }
        out
    }

    /// Inverse of [`WaveguideLayout::records`]; rows may come in any order.
    pub fn from_records(records: &[LayoutRecord]) -> Result<Self> {
        let size_x = records.iter().map(|r| r.ix + 1).max().unwrap_or(0);
        let size_y = records.iter().map(|r| r.iy + 1).max().unwrap_or(0);
        let n = size_x * size_y;
        if n == 0 {
            return Err(Error::InvalidSpec("empty layout".into()));
        }
        let mut zs: Vec<f64> = records.iter().map(|r| r.z_cm).collect();
        zs.sort_by(f64::total_cmp);
        zs.dedup();
        let mut positions = vec![vec![(f64::NAN, f64::NAN); n]; zs.len()];
        for r in records {
            if r.wg_index != r.iy * size_x + r.ix {
                return Err(Error::InvalidSpec(format!(
                    "waveguide {} does not match lattice site ({}, {})",
                    r.wg_index, r.ix, r.iy
                )));
            }
            let zi = zs.binary_search_by(|z| z.total_cmp(&r.z_cm)).expect("z collected above");
            positions[zi][r.wg_index] = (r.x_um, r.y_um);
        }
        if positions.iter().flatten().any(|p| p.0.is_nan()) {
            return Err(Error::InvalidSpec("layout is missing waveguide positions".into()));
        }
        WaveguideLayout::new(size_x, size_y, zs, positions)
    }
}
