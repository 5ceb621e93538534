use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridAxis {
    #[serde(rename = "k_x")]
    Kx,
    #[serde(rename = "k_y")]
    Ky,
    #[serde(rename = "phi_x")]
    PhiX,
    #[serde(rename = "phi_y")]
    PhiY,
}

impl fmt::Display for GridAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridAxis::Kx => "k_x",
            GridAxis::Ky => "k_y",
            GridAxis::PhiX => "phi_x",
            GridAxis::PhiY => "phi_y",
        })
    }
}

impl FromStr for GridAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k_x" | "kx" => Ok(GridAxis::Kx),
            "k_y" | "ky" => Ok(GridAxis::Ky),
            "phi_x" | "phix" => Ok(GridAxis::PhiX),
            "phi_y" | "phiy" => Ok(GridAxis::PhiY),
            other => Err(Error::Parse(format!("unknown grid axis {other:?}"))),
        }
    }
}

/// Uniform periodic grid over `[0, 2π)^d`, `d ∈ {2, 4}`. Axis order fixes
/// the orientation of the integrals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamGrid {
    axes: Vec<GridAxis>,
    counts: Vec<usize>,
}

pub const MIN_GRID_COUNT: usize = 4;

impl ParamGrid {
    pub fn new(axes: Vec<GridAxis>, counts: Vec<usize>) -> Result<Self> {
        if axes.len() != counts.len() || !(axes.len() == 2 || axes.len() == 4) {
            return Err(Error::InvalidSpec(format!(
                "grid needs 2 or 4 labelled axes, got {} labels and {} counts",
                axes.len(),
                counts.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(Error::InvalidSpec(format!("grid axis {a} repeated")));
            }
        }
        if let Some(&c) = counts.iter().find(|&&c| c < MIN_GRID_COUNT) {
            return Err(Error::GridTooCoarse(format!(
                "{c} samples per axis, need at least {MIN_GRID_COUNT}"
            )));
        }
        Ok(ParamGrid { axes, counts })
    }

    /// `n × n` over `(first, second)`.
    pub fn square(first: GridAxis, second: GridAxis, n: usize) -> Result<Self> {
        ParamGrid::new(vec![first, second], vec![n, n])
    }

    /// `n⁴` over `(φx, kx, φy, ky)`.
    pub fn hypercube(n: usize) -> Result<Self> {
        ParamGrid::new(
            vec![GridAxis::PhiX, GridAxis::Kx, GridAxis::PhiY, GridAxis::Ky],
            vec![n; 4],
        )
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_points(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn step(&self, axis: usize) -> f64 {
        TAU / self.counts[axis] as f64
    }

    /// Cell volume `Π 2π/n_i`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dimension()).map(|a| self.step(a)).product()
    }

    /// Multi-index of flat point `p` (first axis fastest).
    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&c| {
                let i = p % c;
                p /= c;
                i
            })
            .collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut p = 0;
        for a in (0..self.dimension()).rev() {
            p = p * self.counts[a] + idx[a] % self.counts[a];
        }
        p
    }

    pub fn coordinates(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.step(a) * i as f64).collect()
    }

    /// Same grid with the first two axes exchanged.
    pub fn swapped(&self) -> Self {
        let mut g = self.clone();
        g.axes.swap(0, 1);
        g.counts.swap(0, 1);
        g
    }
}

/// Result of a Chern-number evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernReport {
    pub quantity: String,
    pub band_or_gap: String,
    pub grid: ParamGrid,
    /// Before rounding.
    pub raw: f64,
    pub value: i64,
}

impl ChernReport {
    pub fn new(quantity: &str, band_or_gap: String, grid: ParamGrid, raw: f64) -> Self {
        ChernReport {
            quantity: quantity.to_string(),
            band_or_gap,
            grid,
            raw,
            value: raw.round() as i64,
        }
    }

    pub fn deviation(&self) -> f64 {
        (self.raw - self.value as f64).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let g = ParamGrid::hypercube(5).unwrap();
        assert_eq!(g.num_points(), 625);
        for p in [0, 1, 7, 124, 624] {
            assert_eq!(g.flat_index(&g.multi_index(p)), p);
        }
        assert_eq!(g.flat_index(&[5, 0, 0, 0]), 0);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            ParamGrid::square(GridAxis::PhiX, GridAxis::Kx, 3),
            Err(Error::GridTooCoarse(_))
        ));
        assert!(ParamGrid::new(vec![GridAxis::Kx, GridAxis::Kx], vec![8, 8]).is_err());
        assert!(ParamGrid::new(vec![GridAxis::Kx, GridAxis::Ky, GridAxis::PhiX], vec![8; 3]).is_err());
    }

    #[test]
    fn report_json_keys() {
        let r = ChernReport::new(
            "chern2",
            "lower".into(),
            ParamGrid::hypercube(4).unwrap(),
            0.998,
        );
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["quantity", "band_or_gap", "grid", "raw", "value"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["value"], 1);
        assert_eq!(v["grid"]["axes"][0], "phi_x");
    }
}
