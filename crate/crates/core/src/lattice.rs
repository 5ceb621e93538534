//! Lattice description shared by every builder: sizes, modulation
//! frequencies, couplings and boundary conditions.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Modulation frequency `b`.
///
/// Serialised as the string `"p/q"` when rational. A bare JSON number is
/// accepted as an irrational (quasi-periodic) frequency; such lattices can be
/// built in real space but have no magnetic unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Rational { p: i64, q: u64 },
    Real(f64),
}

impl Frequency {
    /// Reduced fraction `p/q`.
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in {p}/{q}")));
        }
        let g = gcd(p.unsigned_abs(), q).max(1);
        Ok(Frequency::Rational {
            p: p / g as i64,
            q: q / g,
        })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Frequency::Rational { p, q } => p as f64 / q as f64,
            Frequency::Real(b) => b,
        }
    }

    /// `2π·b·index`, reduced modulo 2π exactly for rational `b` so that the
    /// modulation is bitwise periodic with period `q`.
    pub fn phase(&self, index: i64) -> f64 {
        match *self {
            Frequency::Rational { p, q } => {
                let q = q as i64;
                let r = (p * index).rem_euclid(q);
                TAU * r as f64 / q as f64
            }
            Frequency::Real(b) => TAU * b * index as f64,
        }
    }

    /// `(p, q)` or `IrrationalFrequency`.
    pub fn as_fraction(&self) -> Result<(i64, u64)> {
        match *self {
            Frequency::Rational { p, q } => Ok((p, q)),
            Frequency::Real(b) => Err(Error::IrrationalFrequency(format!(
                "b = {b} has no magnetic unit cell"
            ))),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Rational { p, q } => write!(f, "{p}/{q}"),
            Frequency::Real(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p
                    .trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("frequency numerator {p:?}: {e}")))?;
                let q = q
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("frequency denominator {q:?}: {e}")))?;
                Frequency::rational(p, q)
            }
            None => match s.parse::<i64>() {
                Ok(p) => Frequency::rational(p, 1),
                Err(_) => s
                    .parse::<f64>()
                    .map(Frequency::Real)
                    .map_err(|e| Error::Parse(format!("frequency {s:?}: {e}"))),
            },
        }
    }
}

impl Serialize for Frequency {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Frequency::Rational { .. } => serializer.serialize_str(&self.to_string()),
            Frequency::Real(b) => serializer.serialize_f64(b),
        }
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(b) => Ok(Frequency::Real(b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Parameters of the two-axis modulated-hopping lattice. Couplings in cm⁻¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSpec {
    /// Columns.
    pub size_x: usize,
    /// Rows.
    pub size_y: usize,
    pub b_x: Frequency,
    pub b_y: Frequency,
    pub tbar_x: f64,
    pub tbar_y: f64,
    pub lam_x: f64,
    pub lam_y: f64,
    pub boundary: Boundary,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        let third = Frequency::Rational { p: 1, q: 3 };
        LatticeSpec {
            size_x: 13,
            size_y: 7,
            b_x: third,
            b_y: third,
            tbar_x: 1.94,
            tbar_y: 1.94,
            lam_x: 1.06,
            lam_y: 1.06,
            boundary: Boundary::Open,
        }
    }
}

impl LatticeSpec {
    /// A single chain along x (`size_y = 1`).
    pub fn chain(size: usize, tbar: f64, lam: f64, b: Frequency, boundary: Boundary) -> Self {
        LatticeSpec {
            size_x: size,
            size_y: 1,
            b_x: b,
            tbar_x: tbar,
            lam_x: lam,
            boundary,
            ..LatticeSpec::default()
        }
    }

    pub fn num_sites(&self) -> usize {
        self.size_x * self.size_y
    }

    pub fn size(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.size_x,
            Axis::Y => self.size_y,
        }
    }

    pub fn frequency(&self, axis: Axis) -> Frequency {
        match axis {
            Axis::X => self.b_x,
            Axis::Y => self.b_y,
        }
    }

    pub fn bare(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.tbar_x,
            Axis::Y => self.tbar_y,
        }
    }

    pub fn modulation(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.lam_x,
            Axis::Y => self.lam_y,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size_x == 0 || self.size_y == 0 {
            return Err(Error::SizeTooSmall(format!(
                "lattice {}x{} has no sites",
                self.size_x, self.size_y
            )));
        }
        for v in [self.tbar_x, self.tbar_y, self.lam_x, self.lam_y] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("non-finite coupling {v}")));
            }
        }
        Ok(())
    }

    /// Every coupling must be positive for a waveguide realisation to exist.
    pub fn validate_geometric(&self) -> Result<()> {
        self.validate()?;
        if self.boundary == Boundary::Periodic {
            return Err(Error::InvalidSpec(
                "periodic lattices have no planar waveguide realisation".into(),
            ));
        }
        for axis in [Axis::X, Axis::Y] {
            let (t, l) = (self.bare(axis), self.modulation(axis));
            if t - l.abs() <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "axis {axis:?}: tbar - |lam| = {} must be positive",
                    t - l.abs()
                )));
            }
        }
        Ok(())
    }

    /// Flat index of site `(x, y)`; x runs fastest.
    pub fn site_index(&self, x: usize, y: usize) -> usize {
        y * self.size_x + x
    }

    pub fn site_coords(&self, index: usize) -> (usize, usize) {
        (index % self.size_x, index / self.size_x)
    }
}

/// Pump phases, stored reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpParams {
    phi_x: f64,
    phi_y: f64,
}

impl PumpParams {
    pub fn new(phi_x: f64, phi_y: f64) -> Self {
        PumpParams {
            phi_x: reduce_phase(phi_x),
            phi_y: reduce_phase(phi_y),
        }
    }

    pub fn phi_x(&self) -> f64 {
        self.phi_x
    }

    pub fn phi_y(&self) -> f64 {
        self.phi_y
    }

    pub fn phi(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.phi_x,
            Axis::Y => self.phi_y,
        }
    }
}

pub fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}
