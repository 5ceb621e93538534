use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Accepted deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-12;

/// Normalised amplitudes over the lattice sites (flat index `y·size_x + x`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: DVector<Complex64>,
    size_x: usize,
    size_y: usize,
}

impl FieldState {
    pub fn new(amplitudes: DVector<Complex64>, size_x: usize, size_y: usize) -> Result<Self> {
        if amplitudes.len() != size_x * size_y {
            return Err(Error::DimensionMismatch {
                expected: size_x * size_y,
                actual: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(format!("state norm {norm:.15}")));
        }
        Ok(FieldState {
            amplitudes,
            size_x,
            size_y,
        })
    }

    /// Skips the norm check; used inside the integrator.
    pub(crate) fn from_raw(amplitudes: DVector<Complex64>, size_x: usize, size_y: usize) -> Self {
        FieldState {
            amplitudes,
            size_x,
            size_y,
        }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn amplitude(&self, x: usize, y: usize) -> Complex64 {
        self.amplitudes[y * self.size_x + x]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|v⟩|²`.
    pub fn overlap(&self, v: &DVector<Complex64>) -> f64 {
        self.amplitudes.dotc(v).norm_sqr()
    }
}

/// Where light enters the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectionSite {
    /// `(0, ⌊size_y/2⌋)`
    LeftCenter,
    /// `(⌊size_x/2⌋, 0)`
    BottomCenter,
    /// `(0, 0)`
    BottomLeft,
    Explicit(i64, i64),
}

impl InjectionSite {
    pub fn resolve(&self, spec: &LatticeSpec) -> Result<(usize, usize)> {
        let (nx, ny) = (spec.size_x, spec.size_y);
        let (x, y) = match *self {
            InjectionSite::LeftCenter => (0, (ny / 2) as i64),
            InjectionSite::BottomCenter => ((nx / 2) as i64, 0),
            InjectionSite::BottomLeft => (0, 0),
            InjectionSite::Explicit(x, y) => (x, y),
        };
        if x < 0 || y < 0 || x as usize >= nx || y as usize >= ny {
            return Err(Error::OutOfRange(format!(
                "site ({x}, {y}) outside the {nx}x{ny} lattice"
            )));
        }
        Ok((x as usize, y as usize))
    }
}

impl fmt::Display for InjectionSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectionSite::LeftCenter => f.write_str("left-center"),
            InjectionSite::BottomCenter => f.write_str("bottom-center"),
            InjectionSite::BottomLeft => f.write_str("bottom-left"),
            InjectionSite::Explicit(x, y) => write!(f, "({x},{y})"),
        }
    }
}

impl FromStr for InjectionSite {
    type Err = Error;

    /// Named sites or `(x,y)` / `x,y`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left-center" => return Ok(InjectionSite::LeftCenter),
            "bottom-center" => return Ok(InjectionSite::BottomCenter),
            "bottom-left" => return Ok(InjectionSite::BottomLeft),
            _ => {}
        }
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [x, y] => {
                let p = |v: &str| {
                    v.parse::<i64>()
                        .map_err(|e| Error::Parse(format!("injection site {s:?}: {e}")))
                };
                Ok(InjectionSite::Explicit(p(x)?, p(y)?))
            }
            _ => Err(Error::Parse(format!(
                "injection site {s:?}: expected left-center, bottom-center, bottom-left or (x,y)"
            ))),
        }
    }
}

/// Unit amplitude on one site.
pub fn inject(spec: &LatticeSpec, site: InjectionSite) -> Result<FieldState> {
    let (x, y) = site.resolve(spec)?;
    let mut v = DVector::zeros(spec.num_sites());
    v[spec.site_index(x, y)] = Complex64::new(1.0, 0.0);
    Ok(FieldState::from_raw(v, spec.size_x, spec.size_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sites() {
        let spec = LatticeSpec::default();
        let s = inject(&spec, InjectionSite::LeftCenter).unwrap();
        assert_eq!(s.amplitude(0, 3), Complex64::new(1.0, 0.0));
        assert_eq!(InjectionSite::BottomLeft.resolve(&spec).unwrap(), (0, 0));
        assert_eq!(InjectionSite::BottomCenter.resolve(&spec).unwrap(), (6, 0));
    }

    #[test]
    fn out_of_range() {
        let spec = LatticeSpec::default();
        for site in [(13, 0), (99, 0), (0, 7), (-1, 2)] {
            assert!(matches!(
                inject(&spec, InjectionSite::Explicit(site.0, site.1)),
                Err(Error::OutOfRange(_))
            ));
        }
    }

    #[test]
    fn parsing() {
        assert_eq!("(99,0)".parse::<InjectionSite>().unwrap(), InjectionSite::Explicit(99, 0));
        assert_eq!(" 3, 4 ".parse::<InjectionSite>().unwrap(), InjectionSite::Explicit(3, 4));
        assert_eq!("left-center".parse::<InjectionSite>().unwrap(), InjectionSite::LeftCenter);
        assert!("middle".parse::<InjectionSite>().is_err());
        for s in [InjectionSite::BottomLeft, InjectionSite::Explicit(2, 5)] {
            assert_eq!(s.to_string().parse::<InjectionSite>().unwrap(), s);
        }
    }

    #[test]
    fn normalisation_checked() {
        let v = DVector::from_element(2, Complex64::new(1.0, 0.0));
        assert!(matches!(FieldState::new(v, 2, 1), Err(Error::NotNormalized(_))));
    }
}
