use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::fit_line;

/// One calibrated wavelength: `t(s) = A·exp(−γ·s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub wavelength_nm: f64,
    #[serde(rename = "A_per_cm")]
    pub a_per_cm: f64,
    pub gamma_per_um: f64,
}

/// Exponential coupling law tabulated over wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingLaw {
    rows: Vec<LawRow>,
}

impl CouplingLaw {
    /// Rows must have positive `A`, `γ` and strictly increasing wavelengths.
    pub fn new(rows: Vec<LawRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidSpec("coupling law has no rows".into()));
        }
        for r in &rows {
            if !(r.a_per_cm > 0.0 && r.gamma_per_um > 0.0) || !r.a_per_cm.is_finite() || !r.gamma_per_um.is_finite() {
                return Err(Error::InvalidSpec(format!("law row needs A > 0 and gamma > 0: {r:?}")));
            }
        }
        if rows.windows(2).any(|w| !(w[1].wavelength_nm > w[0].wavelength_nm)) {
            return Err(Error::InvalidSpec("law wavelengths must be strictly increasing".into()));
        }
        Ok(CouplingLaw { rows })
    }

    /// The same `(A, γ)` at every wavelength.
    pub fn constant(a_per_cm: f64, gamma_per_um: f64, wavelength_nm: f64) -> Result<Self> {
        CouplingLaw::new(vec![LawRow {
            wavelength_nm,
            a_per_cm,
            gamma_per_um,
        }])
    }

    pub fn rows(&self) -> &[LawRow] {
        &self.rows
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].wavelength_nm, self.rows[self.rows.len() - 1].wavelength_nm)
    }

    pub fn covers(&self, wavelength_nm: f64) -> bool {
        let (lo, hi) = self.range();
        wavelength_nm >= lo && wavelength_nm <= hi
    }

    /// `(A, γ)` at `wavelength_nm`. Between rows `ln A` and `γ` are linear in
    /// wavelength; outside the table this extrapolates from the end rows only
    /// when allowed.
    pub fn params_at(&self, wavelength_nm: f64, extrapolate: bool) -> Result<(f64, f64)> {
        let (lo, hi) = self.range();
        if !extrapolate && !self.covers(wavelength_nm) {
            return Err(Error::WavelengthOutOfRange {
                wavelength: wavelength_nm,
                min: lo,
                max: hi,
            });
        }
        if self.rows.len() == 1 {
            let r = self.rows[0];
            return Ok((r.a_per_cm, r.gamma_per_um));
        }
        if let Some(r) = self.rows.iter().find(|r| r.wavelength_nm == wavelength_nm) {
            return Ok((r.a_per_cm, r.gamma_per_um));
        }
        let k = self
            .rows
            .windows(2)
            .position(|w| wavelength_nm <= w[1].wavelength_nm)
            .unwrap_or(self.rows.len() - 2);
        let (r0, r1) = (self.rows[k], self.rows[k + 1]);
        let s = (wavelength_nm - r0.wavelength_nm) / (r1.wavelength_nm - r0.wavelength_nm);
        let ln_a = r0.a_per_cm.ln() + s * (r1.a_per_cm.ln() - r0.a_per_cm.ln());
        let gamma = r0.gamma_per_um + s * (r1.gamma_per_um - r0.gamma_per_um);
        if !(gamma > 0.0) {
            return Err(Error::WavelengthOutOfRange {
                wavelength: wavelength_nm,
                min: lo,
                max: hi,
            });
        }
        Ok((ln_a.exp(), gamma))
    }

    /// `t(s)` in cm⁻¹ for a separation in µm.
    pub fn coupling(&self, wavelength_nm: f64, separation_um: f64, extrapolate: bool) -> Result<f64> {
        let (a, gamma) = self.params_at(wavelength_nm, extrapolate)?;
        Ok(a * (-gamma * separation_um).exp())
    }
}

/// Separation (µm) realising coupling `t` (cm⁻¹): `s = ln(A/t)/γ`.
pub fn spacing_for_coupling(law: &CouplingLaw, wavelength_nm: f64, t: f64) -> Result<f64> {
    spacing_for_coupling_ext(law, wavelength_nm, t, false)
}

pub fn spacing_for_coupling_ext(law: &CouplingLaw, wavelength_nm: f64, t: f64, extrapolate: bool) -> Result<f64> {
    let (a, gamma) = law.params_at(wavelength_nm, extrapolate)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveCoupling(format!("target coupling {t} per cm")));
    }
    if t > a {
        return Err(Error::CouplingTooStrong { coupling: t, max: a });
    }
    Ok((a / t).ln() / gamma)
}

/// `(separation µm, coupling cm⁻¹)` samples at one wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSamples {
    pub wavelength_nm: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub wavelength_nm: f64,
    /// Of the fit `ln t = ln A − γs`.
    pub r_squared: f64,
    pub rms_log_residual: f64,
    pub min_separation: f64,
    pub max_separation: f64,
}

/// Least-squares fit of `ln t = ln A − γs` per wavelength.
pub fn fit_coupling_law(samples: &[CouplingSamples]) -> Result<(CouplingLaw, Vec<FitDiagnostics>)> {
    let mut sorted: Vec<&CouplingSamples> = samples.iter().collect();
    sorted.sort_by(|a, b| a.wavelength_nm.total_cmp(&b.wavelength_nm));
    let mut rows = Vec::with_capacity(sorted.len());
    let mut diagnostics = Vec::with_capacity(sorted.len());
    for set in sorted {
        let lambda = set.wavelength_nm;
        if set.points.len() < 3 {
            return Err(Error::InsufficientSamples(format!(
                "{} samples at {lambda} nm, need at least 3",
                set.points.len()
            )));
        }
        if let Some(&(s, t)) = set.points.iter().find(|(_, t)| !(*t > 0.0)) {
            return Err(Error::NonPositiveCoupling(format!("t = {t} at s = {s} um, {lambda} nm")));
        }
        let xs: Vec<f64> = set.points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = set.points.iter().map(|p| p.1.ln()).collect();
        let fit = fit_line(&xs, &ys).ok_or_else(|| {
            Error::InsufficientSamples(format!("separations at {lambda} nm are all identical"))
        })?;
        if !(fit.slope < 0.0) {
            return Err(Error::InvalidSpec(format!(
                "couplings at {lambda} nm do not decay with separation"
            )));
        }
        rows.push(LawRow {
            wavelength_nm: lambda,
            a_per_cm: fit.intercept.exp(),
            gamma_per_um: -fit.slope,
        });
        diagnostics.push(FitDiagnostics {
            wavelength_nm: lambda,
            r_squared: fit.r_squared,
            rms_log_residual: fit.rms_residual,
            min_separation: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max_separation: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok((CouplingLaw::new(rows)?, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: f64, g: f64, lambda: f64) -> CouplingSamples {
        CouplingSamples {
            wavelength_nm: lambda,
            points: [10.0, 13.0, 17.0, 24.0].iter().map(|&s| (s, a * (-g * s).exp())).collect(),
        }
    }

    #[test]
    fn recovers_exact_exponential() {
        let (law, diag) = fit_coupling_law(&[exact(50.0, 0.25, 1550.0)]).unwrap();
        let r = law.rows()[0];
        assert!((r.a_per_cm - 50.0).abs() < 1e-10);
        assert!((r.gamma_per_um - 0.25).abs() < 1e-10);
        assert!((diag[0].r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_samples_rejected() {
        let two = CouplingSamples {
            wavelength_nm: 1550.0,
            points: vec![(12.0, 1.0), (12.0, 1.0)],
        };
        assert!(matches!(fit_coupling_law(&[two]), Err(Error::InsufficientSamples(_))));
        let same = CouplingSamples {
            wavelength_nm: 1550.0,
            points: vec![(12.0, 1.0), (12.0, 1.0), (12.0, 1.0)],
        };
        assert!(matches!(fit_coupling_law(&[same]), Err(Error::InsufficientSamples(_))));
        let negative = CouplingSamples {
            wavelength_nm: 1550.0,
            points: vec![(10.0, 1.0), (12.0, 0.0), (14.0, 0.5)],
        };
        assert!(matches!(fit_coupling_law(&[negative]), Err(Error::NonPositiveCoupling(_))));
    }

    #[test]
    fn inverse_law() {
        let law = CouplingLaw::constant(67.0, 0.18, 1550.0).unwrap();
        assert_eq!(spacing_for_coupling(&law, 1550.0, 67.0).unwrap(), 0.0);
        assert!(matches!(
            spacing_for_coupling(&law, 1550.0, 70.0),
            Err(Error::CouplingTooStrong { .. })
        ));
        assert!(matches!(
            spacing_for_coupling(&law, 1550.0, 0.0),
            Err(Error::NonPositiveCoupling(_))
        ));
        let s = [3.0, 1.94, 0.88].map(|t| spacing_for_coupling(&law, 1550.0, t).unwrap());
        assert!(s[0] < s[1] && s[1] < s[2]);
    }

    #[test]
    fn interpolation_and_range() {
        let law = CouplingLaw::new(vec![
            LawRow {
                wavelength_nm: 1510.0,
                a_per_cm: 70.0,
                gamma_per_um: 0.19,
            },
            LawRow {
                wavelength_nm: 1590.0,
                a_per_cm: 60.0,
                gamma_per_um: 0.17,
            },
        ])
        .unwrap();
        let (a, g) = law.params_at(1550.0, false).unwrap();
        assert!((g - 0.18).abs() < 1e-12);
        assert!((a - (70.0f64 * 60.0).sqrt()).abs() < 1e-9);
        assert!(matches!(
            law.params_at(1600.0, false),
            Err(Error::WavelengthOutOfRange { .. })
        ));
        let (_, g_ext) = law.params_at(1610.0, true).unwrap();
        assert!((g_ext - 0.165).abs() < 1e-12);
    }

    #[test]
    fn rows_validated() {
        let row = |w, a, g| LawRow {
            wavelength_nm: w,
            a_per_cm: a,
            gamma_per_um: g,
        };
        assert!(CouplingLaw::new(vec![row(1550.0, 1.0, 0.1), row(1550.0, 1.0, 0.1)]).is_err());
        assert!(CouplingLaw::new(vec![row(1550.0, -1.0, 0.1)]).is_err());
        assert!(CouplingLaw::new(vec![]).is_err());
    }
}
