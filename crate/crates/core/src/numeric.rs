//! Small numeric helpers.

use crate::error::{Error, Result};

/// Neumaier-compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LineFit {
        intercept,
        slope,
        r_squared,
        rms_residual: (ss_res / nf).sqrt(),
    })
}

/// Parses `start:stop:step`, inclusive of both ends. The step must divide the
/// span; a bare number is a one-element range.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("range {text:?}: {s:?}: {e}")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::Parse(format!(
                    "range {text:?}: need step > 0 and stop >= start"
                )));
            }
            let count = (stop - start) / step;
            let rounded = count.round();
            if (count - rounded).abs() > 1e-9 * count.max(1.0) {
                return Err(Error::Parse(format!(
                    "range {text:?}: step {step} does not divide span {}",
                    stop - start
                )));
            }
            let n = rounded as usize;
            Ok((0..=n).map(|i| start + step * i as f64).collect())
        }
        _ => Err(Error::Parse(format!(
            "range {text:?}: expected start:stop:step"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        let naive: f64 = values.iter().sum();
        let acc: CompensatedSum = values.into_iter().collect();
        assert_eq!(acc.total(), 2.0);
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_line() {
        assert!(fit_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("10:24:2").unwrap().len(), 8);
        let w = parse_range("1510:1590:5").unwrap();
        assert_eq!(w.len(), 17);
        assert_eq!(*w.last().unwrap(), 1590.0);
        assert_eq!(parse_range("1550").unwrap(), vec![1550.0]);
        assert!(parse_range("10:25:2").is_err());
        assert!(parse_range("10:24").is_err());
        assert!(parse_range("10:24:0").is_err());
    }
}
