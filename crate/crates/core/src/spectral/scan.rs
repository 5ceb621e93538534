use std::f64::consts::TAU;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{classify_state, RegionOptions, StateClass};
use super::eig::eig_hermitian;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, PumpParams};
use crate::operator::HermitianOperator;

/// Bands along a path of pump parameters. `energies[s]` is ascending.
#[derive(Debug, Clone)]
pub struct BandScan {
    pub path: Vec<PumpParams>,
    pub energies: Vec<Vec<f64>>,
    pub vectors: Option<Vec<DMatrix<Complex64>>>,
    pub classes: Option<Vec<Vec<StateClass>>>,
    /// `max_k |E_k(s+1) − E_k(s)|` for each pair of neighbouring samples.
    pub continuity: Vec<f64>,
}

impl BandScan {
    pub fn num_samples(&self) -> usize {
        self.path.len()
    }

    pub fn num_states(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    pub fn max_jump(&self) -> f64 {
        self.continuity.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    pub keep_vectors: bool,
    /// Classify every state against this lattice.
    pub classify: Option<(LatticeSpec, RegionOptions)>,
}

/// Diagonalises `builder` at every path sample in parallel; the result does
/// not depend on scheduling.
pub fn scan_bands<F>(builder: F, path: &[PumpParams], options: &ScanOptions) -> Result<BandScan>
where
    F: Fn(PumpParams) -> Result<HermitianOperator> + Sync,
{
    if path.is_empty() {
        return Err(Error::InvalidSpec("band scan needs a non-empty path".into()));
    }
    let samples: Vec<(Vec<f64>, Option<DMatrix<Complex64>>, Option<Vec<StateClass>>)> = path
        .par_iter()
        .map(|&pump| {
            let h = builder(pump)?;
            let eig = eig_hermitian(&h)?;
            let classes = match &options.classify {
                Some((spec, region)) => Some(
                    (0..eig.dimension())
                        .map(|k| {
                            let col: Vec<Complex64> = eig.vectors.column(k).iter().copied().collect();
                            classify_state(&col, spec, *region)
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            let vectors = options.keep_vectors.then_some(eig.vectors);
            Ok((eig.values, vectors, classes))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = samples[0].0.len();
    if samples.iter().any(|s| s.0.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: samples.iter().map(|s| s.0.len()).find(|&m| m != n).unwrap_or(n),
        });
    }
    let mut energies = Vec::with_capacity(samples.len());
    let mut vectors = options.keep_vectors.then(Vec::new);
    let mut classes = options.classify.as_ref().map(|_| Vec::new());
    for (e, v, c) in samples {
        energies.push(e);
        if let (Some(all), Some(v)) = (vectors.as_mut(), v) {
            all.push(v);
        }
        if let (Some(all), Some(c)) = (classes.as_mut(), c) {
            all.push(c);
        }
    }
    let continuity = energies
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    Ok(BandScan {
        path: path.to_vec(),
        energies,
        vectors,
        classes,
        continuity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathPreset {
    /// `φx = φy` over `[0, 2π)`.
    Diag,
    /// `φx` over `[0, 2π)` at fixed `φy`.
    XOnly,
    /// `φy` over `[0, 2π)` at fixed `φx`.
    YOnly,
}

impl FromStr for PathPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diag" => Ok(PathPreset::Diag),
            "x-only" | "x" => Ok(PathPreset::XOnly),
            "y-only" | "y" => Ok(PathPreset::YOnly),
            other => Err(Error::Parse(format!(
                "unknown path preset {other:?} (expected diag, x-only, y-only)"
            ))),
        }
    }
}

/// `samples` equally spaced phases over `[0, 2π)`; the frozen axis sits at
/// `fixed`.
pub fn phase_path(preset: PathPreset, samples: usize, fixed: f64) -> Vec<PumpParams> {
    (0..samples)
        .map(|j| {
            let phi = TAU * j as f64 / samples as f64;
            match preset {
                PathPreset::Diag => PumpParams::new(phi, phi),
                PathPreset::XOnly => PumpParams::new(phi, fixed),
                PathPreset::YOnly => PumpParams::new(fixed, phi),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub low: f64,
    pub high: f64,
    /// Open at every sample of the scan.
    pub global: bool,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn contains(&self, e: f64) -> bool {
        e > self.low && e < self.high
    }
}

/// Bulk gaps wider than `resolution`.
///
/// Windows open at every sample come back with `global = true`. Energy ranges
/// that are gapped at some samples only, and contain no global window, are
/// returned with `global = false`. Only bulk-classified states count when the
/// scan carries classes.
pub fn find_gaps(scan: &BandScan, resolution: f64) -> Vec<Gap> {
    let per_sample: Vec<Vec<(f64, f64)>> = (0..scan.num_samples())
        .map(|s| {
            let bulk: Vec<f64> = match &scan.classes {
                Some(classes) => scan.energies[s]
                    .iter()
                    .zip(&classes[s])
                    .filter(|(_, c)| c.is_bulk())
                    .map(|(e, _)| *e)
                    .collect(),
                None => scan.energies[s].clone(),
            };
            bulk.windows(2)
                .filter(|w| w[1] - w[0] > resolution)
                .map(|w| (w[0], w[1]))
                .collect()
        })
        .collect();
    if per_sample.is_empty() {
        return Vec::new();
    }

    let mut global = per_sample[0].clone();
    for gaps in &per_sample[1..] {
        global = intersect(&global, gaps)
            .into_iter()
            .filter(|(a, b)| b - a > resolution)
            .collect();
    }

    let mut all: Vec<(f64, f64)> = per_sample.iter().flatten().copied().collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut union: Vec<(f64, f64)> = Vec::new();
    for (a, b) in all {
        match union.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => union.push((a, b)),
        }
    }

    let mut out: Vec<Gap> = global
        .iter()
        .map(|&(low, high)| Gap {
            low,
            high,
            global: true,
        })
        .collect();
    for (low, high) in union {
        if !global.iter().any(|&(a, b)| a >= low && b <= high) {
            out.push(Gap {
                low,
                high,
                global: false,
            });
        }
    }
    out.sort_by(|a, b| a.low.total_cmp(&b.low));
    out
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// Eigenstate followed continuously along a parameter path.
#[derive(Debug, Clone)]
pub struct TrackedState {
    /// Eigen-index selected at each sample.
    pub indices: Vec<usize>,
    pub energies: Vec<f64>,
    pub final_vector: DVector<Complex64>,
    /// Smallest overlap `|⟨v_s|v_{s+1}⟩|` met along the path.
    pub min_overlap: f64,
}

/// Adiabatic continuation: at each sample pick the eigenvector with the
/// largest overlap with the previous one. The path must be fine enough that
/// neighbouring samples are close.
pub fn track_state<F>(builder: F, path: &[PumpParams], start_index: usize) -> Result<TrackedState>
where
    F: Fn(PumpParams) -> Result<HermitianOperator>,
{
    let first = path
        .first()
        .ok_or_else(|| Error::InvalidSpec("tracking needs a non-empty path".into()))?;
    let eig = eig_hermitian(&builder(*first)?)?;
    if start_index >= eig.dimension() {
        return Err(Error::OutOfRange(format!(
            "state index {start_index} >= dimension {}",
            eig.dimension()
        )));
    }
    let mut current: DVector<Complex64> = eig.vectors.column(start_index).into_owned();
    let mut indices = vec![start_index];
    let mut energies = vec![eig.values[start_index]];
    let mut min_overlap: f64 = 1.0;
    for &pump in &path[1..] {
        let eig = eig_hermitian(&builder(pump)?)?;
        let overlaps = eig.vectors.adjoint() * &current;
        let (best, ov) = overlaps
            .iter()
            .enumerate()
            .map(|(k, z)| (k, z.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        min_overlap = min_overlap.min(ov);
        let mut next: DVector<Complex64> = eig.vectors.column(best).into_owned();
        // fix the gauge to the previous vector so the final phase is continuous
        let phase = overlaps[best];
        if phase.norm() > 0.0 {
            next *= phase.conj() / phase.norm();
        }
        current = next;
        indices.push(best);
        energies.push(eig.values[best]);
    }
    Ok(TrackedState {
        indices,
        energies,
        final_vector: current,
        min_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Frequency};
    use crate::model::{build_1d_harper, build_2d_direct_sum};

    fn third() -> Frequency {
        Frequency::rational(1, 3).unwrap()
    }

    #[test]
    fn frozen_builder_gives_identical_samples() {
        let h = build_1d_harper(9, 1.94, 1.06, third(), 0.3, Boundary::Open).unwrap();
        let path = phase_path(PathPreset::Diag, 7, 0.0);
        let scan = scan_bands(|_| Ok(h.clone()), &path, &ScanOptions::default()).unwrap();
        for e in &scan.energies {
            assert_eq!(e, &scan.energies[0]);
        }
        assert_eq!(scan.max_jump(), 0.0);
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        let spec = LatticeSpec {
            size_x: 5,
            size_y: 4,
            ..LatticeSpec::default()
        };
        let path = phase_path(PathPreset::Diag, 16, 0.0);
        let opts = ScanOptions {
            keep_vectors: false,
            classify: Some((spec.clone(), RegionOptions::default())),
        };
        let scan = scan_bands(|p| build_2d_direct_sum(&spec, p), &path, &opts).unwrap();
        for (s, &p) in path.iter().enumerate() {
            let e = crate::spectral::eigvals_hermitian(&build_2d_direct_sum(&spec, p).unwrap()).unwrap();
            assert_eq!(e, scan.energies[s]);
        }
        assert_eq!(scan.classes.as_ref().unwrap().len(), 16);
    }

    #[test]
    fn empty_path_rejected() {
        let spec = LatticeSpec::default();
        assert!(scan_bands(|p| build_2d_direct_sum(&spec, p), &[], &ScanOptions::default()).is_err());
    }

    #[test]
    fn presets() {
        let p = phase_path(PathPreset::XOnly, 4, 1.0);
        assert_eq!(p.len(), 4);
        assert!((p[1].phi_x() - TAU / 4.0).abs() < 1e-15);
        assert!(p.iter().all(|q| (q.phi_y() - 1.0).abs() < 1e-15));
        assert_eq!(phase_path(PathPreset::Diag, 1, 0.0).len(), 1);
        assert!("sideways".parse::<PathPreset>().is_err());
    }

    #[test]
    fn intervals() {
        let a = [(0.0, 2.0), (3.0, 5.0)];
        let b = [(1.0, 4.0)];
        assert_eq!(intersect(&a, &b), vec![(1.0, 2.0), (3.0, 4.0)]);
    }

    #[test]
    fn unmodulated_chain_has_no_gaps() {
        let spec = LatticeSpec::chain(61, 1.94, 0.0, third(), Boundary::Open);
        let path = [PumpParams::new(0.3, 0.0)];
        let opts = ScanOptions {
            keep_vectors: false,
            classify: Some((spec.clone(), RegionOptions::default())),
        };
        let scan = scan_bands(|p| build_2d_direct_sum(&spec, p), &path, &opts).unwrap();
        assert!(find_gaps(&scan, 0.5).is_empty());
    }

    #[test]
    fn modulated_chain_has_two_gaps() {
        let spec = LatticeSpec::chain(61, 1.94, 1.06, third(), Boundary::Open);
        let opts = ScanOptions {
            keep_vectors: false,
            classify: Some((spec.clone(), RegionOptions::default())),
        };
        for phi in [0.0, 0.477 * std::f64::consts::PI, 2.0, 4.4] {
            let scan = scan_bands(|p| build_2d_direct_sum(&spec, p), &[PumpParams::new(phi, 0.0)], &opts).unwrap();
            let gaps = find_gaps(&scan, 0.5);
            assert_eq!(gaps.len(), 2, "phi = {phi}: {gaps:?}");
            assert!(gaps.iter().all(|g| g.global));
        }
    }
}
