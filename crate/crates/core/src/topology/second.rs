//! Second Chern numbers of the direct-sum model's gaps.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::first::{chain_bloch, GAP_TOL};
use super::grid::{ChernReport, GridAxis, ParamGrid};
use crate::error::{Error, Result};
use crate::lattice::{Axis, LatticeSpec, PumpParams};
use crate::model::build_bloch;
use crate::numeric::CompensatedSum;
use crate::operator::HermitianOperator;
use crate::spectral::eig_hermitian;

/// Largest accepted `|raw − round(raw)|` for the 4D integral.
pub const INTEGRALITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapChoice {
    Lower,
    Upper,
}

impl fmt::Display for GapChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapChoice::Lower => "lower",
            GapChoice::Upper => "upper",
        })
    }
}

impl FromStr for GapChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(GapChoice::Lower),
            "upper" => Ok(GapChoice::Upper),
            other => Err(Error::Parse(format!("unknown gap {other:?} (expected lower or upper)"))),
        }
    }
}

/// `Σ ν_x[m]·ν_y[n]` over the listed pairs.
pub fn chern_2_product(nu_x: &[i64], nu_y: &[i64], pairs: &[(usize, usize)]) -> i64 {
    pairs.iter().map(|&(m, n)| nu_x[m] * nu_y[n]).sum()
}

/// `(min, max)` of every magnetic band of one axis over an `n × n` grid of
/// `(φ, k)`.
pub fn axis_band_ranges(spec: &LatticeSpec, axis: Axis, n: usize) -> Result<Vec<(f64, f64)>> {
    let bloch = chain_bloch(spec, axis);
    let mut ranges: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let h = bloch(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64)?;
            let e = crate::spectral::eigvals_hermitian(&h)?;
            if ranges.is_empty() {
                ranges = e.iter().map(|&v| (v, v)).collect();
            }
            for (r, v) in ranges.iter_mut().zip(e) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
    }
    Ok(ranges)
}

/// Composite bands `(m, n)` lying entirely below `gap_energy`. A band that
/// straddles it means the energy is not in a gap.
pub fn pairs_below_gap(rx: &[(f64, f64)], ry: &[(f64, f64)], gap_energy: f64) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (m, a) in rx.iter().enumerate() {
        for (n, b) in ry.iter().enumerate() {
            let (lo, hi) = (a.0 + b.0, a.1 + b.1);
            if hi < gap_energy {
                pairs.push((m, n));
            } else if lo <= gap_energy {
                return Err(Error::GapClosure(format!(
                    "composite band ({m}, {n}) spans [{lo:.4}, {hi:.4}] across {gap_energy:.4}"
                )));
            }
        }
    }
    Ok(pairs)
}

/// A spectral gap of the direct-sum Bloch model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeGap {
    pub low: f64,
    pub high: f64,
    pub pairs_below: Vec<(usize, usize)>,
}

impl CompositeGap {
    pub fn centre(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

/// Gaps of the full 4D band structure, from the Minkowski sum of the two
/// axes' band ranges sampled on `n × n` grids.
pub fn direct_sum_gaps(spec: &LatticeSpec, n: usize) -> Result<Vec<CompositeGap>> {
    let rx = axis_band_ranges(spec, Axis::X, n)?;
    let ry = axis_band_ranges(spec, Axis::Y, n)?;
    let mut bands: Vec<(f64, f64)> = rx
        .iter()
        .flat_map(|a| ry.iter().map(move |b| (a.0 + b.0, a.1 + b.1)))
        .collect();
    bands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut top = bands[0].1;
    for b in &bands[1..] {
        if b.0 > top + GAP_TOL {
            let centre = 0.5 * (top + b.0);
            gaps.push(CompositeGap {
                low: top,
                high: b.0,
                pairs_below: pairs_below_gap(&rx, &ry, centre)?,
            });
        }
        top = top.max(b.1);
    }
    Ok(gaps)
}

/// The lowest or highest gap of the direct-sum model.
pub fn select_gap(spec: &LatticeSpec, choice: GapChoice, n: usize) -> Result<CompositeGap> {
    let gaps = direct_sum_gaps(spec, n)?;
    let gap = match choice {
        GapChoice::Lower => gaps.first(),
        GapChoice::Upper => gaps.last(),
    };
    gap.cloned()
        .ok_or_else(|| Error::GapClosure(format!("the {choice} gap is closed: no spectral gap found")))
}

/// `x ↦ H` with `x` ordered like the grid's axes, on the magnetic unit cell.
pub fn direct_sum_bloch4<'a>(
    spec: &'a LatticeSpec,
    grid: &ParamGrid,
) -> Result<impl Fn(&[f64]) -> Result<HermitianOperator> + Sync + 'a> {
    if grid.dimension() != 4 {
        return Err(Error::InvalidSpec("second Chern numbers need a 4D grid".into()));
    }
    let axes: Vec<GridAxis> = grid.axes().to_vec();
    Ok(move |x: &[f64]| {
        let (mut kx, mut ky, mut px, mut py) = (0.0, 0.0, 0.0, 0.0);
        for (a, &v) in axes.iter().zip(x) {
            match a {
                GridAxis::Kx => kx = v,
                GridAxis::Ky => ky = v,
                GridAxis::PhiX => px = v,
                GridAxis::PhiY => py = v,
            }
        }
        build_bloch(spec, (kx, ky), PumpParams::new(px, py))
    })
}

fn below_gap_projector<F>(bloch4: &F, x: &[f64], gap_energy: f64, occupied: Option<usize>) -> Result<(DMatrix<Complex64>, usize)>
where
    F: Fn(&[f64]) -> Result<HermitianOperator>,
{
    let eig = eig_hermitian(&bloch4(x)?)?;
    let nearest = eig.values.iter().map(|e| (e - gap_energy).abs()).fold(f64::INFINITY, f64::min);
    let count = eig.values.iter().filter(|&&e| e < gap_energy).count();
    if nearest < GAP_TOL || occupied.is_some_and(|n| n != count) || count == 0 {
        return Err(Error::GapClosure(format!(
            "no gap at {gap_energy:.4} near {x:?} ({count} states below, nearest level {nearest:.2e} away)"
        )));
    }
    Ok((eig.projector(0..count), count))
}

/// `ε_{µνρσ} tr(P ∂µP ∂νP P ∂ρP ∂σP)` at one point.
fn chern_density<F>(bloch4: &F, x: &[f64], gap_energy: f64, occupied: usize, delta: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<HermitianOperator>,
{
    let (p, _) = below_gap_projector(bloch4, x, gap_energy, Some(occupied))?;
    let mut dp = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[mu] += delta;
        minus[mu] -= delta;
        let (pp, _) = below_gap_projector(bloch4, &plus, gap_energy, Some(occupied))?;
        let (pm, _) = below_gap_projector(bloch4, &minus, gap_energy, Some(occupied))?;
        dp.push((pp - pm) / Complex64::new(2.0 * delta, 0.0));
    }
    // tr(P A B P C D) = tr(G_AB G_CD) with G = P·A·B·P; antisymmetrising each
    // pair leaves three independent pairings.
    let g = |a: usize, b: usize| &p * &dp[a] * &dp[b] * &p;
    let f = |a: usize, b: usize| g(a, b) - g(b, a);
    let tr = |a: DMatrix<Complex64>, b: DMatrix<Complex64>| (a * b).trace();
    let sum = tr(f(0, 1), f(2, 3)) - tr(f(0, 2), f(1, 3)) + tr(f(0, 3), f(1, 2));
    Ok(2.0 * sum.re)
}

/// `−(1/8π²)∫ε tr(P∂P∂P P∂P∂P)` for the projector below `gap_energy`,
/// oriented by the grid's axis order.
pub fn chern_2_direct<F>(bloch4: &F, gap_energy: f64, grid: &ParamGrid, delta: f64) -> Result<ChernReport>
where
    F: Fn(&[f64]) -> Result<HermitianOperator> + Sync,
{
    let raw = chern_2_direct_raw(bloch4, gap_energy, grid, delta)?;
    let report = ChernReport::new("chern2", format!("E<{gap_energy:.6}"), grid.clone(), raw);
    if report.deviation() >= INTEGRALITY_TOL {
        return Err(Error::GridTooCoarse(format!(
            "raw second Chern number {raw:.4} is {:.3} from an integer on {:?}",
            report.deviation(),
            grid.counts()
        )));
    }
    Ok(report)
}

/// Unrounded 4D integral; no integrality check.
pub fn chern_2_direct_raw<F>(bloch4: &F, gap_energy: f64, grid: &ParamGrid, delta: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<HermitianOperator> + Sync,
{
    if grid.dimension() != 4 {
        return Err(Error::InvalidSpec("second Chern numbers need a 4D grid".into()));
    }
    let origin = grid.coordinates(&grid.multi_index(0));
    let (_, occupied) = below_gap_projector(bloch4, &origin, gap_energy, None)?;
    let densities = (0..grid.num_points())
        .into_par_iter()
        .map(|p| chern_density(bloch4, &grid.coordinates(&grid.multi_index(p)), gap_energy, occupied, delta))
        .collect::<Result<Vec<f64>>>()?;
    let sum: CompensatedSum = densities.into_iter().collect();
    Ok(-sum.total() * grid.cell_volume() / (8.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Frequency;
    use crate::topology::first::DEFAULT_DELTA;

    #[test]
    fn product_formula_examples() {
        let nu = [1, -2, 1];
        assert_eq!(chern_2_product(&nu, &nu, &[(0, 0)]), 1);
        let all_but_last: Vec<(usize, usize)> = (0..3)
            .flat_map(|m| (0..3).map(move |n| (m, n)))
            .filter(|&p| p != (2, 2))
            .collect();
        assert_eq!(chern_2_product(&nu, &nu, &all_but_last), -1);
        let all: Vec<(usize, usize)> = (0..3).flat_map(|m| (0..3).map(move |n| (m, n))).collect();
        assert_eq!(chern_2_product(&nu, &nu, &all), 0);
        let neg = [-1, 2, -1];
        assert_eq!(chern_2_product(&neg, &neg, &[(0, 0)]), 1);
        assert_eq!(chern_2_product(&neg, &neg, &all_but_last), -1);
    }

    #[test]
    fn paper_gaps_and_pairs() {
        let spec = LatticeSpec::default();
        let lower = select_gap(&spec, GapChoice::Lower, 24).unwrap();
        let upper = select_gap(&spec, GapChoice::Upper, 24).unwrap();
        assert_eq!(lower.pairs_below, vec![(0, 0)]);
        assert_eq!(upper.pairs_below.len(), 8);
        assert!(!upper.pairs_below.contains(&(2, 2)));
        assert!((lower.centre() + upper.centre()).abs() < 1e-9);
    }

    #[test]
    fn straddling_energy_rejected() {
        let r = [(-1.0, 1.0)];
        assert!(matches!(pairs_below_gap(&r, &r, 0.0), Err(Error::GapClosure(_))));
    }

    #[test]
    fn trivial_factor_gives_zero() {
        let spec = LatticeSpec {
            b_y: Frequency::rational(1, 1).unwrap(),
            tbar_y: 0.1,
            lam_y: 0.05,
            ..LatticeSpec::default()
        };
        let gap = select_gap(&spec, GapChoice::Lower, 24).unwrap();
        let grid = ParamGrid::hypercube(6).unwrap();
        let bloch4 = direct_sum_bloch4(&spec, &grid).unwrap();
        let r = chern_2_direct(&bloch4, gap.centre(), &grid, DEFAULT_DELTA).unwrap();
        assert_eq!(r.value, 0);
        assert!(r.raw.abs() < 1e-9);
    }

    #[test]
    fn energy_inside_band_is_gap_closure() {
        let spec = LatticeSpec::default();
        let grid = ParamGrid::hypercube(4).unwrap();
        let bloch4 = direct_sum_bloch4(&spec, &grid).unwrap();
        let band_middle = {
            let r = axis_band_ranges(&spec, Axis::X, 12).unwrap();
            r[0].0 + r[1].0 + 0.1
        };
        assert!(matches!(
            chern_2_direct(&bloch4, band_middle, &grid, DEFAULT_DELTA),
            Err(Error::GapClosure(_))
        ));
    }
}
