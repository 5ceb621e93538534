//! First Chern numbers of band sets over a 2-torus.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{ChernReport, GridAxis, ParamGrid};
use crate::error::{Error, Result};
use crate::lattice::{Axis, LatticeSpec};
use crate::model::build_bloch_chain;
use crate::numeric::CompensatedSum;
use crate::operator::HermitianOperator;
use crate::spectral::{eig_hermitian, Eigen};

/// Smallest separation (cm⁻¹) between a band set and its complement.
pub const GAP_TOL: f64 = 1e-6;
/// Default finite-difference step for projector derivatives.
pub const DEFAULT_DELTA: f64 = 1e-4;

/// `(φ, k) ↦ H` for one axis of a lattice: its magnetic-unit-cell chain.
pub fn chain_bloch(spec: &LatticeSpec, axis: Axis) -> impl Fn(f64, f64) -> Result<HermitianOperator> + Sync + '_ {
    move |phi, k| build_bloch_chain(spec, axis, phi, k)
}

fn check_band_set(band_set: &[usize], dim: usize) -> Result<()> {
    if band_set.is_empty() {
        return Err(Error::InvalidSpec("empty band set".into()));
    }
    if let Some(&b) = band_set.iter().find(|&&b| b >= dim) {
        return Err(Error::OutOfRange(format!("band {b} >= number of bands {dim}")));
    }
    Ok(())
}

/// Distance between the band-set energies and the rest.
pub fn band_set_gap(values: &[f64], band_set: &[usize]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, &e) in values.iter().enumerate() {
        if band_set.contains(&i) {
            continue;
        }
        for &b in band_set {
            gap = gap.min((values[b] - e).abs());
        }
    }
    gap
}

fn gapped_eigen<F>(bloch: &F, a: f64, b: f64, band_set: &[usize]) -> Result<Eigen>
where
    F: Fn(f64, f64) -> Result<HermitianOperator>,
{
    let eig = eig_hermitian(&bloch(a, b)?)?;
    check_band_set(band_set, eig.dimension())?;
    let gap = band_set_gap(&eig.values, band_set);
    if gap < GAP_TOL {
        return Err(Error::GapClosure(format!(
            "bands {band_set:?} meet the rest at ({a:.4}, {b:.4}): separation {gap:.2e}"
        )));
    }
    Ok(eig)
}

fn projector<F>(bloch: &F, a: f64, b: f64, band_set: &[usize]) -> Result<DMatrix<Complex64>>
where
    F: Fn(f64, f64) -> Result<HermitianOperator>,
{
    Ok(gapped_eigen(bloch, a, b, band_set)?.projector(band_set.iter().copied()))
}

/// `Im Tr P[∂₀P, ∂₁P]` at `point`, derivatives by central differences of
/// step `delta`. The trace itself is purely imaginary.
pub fn berry_curvature<F>(bloch: &F, band_set: &[usize], point: (f64, f64), delta: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<HermitianOperator>,
{
    let (a, b) = point;
    let p = projector(bloch, a, b, band_set)?;
    let d0 = (projector(bloch, a + delta, b, band_set)? - projector(bloch, a - delta, b, band_set)?) / Complex64::new(2.0 * delta, 0.0);
    let d1 = (projector(bloch, a, b + delta, band_set)? - projector(bloch, a, b - delta, band_set)?) / Complex64::new(2.0 * delta, 0.0);
    let commutator = &d0 * &d1 - &d1 * &d0;
    Ok((p * commutator).trace().im)
}

/// Band-set frames (columns) at every grid point, first axis fastest.
pub fn band_frames<F>(bloch: &F, band_set: &[usize], grid: &ParamGrid) -> Result<Vec<DMatrix<Complex64>>>
where
    F: Fn(f64, f64) -> Result<HermitianOperator> + Sync,
{
    if grid.dimension() != 2 {
        return Err(Error::InvalidSpec("first Chern numbers need a 2D grid".into()));
    }
    (0..grid.num_points())
        .into_par_iter()
        .map(|p| {
            let x = grid.coordinates(&grid.multi_index(p));
            let eig = gapped_eigen(bloch, x[0], x[1], band_set)?;
            let cols: Vec<_> = band_set.iter().map(|&b| eig.vectors.column(b).into_owned()).collect();
            Ok(DMatrix::from_columns(&cols))
        })
        .collect()
}

fn link(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> Complex64 {
    let d = (u.adjoint() * v).determinant();
    let n = d.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        d / n
    }
}

/// Lattice field-strength sum of Fukui, Hatsugai and Suzuki over precomputed
/// frames. Returns the raw Chern number.
pub fn fhs_from_frames(frames: &[DMatrix<Complex64>], grid: &ParamGrid) -> Result<f64> {
    let (n0, n1) = (grid.counts()[0], grid.counts()[1]);
    let at = |i: usize, j: usize| &frames[grid.flat_index(&[i % n0, j % n1])];
    let mut total = CompensatedSum::new();
    for j in 0..n1 {
        for i in 0..n0 {
            let u1 = link(at(i, j), at(i + 1, j));
            let u2 = link(at(i + 1, j), at(i + 1, j + 1));
            let u3 = link(at(i, j + 1), at(i + 1, j + 1));
            let u4 = link(at(i, j), at(i, j + 1));
            let f = (u1 * u2 * u3.conj() * u4.conj()).arg();
            if f.abs() > FRAC_PI_2 {
                return Err(Error::GridTooCoarse(format!(
                    "plaquette ({i}, {j}) carries phase {f:.3} > pi/2"
                )));
            }
            total.add(f);
        }
    }
    Ok(total.total() / TAU)
}

/// Gauge-invariant plaquette (Fukui–Hatsugai–Suzuki) Chern number of
/// `band_set`, oriented by the grid's axis order.
pub fn chern_1<F>(bloch: &F, band_set: &[usize], grid: &ParamGrid) -> Result<ChernReport>
where
    F: Fn(f64, f64) -> Result<HermitianOperator> + Sync,
{
    let frames = band_frames(bloch, band_set, grid)?;
    let raw = fhs_from_frames(&frames, grid)?;
    Ok(ChernReport::new("chern1", band_label(band_set), grid.clone(), raw))
}

/// Chern number from the integrated curvature (midpoint rule on the grid).
pub fn chern_1_curvature<F>(bloch: &F, band_set: &[usize], grid: &ParamGrid, delta: f64) -> Result<ChernReport>
where
    F: Fn(f64, f64) -> Result<HermitianOperator> + Sync,
{
    if grid.dimension() != 2 {
        return Err(Error::InvalidSpec("first Chern numbers need a 2D grid".into()));
    }
    let values = (0..grid.num_points())
        .into_par_iter()
        .map(|p| {
            let idx = grid.multi_index(p);
            let x: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| grid.step(a) * (i as f64 + 0.5))
                .collect();
            berry_curvature(bloch, band_set, (x[0], x[1]), delta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum: CompensatedSum = values.into_iter().collect();
    let raw = sum.total() * grid.cell_volume() / TAU;
    Ok(ChernReport::new("chern1", band_label(band_set), grid.clone(), raw))
}

pub(crate) fn band_label(band_set: &[usize]) -> String {
    let parts: Vec<String> = band_set.iter().map(usize::to_string).collect();
    parts.join("+")
}

/// Chern numbers of every band of one lattice axis over `(φ, k)`.
pub fn axis_band_cherns(spec: &LatticeSpec, axis: Axis, n: usize) -> Result<Vec<i64>> {
    let bloch = chain_bloch(spec, axis);
    let (_, q) = spec.frequency(axis).as_fraction()?;
    let grid = match axis {
        Axis::X => ParamGrid::square(GridAxis::PhiX, GridAxis::Kx, n)?,
        Axis::Y => ParamGrid::square(GridAxis::PhiY, GridAxis::Ky, n)?,
    };
    (0..q as usize)
        .map(|b| chern_1(&bloch, &[b], &grid).map(|r| r.value))
        .collect()
}
