//! Guided modes of one or two Gaussian waveguides from the scalar paraxial
//! operator `−(1/2k₀)∇² − k₀·Δn/n₀`.
//!
//! Both index profiles are even in `x` and `y`, so the problem is solved on
//! the quarter plane `x, y > 0` per parity sector: the symmetric supermode is
//! the ground state of the (even, even) sector, the antisymmetric one of the
//! (odd, even) sector. The grid is cell-centred, which puts the mirror planes
//! half a cell from the first unknowns; a uniform 5-point Laplacian with a
//! zero Dirichlet ghost layer closes the outer boundary.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::profile::IndexProfile;
use crate::error::{Error, Result};

/// µm⁻¹ to cm⁻¹.
const PER_UM_TO_PER_CM: f64 = 1e4;
const MAX_ITERATIONS: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-10;
/// Largest accepted relative change of `t` under grid halving.
pub const REFINEMENT_TOL: f64 = 0.01;

/// Square simulation window of side `extent` µm and cell size `spacing` µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub extent: f64,
    pub spacing: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            extent: 80.0,
            spacing: 0.5,
        }
    }
}

impl GridSpec {
    pub fn halved(&self) -> Self {
        GridSpec {
            extent: self.extent,
            spacing: self.spacing / 2.0,
        }
    }

    fn cells_per_half(&self) -> usize {
        (self.extent / 2.0 / self.spacing).round() as usize
    }

    fn check(&self, profile: &IndexProfile, separation: f64) -> Result<()> {
        if !(self.spacing > 0.0) || !(self.extent > 0.0) {
            return Err(Error::InvalidSpec(format!("grid must be positive: {self:?}")));
        }
        if self.spacing > profile.sigma_min() / 4.0 {
            return Err(Error::GridTooCoarse(format!(
                "spacing {} um does not resolve sigma {} um (need <= sigma/4)",
                self.spacing,
                profile.sigma_min()
            )));
        }
        let half = self.extent / 2.0;
        let need_x = separation / 2.0 + 4.0 * profile.sigma_x;
        let need_y = 4.0 * profile.sigma_y;
        if half < need_x || half < need_y {
            return Err(Error::GridTooCoarse(format!(
                "extent {} um leaves less than 4 sigma margin around waveguides {separation} um apart",
                self.extent
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoWaveguideSolution {
    /// Symmetric supermode, cm⁻¹ (more negative is more bound).
    pub e1: f64,
    /// Antisymmetric supermode, cm⁻¹.
    pub e2: f64,
    /// `(e2 − e1)/2`, cm⁻¹.
    pub coupling: f64,
    /// Coupling recomputed on the half-spacing grid, when checked.
    pub refined_coupling: Option<f64>,
}

/// Solves the two-waveguide problem and checks it against a grid with half
/// the spacing.
pub fn solve_two_waveguide(
    profile: &IndexProfile,
    separation: f64,
    wavelength_nm: f64,
    grid: GridSpec,
) -> Result<TwoWaveguideSolution> {
    let coarse = solve_two_waveguide_unchecked(profile, separation, wavelength_nm, grid)?;
    let fine = solve_two_waveguide_unchecked(profile, separation, wavelength_nm, grid.halved())?;
    let change = (coarse.coupling - fine.coupling).abs() / fine.coupling.abs().max(f64::MIN_POSITIVE);
    if change > REFINEMENT_TOL {
        return Err(Error::GridTooCoarse(format!(
            "halving the spacing moves t from {:.6} to {:.6} per cm ({:.2}%)",
            coarse.coupling,
            fine.coupling,
            100.0 * change
        )));
    }
    Ok(TwoWaveguideSolution {
        refined_coupling: Some(fine.coupling),
        ..coarse
    })
}

/// [`solve_two_waveguide`] without the refinement check.
pub fn solve_two_waveguide_unchecked(
    profile: &IndexProfile,
    separation: f64,
    wavelength_nm: f64,
    grid: GridSpec,
) -> Result<TwoWaveguideSolution> {
    profile.validate()?;
    if !(separation > 0.0) {
        return Err(Error::InvalidSpec(format!("separation must be positive, got {separation}")));
    }
    check_wavelength(wavelength_nm)?;
    grid.check(profile, separation)?;
    let problem = QuarterProblem::new(profile, wavelength_nm, grid, &[separation / 2.0]);
    let e1 = problem.ground(Parity::Even, separation / 2.0)?;
    let e2 = problem.ground(Parity::Odd, separation / 2.0)?;
    if !(e1 < 0.0 && e2 < 0.0) {
        return Err(Error::NotGuided(format!(
            "supermodes at {e1:.4} and {e2:.4} per cm: fewer than two bound states at separation {separation} um"
        )));
    }
    Ok(TwoWaveguideSolution {
        e1,
        e2,
        coupling: (e2 - e1) / 2.0,
        refined_coupling: None,
    })
}

/// Fundamental mode of one waveguide, cm⁻¹.
pub fn solve_single_waveguide(profile: &IndexProfile, wavelength_nm: f64, grid: GridSpec) -> Result<f64> {
    profile.validate()?;
    check_wavelength(wavelength_nm)?;
    grid.check(profile, 0.0)?;
    let problem = QuarterProblem::new(profile, wavelength_nm, grid, &[0.0]);
    let e = problem.ground(Parity::Even, 0.0)?;
    if !(e < 0.0) {
        return Err(Error::NotGuided(format!("fundamental mode at {e:.4} per cm is not bound")));
    }
    Ok(e)
}

fn check_wavelength(wavelength_nm: f64) -> Result<()> {
    if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
        return Err(Error::InvalidSpec(format!("wavelength must be positive, got {wavelength_nm}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Diagonal correction of the first row of `−d²/dx²·h²` from the mirror ghost.
    fn ghost(self) -> f64 {
        match self {
            Parity::Even => -1.0,
            Parity::Odd => 1.0,
        }
    }
}

/// Quarter-plane operator `a·(T⊗1 + 1⊗T) + V`, unknowns `u[(ix, iy)]`.
struct QuarterProblem {
    n: usize,
    h: f64,
    /// `1/(2k₀h²)`, µm⁻¹.
    kinetic: f64,
    potential: DMatrix<f64>,
    sigma: (f64, f64),
}

impl QuarterProblem {
    /// Wells at `(±c, 0)` for every `c` in `centres` (µm).
    fn new(profile: &IndexProfile, wavelength_nm: f64, grid: GridSpec, centres: &[f64]) -> Self {
        let n = grid.cells_per_half();
        let h = grid.spacing;
        let k0 = profile.wavenumber(wavelength_nm);
        let coord = |i: usize| (i as f64 + 0.5) * h;
        let potential = DMatrix::from_fn(n, n, |i, j| {
            let (x, y) = (coord(i), coord(j));
            let dn: f64 = centres
                .iter()
                .map(|&c| {
                    if c == 0.0 {
                        profile.contrast(x, y)
                    } else {
                        profile.contrast(x - c, y) + profile.contrast(x + c, y)
                    }
                })
                .sum();
            -k0 * dn / profile.n0
        });
        QuarterProblem {
            n,
            h,
            kinetic: 1.0 / (2.0 * k0 * h * h),
            potential,
            sigma: (profile.sigma_x, profile.sigma_y),
        }
    }

    fn second_difference(n: usize, parity: Parity) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = 2.0;
            if i + 1 < n {
                t[(i, i + 1)] = -1.0;
                t[(i + 1, i)] = -1.0;
            }
        }
        t[(0, 0)] += parity.ghost();
        t
    }

    fn apply(&self, px: Parity, u: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let a = self.kinetic;
        let (gx, gy) = (px.ghost(), Parity::Even.ghost());
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let c = u[(i, j)];
                let mut lap = 4.0 * c;
                if i == 0 {
                    lap += gx * c;
                } else {
                    lap -= u[(i - 1, j)];
                }
                if i + 1 < n {
                    lap -= u[(i + 1, j)];
                }
                if j == 0 {
                    lap += gy * c;
                } else {
                    lap -= u[(i, j - 1)];
                }
                if j + 1 < n {
                    lap -= u[(i, j + 1)];
                }
                out[(i, j)] = a * lap + self.potential[(i, j)] * c;
            }
        }
        out
    }

    /// Lowest eigenvalue of the sector, cm⁻¹.
    fn ground(&self, px: Parity, centre: f64) -> Result<f64> {
        let n = self.n;
        let precond = FastDiagonalization::new(
            &Self::second_difference(n, px),
            &Self::second_difference(n, Parity::Even),
            self.kinetic,
            -self.potential.min(),
        );
        let (sx, sy) = self.sigma;
        let coord = |i: usize| (i as f64 + 0.5) * self.h;
        let mut x = DMatrix::from_fn(n, n, |i, j| {
            let (xi, yj) = (coord(i), coord(j));
            (-(xi - centre).powi(2) / (sx * sx) - yj * yj / (sy * sy)).exp()
        });
        x /= x.norm();
        let value = lobpcg_lowest(|u| self.apply(px, u), |r| precond.solve(r), x)?;
        Ok(value * PER_UM_TO_PER_CM)
    }
}

/// Exact inverse of `a·(Tx⊗1 + 1⊗Ty) + shift` through the eigenbases of `Tx`
/// and `Ty`.
struct FastDiagonalization {
    qx: DMatrix<f64>,
    qy: DMatrix<f64>,
    denom: DMatrix<f64>,
}

impl FastDiagonalization {
    fn new(tx: &DMatrix<f64>, ty: &DMatrix<f64>, a: f64, shift: f64) -> Self {
        let ex = tx.clone().symmetric_eigen();
        let ey = ty.clone().symmetric_eigen();
        let shift = shift.max(f64::EPSILON);
        let denom = DMatrix::from_fn(tx.nrows(), ty.nrows(), |i, j| {
            a * (ex.eigenvalues[i] + ey.eigenvalues[j]) + shift
        });
        FastDiagonalization {
            qx: ex.eigenvectors,
            qy: ey.eigenvectors,
            denom,
        }
    }

    fn solve(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        let spectral = self.qx.transpose() * r * &self.qy;
        let scaled = spectral.component_div(&self.denom);
        &self.qx * scaled * self.qy.transpose()
    }
}

/// Single-vector LOBPCG for the smallest eigenvalue of a symmetric operator.
fn lobpcg_lowest<A, M>(apply: A, precond: M, mut x: DMatrix<f64>) -> Result<f64>
where
    A: Fn(&DMatrix<f64>) -> DMatrix<f64>,
    M: Fn(&DMatrix<f64>) -> DMatrix<f64>,
{
    let mut ax = apply(&x);
    let mut rho = x.dot(&ax);
    let mut p: Option<DMatrix<f64>> = None;
    let mut ap: Option<DMatrix<f64>> = None;
    let mut residual_norm = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let r = &ax - &x * rho;
        residual_norm = r.norm();
        if residual_norm < RESIDUAL_TOL {
            return Ok(rho);
        }
        let w = precond(&r);
        let aw = apply(&w);

        let mut basis = vec![(x.clone(), ax.clone()), (w, aw)];
        if let (Some(p), Some(ap)) = (p.take(), ap.take()) {
            basis.push((p, ap));
        }
        let basis = orthonormalize(basis);
        let k = basis.len();
        let gram = DMatrix::from_fn(k, k, |i, j| 0.5 * (basis[i].0.dot(&basis[j].1) + basis[j].0.dot(&basis[i].1)));
        let eig = gram.symmetric_eigen();
        let lowest = eig.eigenvalues.imin();
        let c = eig.eigenvectors.column(lowest);

        let mut new_p = &basis[1].0 * c[1];
        let mut new_ap = &basis[1].1 * c[1];
        for (i, (v, av)) in basis.iter().enumerate().skip(2) {
            new_p += v * c[i];
            new_ap += av * c[i];
        }
        x = &basis[0].0 * c[0] + &new_p;
        ax = &basis[0].1 * c[0] + &new_ap;
        let norm = x.norm();
        x /= norm;
        ax /= norm;
        rho = x.dot(&ax);
        p = Some(new_p);
        ap = Some(new_ap);
    }
    Err(Error::GridTooCoarse(format!(
        "eigensolver did not converge (residual {residual_norm:.3e})"
    )))
}

/// Gram–Schmidt (twice) keeping the operator images consistent; the first
/// vector stays first, near-dependent vectors are dropped.
fn orthonormalize(vectors: Vec<(DMatrix<f64>, DMatrix<f64>)>) -> Vec<(DMatrix<f64>, DMatrix<f64>)> {
    let mut out: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::with_capacity(vectors.len());
    for (mut v, mut av) in vectors {
        let original = v.norm();
        for _ in 0..2 {
            for (q, aq) in &out {
                let c = q.dot(&v);
                v -= q * c;
                av -= aq * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-10 * original.max(f64::MIN_POSITIVE) && norm > 0.0 {
            out.push((v / norm, av / norm));
        }
    }
    out
}
