//! Piecewise-constant midpoint integration of `i∂zψ = H(z)ψ` with exact
//! per-step unitaries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::FieldState;
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::spectral::{eig_hermitian, eig_real_symmetric};

/// Largest accepted `‖H‖·Δz` per step.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// A unitary stored as `hi + lo`, where `lo` is the first-order correction
/// bringing the rounded `hi` back onto the unitary group.
#[derive(Debug, Clone)]
struct Refined {
    hi: DMatrix<Complex64>,
    lo: DMatrix<Complex64>,
}

impl Refined {
    /// Newton–Schulz correction `−U(U†U − 1)/2` with `U†U − 1` evaluated
    /// by compensated dot products.
    fn new(hi: DMatrix<Complex64>) -> Self {
        let n = hi.ncols();
        let defect = DMatrix::from_fn(n, n, |r, c| {
            let (mut re, mut im) = ((if r == c { -1.0 } else { 0.0 }, 0.0), (0.0, 0.0));
            for k in 0..hi.nrows() {
                let (x, y) = (hi[(k, r)].conj(), hi[(k, c)]);
                dot2_step(&mut re, x.re, y.re);
                dot2_step(&mut re, -x.im, y.im);
                dot2_step(&mut im, x.re, y.im);
                dot2_step(&mut im, x.im, y.re);
            }
            Complex64::new(re.0 + re.1, im.0 + im.1)
        });
        let lo = (&hi * defect).scale(-0.5);
        Refined { hi, lo }
    }

    fn adjoint(&self) -> Self {
        Refined {
            hi: self.hi.adjoint(),
            lo: self.lo.adjoint(),
        }
    }

    /// `(hi + lo)·b`, each entry rounded once.
    fn mul(&self, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (hi, lo) = (&self.hi, &self.lo);
        DMatrix::from_fn(hi.nrows(), b.ncols(), |r, c| {
            let (mut re, mut im) = ((0.0, 0.0), (0.0, 0.0));
            for k in 0..hi.ncols() {
                let (x, y) = (hi[(r, k)], b[(k, c)]);
                dot2_step(&mut re, x.re, y.re);
                dot2_step(&mut re, -x.im, y.im);
                dot2_step(&mut im, x.re, y.im);
                dot2_step(&mut im, x.im, y.re);
                let t = lo[(r, k)] * y;
                re.1 += t.re;
                im.1 += t.im;
            }
            Complex64::new(re.0 + re.1, im.0 + im.1)
        })
    }
}

/// A real orthogonal matrix stored as `hi + lo`, refined like [`Refined`].
#[derive(Debug, Clone)]
struct RefinedReal {
    hi: DMatrix<f64>,
    lo: DMatrix<f64>,
}

impl RefinedReal {
    fn new(hi: DMatrix<f64>) -> Self {
        let n = hi.ncols();
        let mut defect = DMatrix::<f64>::zeros(n, n);
        for c in 0..n {
            for r in 0..=c {
                let mut acc = (if r == c { -1.0 } else { 0.0 }, 0.0);
                for k in 0..hi.nrows() {
                    dot2_step(&mut acc, hi[(k, r)], hi[(k, c)]);
                }
                defect[(r, c)] = acc.0 + acc.1;
                defect[(c, r)] = acc.0 + acc.1;
            }
        }
        let lo = (&hi * defect).scale(-0.5);
        RefinedReal { hi, lo }
    }

    /// `(hi + lo)ᵀ·x` when `transpose`, else `(hi + lo)·x`.
    fn mul_vec(&self, x: &[Complex64], transpose: bool) -> Vec<Complex64> {
        let (hi, lo) = (&self.hi, &self.lo);
        let n = hi.nrows();
        (0..n)
            .map(|i| {
                let (mut re, mut im) = ((0.0, 0.0), (0.0, 0.0));
                for (k, y) in x.iter().enumerate() {
                    let (a, b) = if transpose { (hi[(k, i)], lo[(k, i)]) } else { (hi[(i, k)], lo[(i, k)]) };
                    dot2_step(&mut re, a, y.re);
                    dot2_step(&mut im, a, y.im);
                    re.1 += b * y.re;
                    im.1 += b * y.im;
                }
                Complex64::new(re.0 + re.1, im.0 + im.1)
            })
            .collect()
    }
}

/// Unit phase as `hi + lo` with `|hi + lo| = 1` to second order.
fn refined_phase(p: Complex64) -> (Complex64, Complex64) {
    let mut acc = (-1.0, 0.0);
    dot2_step(&mut acc, p.re, p.re);
    dot2_step(&mut acc, p.im, p.im);
    (p, p * (-0.5 * (acc.0 + acc.1)))
}

/// Accumulates `s + a·b` keeping the rounding errors of both operations.
#[inline]
fn dot2_step(acc: &mut (f64, f64), a: f64, b: f64) {
    let p = a * b;
    let ep = a.mul_add(b, -p);
    let t = acc.0 + p;
    let z = t - acc.0;
    let es = (acc.0 - (t - z)) + (p - z);
    acc.0 = t;
    acc.1 += ep + es;
}

/// One step's unitary.
#[derive(Debug, Clone)]
pub struct Propagator(Factors);

#[derive(Debug, Clone)]
enum Factors {
    Dense(Refined),
    /// `Ux ⊗ Uy` for a direct-sum Hamiltonian.
    Separable { ux: Refined, uy: Refined },
    /// `V·diag(p)·Vᵀ` for real symmetric `H = V·diag(E)·Vᵀ`.
    Spectral {
        v: RefinedReal,
        phases: Vec<(Complex64, Complex64)>,
    },
}

impl Propagator {
    pub fn dense(u: DMatrix<Complex64>) -> Self {
        Propagator(Factors::Dense(Refined::new(u)))
    }

    /// `ux ⊗ uy` acting on amplitudes indexed `y·nx + x`.
    pub fn separable(ux: DMatrix<Complex64>, uy: DMatrix<Complex64>) -> Self {
        Propagator(Factors::Separable {
            ux: Refined::new(ux),
            uy: Refined::new(uy),
        })
    }

    /// `exp(−i·H·dz)` for real symmetric `H` with eigenvalues `values` and
    /// orthonormal eigenvectors `v`, kept in factored form.
    pub fn spectral(values: &[f64], v: DMatrix<f64>, dz: f64) -> Self {
        let phases = values.iter().map(|&e| refined_phase(Complex64::from_polar(1.0, -e * dz))).collect();
        Propagator(Factors::Spectral {
            v: RefinedReal::new(v),
            phases,
        })
    }

    /// `exp(−i·H·dz)`, factored when `H` is real.
    pub fn for_hamiltonian(h: &HermitianOperator, dz: f64) -> Result<Self> {
        match h.as_real() {
            Some(real) => {
                let (values, v) = eig_real_symmetric(real);
                Ok(Propagator::spectral(&values, v, dz))
            }
            None => Ok(Propagator::dense(exp_i(h, dz)?)),
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self.0, Factors::Separable { .. })
    }

    pub fn apply(&self, psi: &DVector<Complex64>, size_x: usize, size_y: usize) -> DVector<Complex64> {
        match &self.0 {
            Factors::Dense(u) => {
                let column = DMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
                DVector::from_column_slice(u.mul(&column).as_slice())
            }
            Factors::Separable { ux, uy } => {
                // column-major (x fastest) reshape: Ψ[x, y] = ψ[y·nx + x]
                let grid = DMatrix::from_column_slice(size_x, size_y, psi.as_slice());
                let out = uy.mul(&ux.mul(&grid).transpose()).transpose();
                DVector::from_column_slice(out.as_slice())
            }
            Factors::Spectral { v, phases } => {
                let mut w = v.mul_vec(psi.as_slice(), true);
                for (x, (hi, lo)) in w.iter_mut().zip(phases) {
                    *x = *x * hi + *x * lo;
                }
                DVector::from_vec(v.mul_vec(&w, false))
            }
        }
    }

    pub fn adjoint(&self) -> Propagator {
        Propagator(match &self.0 {
            Factors::Dense(u) => Factors::Dense(u.adjoint()),
            Factors::Separable { ux, uy } => Factors::Separable {
                ux: ux.adjoint(),
                uy: uy.adjoint(),
            },
            Factors::Spectral { v, phases } => Factors::Spectral {
                v: v.clone(),
                phases: phases.iter().map(|(hi, lo)| (hi.conj(), lo.conj())).collect(),
            },
        })
    }
}

/// `exp(−i·H·dz)` by spectral decomposition.
pub fn exp_i(h: &HermitianOperator, dz: f64) -> Result<DMatrix<Complex64>> {
    match h.as_real() {
        Some(real) => Ok(exp_i_real(real, dz)),
        None => {
            let eig = eig_hermitian(h)?;
            let phases = DVector::from_iterator(
                eig.values.len(),
                eig.values.iter().map(|&e| Complex64::from_polar(1.0, -e * dz)),
            );
            let scaled = DMatrix::from_fn(eig.vectors.nrows(), eig.vectors.ncols(), |r, c| eig.vectors[(r, c)] * phases[c]);
            Ok(scaled * eig.vectors.adjoint())
        }
    }
}

/// `exp(−i·H·dz)` for real symmetric `H`.
pub fn exp_i_real(h: DMatrix<f64>, dz: f64) -> DMatrix<Complex64> {
    let (values, v) = eig_real_symmetric(h);
    let n = v.nrows();
    let (c, s): (Vec<f64>, Vec<f64>) = values.iter().map(|&e| ((e * dz).cos(), -(e * dz).sin())).unzip();
    let vc = DMatrix::from_fn(n, n, |r, k| v[(r, k)] * c[k]);
    let vs = DMatrix::from_fn(n, n, |r, k| v[(r, k)] * s[k]);
    let re = vc * v.transpose();
    let im = vs * v.transpose();
    DMatrix::from_fn(n, n, |r, k| Complex64::new(re[(r, k)], im[(r, k)]))
}

/// Source of the z-dependent Hamiltonian.
pub trait Generator: Sync {
    fn size(&self) -> (usize, usize);

    fn hamiltonian(&self, z: f64) -> Result<HermitianOperator>;

    /// Upper bound on `‖H(z)‖`.
    fn norm_bound(&self, z: f64) -> Result<f64> {
        Ok(self.hamiltonian(z)?.norm_bound())
    }

    /// `exp(−i·H(z)·dz)`.
    fn propagator(&self, z: f64, dz: f64) -> Result<Propagator> {
        Propagator::for_hamiltonian(&self.hamiltonian(z)?, dz)
    }
}

/// A plain `z ↦ H(z)` closure.
pub struct FnGenerator<F> {
    f: F,
    size: (usize, usize),
}

impl<F> FnGenerator<F>
where
    F: Fn(f64) -> Result<HermitianOperator> + Sync,
{
    pub fn new(f: F, size_x: usize, size_y: usize) -> Self {
        FnGenerator {
            f,
            size: (size_x, size_y),
        }
    }
}

impl<F> Generator for FnGenerator<F>
where
    F: Fn(f64) -> Result<HermitianOperator> + Sync,
{
    fn size(&self) -> (usize, usize) {
        self.size
    }

    fn hamiltonian(&self, z: f64) -> Result<HermitianOperator> {
        (self.f)(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    /// Runs `z_total → 0` applying `exp(+iHΔz)`: undoes a forward run.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolveOptions {
    pub direction: Direction,
    /// Record the state every this many steps (plus both ends).
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub z: f64,
    pub state: FieldState,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: FieldState,
    pub snapshots: Vec<Snapshot>,
    /// `max |‖ψ‖ − 1|` over all steps.
    pub max_norm_drift: f64,
    pub steps: usize,
}

/// Smallest step count keeping `bound·Δz ≤` [`MAX_PHASE_PER_STEP`].
pub fn steps_for(z_total: f64, bound: f64) -> usize {
    ((z_total * bound / MAX_PHASE_PER_STEP).ceil() as usize).max(1)
}

/// Evolves `psi0` over `[0, z_total]` in `steps` equal steps, each the exact
/// unitary of `H` at the step midpoint.
pub fn evolve<G: Generator + ?Sized>(
    generator: &G,
    psi0: &FieldState,
    z_total: f64,
    steps: usize,
    options: EvolveOptions,
) -> Result<Evolution> {
    let (nx, ny) = generator.size();
    if psi0.size_x() != nx || psi0.size_y() != ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            actual: psi0.size_x() * psi0.size_y(),
        });
    }
    let norm0 = psi0.norm();
    if (norm0 - 1.0).abs() > super::state::NORM_TOL {
        return Err(Error::NotNormalized(format!("initial state norm {norm0:.15}")));
    }
    if !(z_total > 0.0) || steps == 0 {
        return Err(Error::InvalidSpec(format!(
            "need z_total > 0 and steps > 0, got {z_total} and {steps}"
        )));
    }
    let dz = z_total / steps as f64;
    let z_at = |k: usize| match options.direction {
        Direction::Forward => k as f64 * dz,
        Direction::Backward => z_total - k as f64 * dz,
    };
    let mut psi = psi0.amplitudes().clone();
    let mut snapshots = Vec::new();
    if options.snapshot_every.is_some() {
        snapshots.push(Snapshot {
            z: z_at(0),
            state: psi0.clone(),
        });
    }
    let mut drift: f64 = 0.0;
    for k in 0..steps {
        let z_mid = match options.direction {
            Direction::Forward => (k as f64 + 0.5) * dz,
            Direction::Backward => z_total - (k as f64 + 0.5) * dz,
        };
        let bound = generator.norm_bound(z_mid)?;
        if bound * dz > MAX_PHASE_PER_STEP {
            return Err(Error::StepTooLarge(format!(
                "|H|*dz = {:.4} > {MAX_PHASE_PER_STEP} at z = {z_mid:.4} cm; need >= {} steps",
                bound * dz,
                steps_for(z_total, bound)
            )));
        }
        let u = generator.propagator(z_mid, dz)?;
        let u = match options.direction {
            Direction::Forward => u,
            Direction::Backward => u.adjoint(),
        };
        psi = u.apply(&psi, nx, ny);
        drift = drift.max((psi.norm() - 1.0).abs());
        if let Some(every) = options.snapshot_every {
            if (k + 1) % every.max(1) == 0 || k + 1 == steps {
                snapshots.push(Snapshot {
                    z: z_at(k + 1),
                    state: FieldState::from_raw(psi.clone(), nx, ny),
                });
            }
        }
    }
    Ok(Evolution {
        final_state: FieldState::from_raw(psi, nx, ny),
        snapshots,
        max_norm_drift: drift,
        steps,
    })
}
