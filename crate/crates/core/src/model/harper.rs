//! Nearest-neighbour off-diagonal Harper chains and their direct sum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Axis, Boundary, Frequency, LatticeSpec, PumpParams};
use crate::operator::HermitianOperator;

/// Coupling of the bond between sites `index` and `index + 1` along `axis`:
/// `t̃ + λ·cos(2π·b·index + φ)`.
pub fn hopping_amplitude(spec: &LatticeSpec, axis: Axis, index: i64, phi: f64) -> f64 {
    bond(
        spec.bare(axis),
        spec.modulation(axis),
        spec.frequency(axis),
        index,
        phi,
    )
}

#[inline]
pub(crate) fn bond(tbar: f64, lam: f64, b: Frequency, index: i64, phi: f64) -> f64 {
    tbar + lam * (b.phase(index) + phi).cos()
}

fn chain_matrix(size: usize, tbar: f64, lam: f64, b: Frequency, phi: f64, boundary: Boundary) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(size, size);
    for i in 0..size.saturating_sub(1) {
        let t = bond(tbar, lam, b, i as i64, phi);
        h[(i, i + 1)] = t;
        h[(i + 1, i)] = t;
    }
    if boundary == Boundary::Periodic && size >= 2 {
        let t = bond(tbar, lam, b, size as i64 - 1, phi);
        h[(size - 1, 0)] += t;
        h[(0, size - 1)] += t;
    }
    h
}

/// Real chain Hamiltonian of one lattice axis (open or ring per `spec`).
pub fn axis_chain_matrix(spec: &LatticeSpec, axis: Axis, phi: f64) -> DMatrix<f64> {
    chain_matrix(
        spec.size(axis),
        spec.bare(axis),
        spec.modulation(axis),
        spec.frequency(axis),
        phi,
        spec.boundary,
    )
}

/// Open or ring chain of `size` sites with zero on-site energy.
pub fn build_1d_harper(
    size: usize,
    tbar: f64,
    lam: f64,
    b: Frequency,
    phi: f64,
    boundary: Boundary,
) -> Result<HermitianOperator> {
    if size < 2 {
        return Err(Error::SizeTooSmall(format!("chain needs >= 2 sites, got {size}")));
    }
    HermitianOperator::from_real(&chain_matrix(size, tbar, lam, b, phi, boundary), size, 1)
}

/// `H(φx, φy) = Hx(φx) ⊗ 1 + 1 ⊗ Hy(φy)` on the full lattice.
///
/// An axis of length one carries no bonds, so a `n × 1` spec builds a chain.
pub fn build_2d_direct_sum(spec: &LatticeSpec, pump: PumpParams) -> Result<HermitianOperator> {
    spec.validate()?;
    if spec.num_sites() < 2 {
        return Err(Error::SizeTooSmall(format!(
            "lattice {}x{} has a single site",
            spec.size_x, spec.size_y
        )));
    }
    let hx = axis_chain_matrix(spec, Axis::X, pump.phi_x());
    let hy = axis_chain_matrix(spec, Axis::Y, pump.phi_y());
    real_kron_sum(&hx, &hy)
}

/// `Hx ⊗ 1 + 1 ⊗ Hy` for real axis Hamiltonians, as a lattice operator.
pub fn real_kron_sum(hx: &DMatrix<f64>, hy: &DMatrix<f64>) -> Result<HermitianOperator> {
    let (nx, ny) = (hx.nrows(), hy.nrows());
    let n = nx * ny;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            for x2 in 0..nx {
                h[(i, y * nx + x2)] += hx[(x, x2)];
            }
            for y2 in 0..ny {
                h[(i, y2 * nx + x)] += hy[(y, y2)];
            }
        }
    }
    HermitianOperator::from_real(&h, nx, ny)
}

/// Bloch Hamiltonian of one magnetic unit cell (`q` sites) of a chain with
/// `b = p/q`. The cell-crossing bond carries the phase `e^{ik}`.
pub fn bloch_chain_matrix(tbar: f64, lam: f64, b: Frequency, phi: f64, k: f64) -> Result<DMatrix<Complex64>> {
    let (_, q) = b.as_fraction()?;
    let q = q as usize;
    let mut h = DMatrix::<Complex64>::zeros(q, q);
    let bloch = Complex64::from_polar(1.0, k);
    for j in 0..q {
        let t = bond(tbar, lam, b, j as i64, phi);
        if j + 1 < q {
            h[(j, j + 1)] += t;
            h[(j + 1, j)] += t;
        } else {
            h[(q - 1, 0)] += bloch * t;
            h[(0, q - 1)] += bloch.conj() * t;
        }
    }
    Ok(h)
}

/// One-axis Bloch Hamiltonian as a `q × 1` operator.
pub fn build_bloch_chain(spec: &LatticeSpec, axis: Axis, phi: f64, k: f64) -> Result<HermitianOperator> {
    let m = bloch_chain_matrix(spec.bare(axis), spec.modulation(axis), spec.frequency(axis), phi, k)?;
    let q = m.nrows();
    HermitianOperator::new(m, q, 1)
}

/// Magnetic-unit-cell Bloch Hamiltonian of the direct-sum model,
/// dimension `q_x·q_y`, basis index `jy·q_x + jx`.
pub fn build_bloch(spec: &LatticeSpec, k: (f64, f64), pump: PumpParams) -> Result<HermitianOperator> {
    let hx = bloch_chain_matrix(spec.tbar_x, spec.lam_x, spec.b_x, pump.phi_x(), k.0)?;
    let hy = bloch_chain_matrix(spec.tbar_y, spec.lam_y, spec.b_y, pump.phi_y(), k.1)?;
    let h = kron_sum(&hx, &hy);
    HermitianOperator::new(h, hx.nrows(), hy.nrows())
}

/// `A ⊗ 1 + 1 ⊗ B` in the x-fastest basis (`A` acts on x, `B` on y).
pub fn kron_sum(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (nx, ny) = (a.nrows(), b.nrows());
    let n = nx * ny;
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            for x2 in 0..nx {
                h[(i, y * nx + x2)] += a[(x, x2)];
            }
            for y2 in 0..ny {
                h[(i, y2 * nx + x)] += b[(y, y2)];
            }
        }
    }
    h
}
