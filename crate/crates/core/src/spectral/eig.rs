use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{hermitian_deviation, HermitianOperator, HERMITIAN_TOL};

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigen {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Projector onto the eigenvectors with the given indices.
    pub fn projector(&self, indices: impl IntoIterator<Item = usize>) -> DMatrix<Complex64> {
        let n = self.dimension();
        let mut p = DMatrix::<Complex64>::zeros(n, n);
        for k in indices {
            let v = self.vectors.column(k);
            p += &v * v.adjoint();
        }
        p
    }
}

pub fn eig_hermitian(h: &HermitianOperator) -> Result<Eigen> {
    match h.as_real() {
        Some(real) => {
            let (values, vectors) = eig_real_symmetric(real);
            Ok(Eigen {
                values,
                vectors: vectors.map(|v| Complex64::new(v, 0.0)),
            })
        }
        None => Ok(eig_complex(h.matrix().clone())),
    }
}

/// Same as [`eig_hermitian`] for a bare matrix; checks Hermiticity.
pub fn eig_hermitian_matrix(m: &DMatrix<Complex64>) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(eig_complex(m.clone()))
}

pub fn eigvals_hermitian(h: &HermitianOperator) -> Result<Vec<f64>> {
    match h.as_real() {
        Some(real) => {
            let mut v: Vec<f64> = real.symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
        None => {
            let mut v: Vec<f64> = h.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
    }
}

/// Real symmetric eigendecomposition, ascending.
pub fn eig_real_symmetric(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let se = m.symmetric_eigen();
    let order = ascending_order(se.eigenvalues.as_slice());
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(se.eigenvectors.nrows(), order.len(), |r, c| se.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn eig_complex(m: DMatrix<Complex64>) -> Eigen {
    let se = m.symmetric_eigen();
    let order = ascending_order(se.eigenvalues.as_slice());
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(se.eigenvectors.nrows(), order.len(), |r, c| se.eigenvectors[(r, order[c])]);
    Eigen { values, vectors }
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn two_level() {
        let t = 0.8;
        let h = HermitianOperator::from_real(&DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]), 2, 1).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert!((e.values[0] + t).abs() < 1e-14 && (e.values[1] - t).abs() < 1e-14);
    }

    #[test]
    fn shift_moves_values_only() {
        let m = random_hermitian(12, 3);
        let h = HermitianOperator::new(m, 12, 1).unwrap();
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h.shifted(2.5)).unwrap();
        for k in 0..12 {
            assert!((a.values[k] + 2.5 - b.values[k]).abs() < 1e-12);
            let overlap = (a.vectors.column(k).adjoint() * b.vectors.column(k))[(0, 0)].norm();
            assert!((overlap - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn random_reconstruction() {
        let m = random_hermitian(50, 17);
        let e = eig_hermitian_matrix(&m).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            50,
            e.values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!((rebuilt - &m).norm() <= 1e-9);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - DMatrix::identity(50, 50)).norm() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn matrix_entry_point_checks_hermiticity() {
        let mut m = random_hermitian(4, 1);
        m[(0, 1)] += Complex64::new(0.1, 0.0);
        assert!(matches!(eig_hermitian_matrix(&m), Err(Error::NotHermitian(_))));
    }
}
