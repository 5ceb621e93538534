use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `|H - H†|` used by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Single-particle Hamiltonian over the site basis of a `size_x × size_y`
/// lattice (flat index `y·size_x + x`). Couplings in cm⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
    size_x: usize,
    size_y: usize,
}

impl HermitianOperator {
    /// Checks shape and Hermiticity.
    pub fn new(matrix: DMatrix<Complex64>, size_x: usize, size_y: usize) -> Result<Self> {
        let n = size_x * size_y;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianOperator {
            matrix,
            size_x,
            size_y,
        })
    }

    /// Lifts a real symmetric matrix.
    pub fn from_real(matrix: &DMatrix<f64>, size_x: usize, size_y: usize) -> Result<Self> {
        Self::new(matrix.map(|v| Complex64::new(v, 0.0)), size_x, size_y)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn site_index(&self, x: usize, y: usize) -> usize {
        y * self.size_x + x
    }

    pub fn site_coords(&self, index: usize) -> (usize, usize) {
        (index % self.size_x, index / self.size_x)
    }

    /// `Some(real part)` when every imaginary part is exactly zero.
    pub fn as_real(&self) -> Option<DMatrix<f64>> {
        if self.matrix.iter().all(|z| z.im == 0.0) {
            Some(self.matrix.map(|z| z.re))
        } else {
            None
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        HermitianOperator {
            matrix: m,
            size_x: self.size_x,
            size_y: self.size_y,
        }
    }
}

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(
            HermitianOperator::new(m, 2, 1),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn rejects_wrong_shape() {
        let m = DMatrix::<Complex64>::zeros(3, 3);
        assert!(matches!(
            HermitianOperator::new(m, 2, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn real_detection() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]);
        let h = HermitianOperator::from_real(&m, 2, 1).unwrap();
        assert_eq!(h.as_real().unwrap(), m);
        assert_eq!(h.norm_bound(), 1.5);
    }
}
