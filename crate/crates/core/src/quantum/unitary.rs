use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::prelude::*;

/// Tolerance for the unitarity check on construction.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense `N×N` unitary. `get(j, k)` is `<j|U|k>`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    /// Wraps `m` after checking `U†U = I` to [`UNITARITY_TOL`].
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(m, UNITARITY_TOL)
    }

    pub fn with_tolerance(m: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: m.nrows().max(1), got: m.ncols() });
        }
        let u = UnitaryMatrix { m };
        let d = u.unitarity_defect();
        if d.is_nan() || d > tol {
            return Err(Error::NotUnitary(d));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix { m: DMatrix::identity(n, n) }
    }

    /// Diagonal unitary with entries `e^{iθ_k}`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let d: Vec<Complex64> = phases.iter().map(|&t| Complex64::cis(t)).collect();
        UnitaryMatrix { m: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.m[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    /// `max |(U†U − I)_{jk}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.m.adjoint() * &self.m;
        let n = g.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let target = if j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((g[(j, k)] - target).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix { m: self.m.adjoint() }
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(UnitaryMatrix { m: &self.m * &other.m })
    }

    /// `U^t` by binary powering.
    pub fn pow(&self, mut t: u64) -> UnitaryMatrix {
        let n = self.dim();
        let mut acc = DMatrix::<Complex64>::identity(n, n);
        let mut base = self.m.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = &acc * &base;
            }
            t >>= 1;
            if t > 0 {
                base = &base * &base;
            }
        }
        UnitaryMatrix { m: acc }
    }

    /// `U v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let n = self.dim();
        Ok((0..n).map(|j| (0..n).map(|k| self.m[(j, k)] * v[k]).sum()).collect())
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n * n).map(|i| self.m[(i / n, i % n)]).collect()
    }

    /// Builds from row-major entries, checking unitarity.
    pub fn from_row_major(n: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }
}

/// DFT matrix `F_{kj} = e^{-2πi kj/n} / √n`.
pub fn dft_matrix(n: usize) -> DMatrix<Complex64> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |k, j| {
        let kj = (k * j) % n;
        Complex64::cis(-2.0 * core::f64::consts::PI * kj as f64 / n as f64) * s
    })
}
