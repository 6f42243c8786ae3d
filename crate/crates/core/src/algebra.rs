//! The C*-algebra `A = Mₙ(ℂ)`: involution, positivity, Loewner order,
//! square roots and the C*-norm.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GFrameError, Result};
use crate::linalg::{self, CMat};
use crate::DEFAULT_TOL;

/// An element of `Mₙ(ℂ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    m: CMat,
}

impl AlgebraElement {
    /// Builds an element from `n²` row-major entries.
    pub fn new(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(GFrameError::DimensionMismatch("algebra dimension must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(GFrameError::DimensionMismatch(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(CMat::from_row_slice(dim, dim, entries))
    }

    pub fn from_matrix(m: CMat) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(GFrameError::DimensionMismatch(format!(
                "algebra element must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !linalg::all_finite(&m) {
            return Err(GFrameError::InvalidValue("algebra element has non-finite entries".into()));
        }
        Ok(Self { m })
    }

    /// Real diagonal element, mostly for tests and fixtures.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_matrix(CMat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: linalg::identity(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMat::zeros(dim, dim) }
    }

    pub(crate) fn from_matrix_unchecked(m: CMat) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// Row-major entries.
    pub fn entries(&self) -> Vec<Complex64> {
        self.m.transpose().iter().copied().collect()
    }

    /// The involution `a ↦ a*` (conjugate transpose).
    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: linalg::scale(&self.m, s) }
    }

    /// `a ≥ 0`: Hermitian and spectrum bounded below, both relative to
    /// `max(1, ‖a‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        linalg::is_psd(&self.m, tol)
    }

    /// `self ⪯ other`, i.e. `other − self ≥ 0`.
    pub fn loewner_leq(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_dim(other)?;
        Ok(linalg::is_psd(&(&other.m - &self.m), tol))
    }

    /// Positive square root; tiny negative eigenvalues are clamped to zero.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.is_positive(DEFAULT_TOL) {
            let min_eigenvalue = self.eigenvalues().first().copied().unwrap_or(0.0);
            return Err(GFrameError::NotPositive { min_eigenvalue, tol: DEFAULT_TOL });
        }
        Ok(Self { m: linalg::spectral_map(&self.m, |l| l.max(0.0).sqrt()) })
    }

    /// C*-norm: the largest singular value.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.m)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues(&self.m)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { m: &self.m * &other.m })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(GFrameError::DimensionMismatch(format!(
                "algebra dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, rhs: Self) -> AlgebraElement {
        self.checked_add(rhs).expect("algebra dimension mismatch")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;

    fn sub(self, rhs: Self) -> AlgebraElement {
        self.checked_sub(rhs).expect("algebra dimension mismatch")
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;

    fn mul(self, rhs: Self) -> AlgebraElement {
        self.checked_mul(rhs).expect("algebra dimension mismatch")
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::io::matrix_serde::serialize(&self.m, s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = crate::io::matrix_serde::deserialize(d)?;
        Self::from_matrix(m).map_err(serde::de::Error::custom)
    }
}
