//! The free Hilbert A-module `U ≅ Aᵈ` with its A-valued inner product.
//!
//! A vector is stored flattened as the `n × (d·n)` matrix `[x₁ … x_d]`, so
//! the inner product `Σᵢ xᵢ·yᵢ*` is a single product `X·Y*`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{GFrameError, Result};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    n: usize,
    d: usize,
    flat: CMat,
}

impl ModuleVector {
    pub fn from_blocks(blocks: &[AlgebraElement]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| GFrameError::DimensionMismatch("module vector needs at least one block".into()))?;
        let n = first.dim();
        if let Some(i) = blocks.iter().position(|b| b.dim() != n) {
            return Err(GFrameError::DimensionMismatch(format!(
                "block {i} has dim {}, expected {n}",
                blocks[i].dim()
            )));
        }
        let d = blocks.len();
        let mut flat = CMat::zeros(n, d * n);
        for (i, b) in blocks.iter().enumerate() {
            flat.view_mut((0, i * n), (n, n)).copy_from(b.matrix());
        }
        Ok(Self { n, d, flat })
    }

    /// Wraps an `n × (d·n)` flattened matrix.
    pub(crate) fn from_flat(n: usize, flat: CMat) -> Result<Self> {
        if n == 0 || flat.nrows() != n || flat.ncols() == 0 || !flat.ncols().is_multiple_of(n) {
            return Err(GFrameError::DimensionMismatch(format!(
                "flattened module vector must be n x (d*n) with n = {n}, got {}x{}",
                flat.nrows(),
                flat.ncols()
            )));
        }
        if !linalg::all_finite(&flat) {
            return Err(GFrameError::InvalidValue("module vector has non-finite entries".into()));
        }
        Ok(Self { n, d: flat.ncols() / n, flat })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, flat: CMat::zeros(n, d * n) }
    }

    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn block(&self, i: usize) -> AlgebraElement {
        AlgebraElement::from_matrix_unchecked(self.flat.view((0, i * self.n), (self.n, self.n)).into_owned())
    }

    pub fn blocks(&self) -> Vec<AlgebraElement> {
        (0..self.d).map(|i| self.block(i)).collect()
    }

    pub(crate) fn flat(&self) -> &CMat {
        &self.flat
    }

    pub fn is_zero(&self) -> bool {
        self.flat.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// `⟨x, y⟩ = Σᵢ xᵢ·yᵢ*`.
    pub fn inner(&self, other: &Self) -> Result<AlgebraElement> {
        self.check_shape(other)?;
        Ok(AlgebraElement::from_matrix_unchecked(&self.flat * other.flat.adjoint()))
    }

    /// `|x| = ⟨x, x⟩^{1/2}`.
    pub fn abs(&self) -> AlgebraElement {
        let gram = self.self_inner();
        AlgebraElement::from_matrix_unchecked(linalg::spectral_map(gram.matrix(), |l| l.max(0.0).sqrt()))
    }

    /// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.self_inner().norm().sqrt()
    }

    /// Left module action `(a·x)ᵢ = a·xᵢ`.
    pub fn left_mul(&self, a: &AlgebraElement) -> Result<Self> {
        if a.dim() != self.n {
            return Err(GFrameError::DimensionMismatch(format!(
                "algebra dim {} acting on module over dim {}",
                a.dim(),
                self.n
            )));
        }
        Ok(Self { n: self.n, d: self.d, flat: a.matrix() * &self.flat })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self { n: self.n, d: self.d, flat: &self.flat + &other.flat })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self { n: self.n, d: self.d, flat: &self.flat - &other.flat })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, d: self.d, flat: linalg::scale(&self.flat, s) }
    }

    fn self_inner(&self) -> AlgebraElement {
        AlgebraElement::from_matrix_unchecked(&self.flat * self.flat.adjoint())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(GFrameError::DimensionMismatch(format!(
                "module vectors (n={}, d={}) and (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn from_entries(n: usize, d: usize, entries: impl Iterator<Item = Complex64>) -> Self {
        let flat = CMat::from_iterator(n, d * n, entries);
        Self { n, d, flat }
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleVectorJson {
    n: usize,
    d: usize,
    blocks: Vec<AlgebraElement>,
}

impl Serialize for ModuleVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleVectorJson { n: self.n, d: self.d, blocks: self.blocks() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ModuleVectorJson::deserialize(d)?;
        if raw.blocks.len() != raw.d {
            return Err(D::Error::custom(format!("expected {} blocks, got {}", raw.d, raw.blocks.len())));
        }
        let v = Self::from_blocks(&raw.blocks).map_err(D::Error::custom)?;
        if v.n != raw.n {
            return Err(D::Error::custom(format!("blocks have dim {}, header says n = {}", v.n, raw.n)));
        }
        Ok(v)
    }
}
