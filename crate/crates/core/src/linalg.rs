//! Dense complex matrix kernels shared by the algebra and operator layers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;

pub(crate) fn identity(k: usize) -> CMat {
    CMat::identity(k, k)
}

pub(crate) fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values in descending order.
pub(crate) fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub(crate) fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Largest `c` with `‖x·m‖ ≥ c‖x‖` for every row vector `x`.
///
/// Rows index the domain, so a matrix with more rows than columns has a
/// nontrivial left kernel and the bound is zero.
pub(crate) fn row_lower_bound(m: &CMat) -> f64 {
    if m.nrows() > m.ncols() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub(crate) fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian eigendecomposition of the Hermitian part of `m`, eigenvalues
/// ascending with matching eigenvector columns.
pub(crate) fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let k = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub(crate) fn eigenvalues(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// `V·diag(f(λ))·V*` for the Hermitian part of `m`.
pub(crate) fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = eigh(m);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let s = Complex64::new(f(lambda), 0.0);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    scaled * vectors.adjoint()
}

pub(crate) fn hermitian_residual(m: &CMat) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// Positivity with tolerance relative to `max(1, ‖m‖)`.
pub(crate) fn is_psd(m: &CMat, tol: f64) -> bool {
    let scale = spectral_norm(m).max(1.0);
    if hermitian_residual(m) > tol * scale {
        return false;
    }
    eigenvalues(m).first().is_none_or(|&lo| lo >= -tol * scale)
}

pub(crate) fn scale(m: &CMat, s: f64) -> CMat {
    m * Complex64::new(s, 0.0)
}
