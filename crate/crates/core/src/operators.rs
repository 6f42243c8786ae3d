//! Adjointable A-linear maps `Aᵈ → Aᵉ`.
//!
//! An operator acts on the right of the flattened vector: `T(x) = X·M` with
//! `M` a `(d·n) × (e·n)` complex matrix. Right multiplication commutes with
//! the left algebra action, so every such map is A-linear, and its adjoint
//! is the map with action `M*`.

use serde::{Deserialize, Serialize};

use crate::error::{GFrameError, Result};
use crate::linalg::{self, CMat};
use crate::module_space::ModuleVector;
use crate::DEFAULT_TOL;

/// Default relative threshold for numerical surjectivity.
pub const SURJECTIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    n: usize,
    d: usize,
    e: usize,
    action: CMat,
}

impl ModuleOperator {
    pub fn new(n: usize, d: usize, e: usize, action: CMat) -> Result<Self> {
        if n == 0 || d == 0 || e == 0 {
            return Err(GFrameError::DimensionMismatch("operator dimensions must be >= 1".into()));
        }
        if action.nrows() != d * n || action.ncols() != e * n {
            return Err(GFrameError::DimensionMismatch(format!(
                "action must be {}x{} for n={n}, d={d}, e={e}, got {}x{}",
                d * n,
                e * n,
                action.nrows(),
                action.ncols()
            )));
        }
        if !linalg::all_finite(&action) {
            return Err(GFrameError::InvalidValue("operator action has non-finite entries".into()));
        }
        Ok(Self { n, d, e, action })
    }

    pub(crate) fn from_parts_unchecked(n: usize, d: usize, e: usize, action: CMat) -> Self {
        debug_assert_eq!(action.shape(), (d * n, e * n));
        Self { n, d, e, action }
    }

    pub fn identity(n: usize, d: usize) -> Self {
        Self { n, d, e: d, action: linalg::identity(d * n) }
    }

    pub fn zeros(n: usize, d: usize, e: usize) -> Self {
        Self { n, d, e, action: CMat::zeros(d * n, e * n) }
    }

    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    pub fn domain_rank(&self) -> usize {
        self.d
    }

    pub fn codomain_rank(&self) -> usize {
        self.e
    }

    pub fn action(&self) -> &CMat {
        &self.action
    }

    pub fn is_square(&self) -> bool {
        self.d == self.e
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.algebra_dim() != self.n || x.rank() != self.d {
            return Err(GFrameError::DimensionMismatch(format!(
                "operator expects (n={}, d={}), vector is (n={}, d={})",
                self.n,
                self.d,
                x.algebra_dim(),
                x.rank()
            )));
        }
        ModuleVector::from_flat(self.n, x.flat() * &self.action)
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, d: self.e, e: self.d, action: self.action.adjoint() }
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.n != self.n || inner.e != self.d {
            return Err(GFrameError::DimensionMismatch(format!(
                "cannot compose (n={}, {}->{}) after (n={}, {}->{})",
                self.n, self.d, self.e, inner.n, inner.d, inner.e
            )));
        }
        Ok(Self { n: self.n, d: inner.d, e: self.e, action: &inner.action * &self.action })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.with_action(&self.action + &other.action))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.with_action(&self.action - &other.action))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.with_action(linalg::scale(&self.action, s))
    }

    /// Operator norm: the largest singular value of the action.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.action)
    }

    /// `‖T − T*‖`, zero for self-adjoint operators.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        linalg::hermitian_residual(&self.action)
    }

    /// Eigenvalues of the self-adjoint part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues(&self.action)
    }

    /// Positivity `⟨Tx, x⟩ ≥ 0` for all `x`, which for right-action operators
    /// is positivity of the action matrix.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_square() && linalg::is_psd(&self.action, tol)
    }

    /// `self ⪯ other` in the Loewner order on `End*(U)`.
    pub fn loewner_leq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(other.checked_sub(self)?.is_positive(tol))
    }

    /// `⟨Tx, Tx⟩ ⪯ ‖T‖²⟨x, x⟩`.
    pub fn lemma1_check(&self, x: &ModuleVector) -> Result<bool> {
        let tx = self.apply(x)?;
        let norm = self.norm();
        let lhs = tx.inner(&tx)?;
        let rhs = x.inner(x)?.scale(norm * norm);
        lhs.loewner_leq(&rhs, DEFAULT_TOL)
    }

    /// Returns `(m > tol, m)` where `m` is the best constant in
    /// `‖Tx‖ ≥ m‖x‖`, i.e. the smallest singular value of the action (zero
    /// when the domain is larger than the codomain).
    pub fn bounded_below(&self, tol: f64) -> (bool, f64) {
        let m = linalg::row_lower_bound(&self.action);
        (m > tol, m)
    }

    /// Constant for the inner-product form `⟨Tx, Tx⟩ ⪰ m′⟨x, x⟩`; reported
    /// as `m²` of [`Self::bounded_below`].
    pub fn inner_lower_constant(&self) -> f64 {
        let m = linalg::row_lower_bound(&self.action);
        m * m
    }

    /// Surjectivity, decided as `T*` bounded below with threshold
    /// `tol·max(1, ‖T‖)`.
    pub fn is_surjective(&self, tol: f64) -> bool {
        let threshold = tol * self.norm().max(1.0);
        self.adjoint().bounded_below(threshold).0
    }

    /// For surjective `T`: `‖(TT*)⁻¹‖⁻¹·I ⪯ TT* ⪯ ‖T‖²·I`.
    pub fn lemma3_check(&self) -> Result<bool> {
        let (ok, min_singular) = self.adjoint().bounded_below(SURJECTIVITY_TOL * self.norm().max(1.0));
        if !ok {
            return Err(GFrameError::NotSurjective { min_singular, tol: SURJECTIVITY_TOL });
        }
        let tt = self.compose(&self.adjoint())?;
        let inv = PositiveInvertibleOperator::new(&tt, DEFAULT_TOL)?;
        let lower = 1.0 / inv.inverse().norm();
        let norm = self.norm();
        let id = Self::identity(self.n, self.e);
        Ok(id.scale(lower).loewner_leq(&tt, DEFAULT_TOL)? && tt.loewner_leq(&id.scale(norm * norm), DEFAULT_TOL)?)
    }

    /// `‖ST − TS‖`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        if !self.is_square() {
            return Err(GFrameError::DimensionMismatch("commutator needs square operators".into()));
        }
        self.check_same_shape(other)?;
        let st = self.compose(other)?;
        let ts = other.compose(self)?;
        Ok(st.checked_sub(&ts)?.norm())
    }

    /// General inverse by solving against the identity; returns the inverse
    /// and the 2-norm condition number.
    pub fn inverse(&self) -> Result<(Self, f64)> {
        if !self.is_square() {
            return Err(GFrameError::DimensionMismatch("only square operators are invertible".into()));
        }
        let sv = linalg::singular_values(&self.action);
        let (hi, lo) = (sv[0], sv[sv.len() - 1]);
        let inv = self
            .action
            .clone()
            .try_inverse()
            .filter(|_| lo > 0.0)
            .ok_or_else(|| GFrameError::PreconditionViolated("operator is singular".into()))?;
        Ok((self.with_action(inv), hi / lo))
    }

    fn with_action(&self, action: CMat) -> Self {
        Self { n: self.n, d: self.d, e: self.e, action }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.n, self.d, self.e) != (other.n, other.d, other.e) {
            return Err(GFrameError::DimensionMismatch(format!(
                "operators (n={}, {}->{}) and (n={}, {}->{})",
                self.n, self.d, self.e, other.n, other.d, other.e
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleOperatorJson {
    n: usize,
    d: usize,
    e: usize,
    #[serde(with = "crate::io::matrix_serde")]
    action: CMat,
}

impl Serialize for ModuleOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleOperatorJson { n: self.n, d: self.d, e: self.e, action: self.action.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ModuleOperatorJson::deserialize(d)?;
        Self::new(raw.n, raw.d, raw.e, raw.action).map_err(serde::de::Error::custom)
    }
}

/// A member of `GL⁺(U)` with its square root and inverse computed once from
/// a Hermitian eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveInvertibleOperator {
    base: ModuleOperator,
    sqrt: ModuleOperator,
    inverse: ModuleOperator,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl PositiveInvertibleOperator {
    /// Certifies `m` as Hermitian and positive definite, both relative to
    /// `tol`, and caches `m^{1/2}` and `m⁻¹`.
    pub fn new(m: &ModuleOperator, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(GFrameError::DimensionMismatch("positive operator must be square".into()));
        }
        let norm = m.norm();
        let residual = m.hermitian_residual();
        if residual > tol * norm.max(1.0) {
            return Err(GFrameError::NotHermitian { residual, tol });
        }
        let (values, vectors) = linalg::eigh(m.action());
        let min_eigenvalue = values[0];
        let max_eigenvalue = values[values.len() - 1];
        let threshold = tol * norm;
        if min_eigenvalue.is_nan() || min_eigenvalue <= threshold {
            return Err(GFrameError::NotPositiveDefinite { min_eigenvalue, threshold });
        }
        let map = |f: &dyn Fn(f64) -> f64| {
            let mut scaled = vectors.clone();
            for (j, &l) in values.iter().enumerate() {
                let s = num_complex::Complex64::new(f(l), 0.0);
                scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
            }
            m.with_action(scaled * vectors.adjoint())
        };
        Ok(Self {
            base: m.with_action(linalg::hermitian_part(m.action())),
            sqrt: map(&|l| l.sqrt()),
            inverse: map(&|l| 1.0 / l),
            min_eigenvalue,
            max_eigenvalue,
        })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        let id = ModuleOperator::identity(n, d);
        Self { base: id.clone(), sqrt: id.clone(), inverse: id, min_eigenvalue: 1.0, max_eigenvalue: 1.0 }
    }

    pub fn base(&self) -> &ModuleOperator {
        &self.base
    }

    pub fn sqrt(&self) -> &ModuleOperator {
        &self.sqrt
    }

    pub fn inverse(&self) -> &ModuleOperator {
        &self.inverse
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// `‖C‖ = λmax`.
    pub fn norm(&self) -> f64 {
        self.max_eigenvalue
    }

    /// `‖C⁻¹‖ = 1/λmin`.
    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.min_eigenvalue
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(rows, cols, |_, _| {
            Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
        })
    }

    fn random_op(n: usize, d: usize, e: usize, rng: &mut ChaCha8Rng) -> ModuleOperator {
        ModuleOperator::new(n, d, e, gaussian(d * n, e * n, rng)).unwrap()
    }

    fn random_vec(n: usize, d: usize, rng: &mut ChaCha8Rng) -> ModuleVector {
        ModuleVector::from_flat(n, gaussian(n, d * n, rng)).unwrap()
    }

    fn real_op(n: usize, d: usize, e: usize, rows: &[&[f64]]) -> ModuleOperator {
        let m = CMat::from_fn(d * n, e * n, |i, j| Complex64::new(rows[i][j], 0.0));
        ModuleOperator::new(n, d, e, m).unwrap()
    }

    /// `(Tx)_j = Σᵢ xᵢ·M_{ij}` evaluated block by block.
    fn apply_oracle(t: &ModuleOperator, x: &ModuleVector) -> Vec<crate::AlgebraElement> {
        let n = t.algebra_dim();
        (0..t.codomain_rank())
            .map(|j| {
                let mut acc = CMat::zeros(n, n);
                for (i, xi) in x.blocks().iter().enumerate() {
                    let block = t.action().view((i * n, j * n), (n, n));
                    acc += xi.matrix() * block;
                }
                crate::AlgebraElement::from_matrix(acc).unwrap()
            })
            .collect()
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_vec(2, 3, &mut rng);
        assert_eq!(ModuleOperator::identity(2, 3).apply(&x).unwrap(), x);
        assert!(ModuleOperator::zeros(2, 3, 2).apply(&x).unwrap().is_zero());
        let t = random_op(2, 3, 2, &mut rng);
        let tx = t.apply(&x).unwrap();
        for (got, want) in tx.blocks().iter().zip(apply_oracle(&t, &x)) {
            assert!((got - &want).norm() <= 1e-12 * want.norm().max(1.0));
        }
        assert!(t.apply(&random_vec(2, 2, &mut rng)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let diag = real_op(1, 2, 2, &[&[2.0, 0.0], &[0.0, 5.0]]);
        assert_eq!(diag.adjoint(), diag);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = random_op(2, 3, 2, &mut rng);
        assert_eq!(t.adjoint().adjoint(), t);
        let x = random_vec(2, 3, &mut rng);
        let y = random_vec(2, 2, &mut rng);
        let lhs = t.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&t.adjoint().apply(&y).unwrap()).unwrap();
        let scale = t.norm() * x.norm() * y.norm();
        assert!((&lhs - &rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn compose_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let t = random_op(2, 3, 2, &mut rng);
        let s = random_op(2, 2, 4, &mut rng);
        let r = random_op(2, 4, 1, &mut rng);
        assert_eq!(ModuleOperator::identity(2, 2).compose(&t).unwrap(), t);
        let st = s.compose(&t).unwrap();
        let lhs = st.adjoint();
        let rhs = t.adjoint().compose(&s.adjoint()).unwrap();
        assert!(lhs.checked_sub(&rhs).unwrap().norm() <= 1e-12 * st.norm());
        let x = random_vec(2, 3, &mut rng);
        let direct = s.apply(&t.apply(&x).unwrap()).unwrap();
        assert!(st.apply(&x).unwrap().checked_sub(&direct).unwrap().norm() <= 1e-12 * direct.norm().max(1.0));
        let a = r.compose(&s).unwrap().compose(&t).unwrap();
        let b = r.compose(&s.compose(&t).unwrap()).unwrap();
        assert!(a.checked_sub(&b).unwrap().norm() <= 1e-12 * a.norm());
        assert!(t.compose(&s).is_err());
    }

    #[test]
    fn norm_examples() {
        assert!((ModuleOperator::identity(2, 2).scale(3.0).norm() - 3.0).abs() < 1e-14);
        assert_eq!(ModuleOperator::zeros(2, 2, 3).norm(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let t = random_op(2, 3, 2, &mut rng);
        let bound = t.norm() + 1e-10;
        for _ in 0..1000 {
            let x = random_vec(2, 3, &mut rng);
            assert!(t.apply(&x).unwrap().norm() <= bound * x.norm());
        }
    }

    #[test]
    fn lemma1_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let x = random_vec(2, 3, &mut rng);
        assert!(ModuleOperator::identity(2, 3).lemma1_check(&x).unwrap());
        assert!(ModuleOperator::zeros(2, 3, 3).lemma1_check(&x).unwrap());
        for _ in 0..1000 {
            let t = random_op(2, 3, 2, &mut rng);
            let x = random_vec(2, 3, &mut rng);
            assert!(t.lemma1_check(&x).unwrap());
        }
    }

    #[test]
    fn bounded_below_examples() {
        assert_eq!(ModuleOperator::identity(2, 2).bounded_below(1e-8), (true, 1.0));
        let degenerate = real_op(1, 2, 2, &[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(degenerate.bounded_below(1e-8), (false, 0.0));
        // wider domain than codomain has a kernel
        assert_eq!(real_op(1, 2, 1, &[&[1.0], &[1.0]]).bounded_below(1e-8), (false, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let t = random_op(2, 2, 2, &mut rng);
        let (ok, m) = t.bounded_below(1e-8);
        assert!(ok);
        let gram = t.compose(&t.adjoint()).unwrap(); // action M·M*
        let oracle = linalg::eigenvalues(gram.action())[0].sqrt();
        assert!((m - oracle).abs() <= 1e-10 * oracle.max(1.0));
        assert!((t.inner_lower_constant() - m * m).abs() < 1e-12);
    }

    #[test]
    fn lemma3_examples() {
        let row_map = real_op(1, 2, 1, &[&[1.0], &[1.0]]);
        assert!(row_map.is_surjective(SURJECTIVITY_TOL));
        assert!(row_map.lemma3_check().unwrap());
        assert!(ModuleOperator::identity(2, 2).lemma3_check().unwrap());
        let not_onto = real_op(1, 1, 2, &[&[1.0, 1.0]]);
        assert!(matches!(not_onto.lemma3_check(), Err(GFrameError::NotSurjective { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut checked = 0;
        while checked < 500 {
            let t = random_op(2, 3, 2, &mut rng);
            if t.is_surjective(SURJECTIVITY_TOL) {
                assert!(t.lemma3_check().unwrap());
                checked += 1;
            }
        }
    }

    #[test]
    fn positive_invertible_examples() {
        let id = PositiveInvertibleOperator::new(&ModuleOperator::identity(2, 2), DEFAULT_TOL).unwrap();
        assert!(id.sqrt().checked_sub(&ModuleOperator::identity(2, 2)).unwrap().norm() < 1e-14);
        assert!(id.inverse().checked_sub(&ModuleOperator::identity(2, 2)).unwrap().norm() < 1e-14);
        assert!((id.condition_number() - 1.0).abs() < 1e-14);

        let d = PositiveInvertibleOperator::new(&real_op(1, 2, 2, &[&[4.0, 0.0], &[0.0, 1.0]]), DEFAULT_TOL).unwrap();
        assert!(d.sqrt().checked_sub(&real_op(1, 2, 2, &[&[2.0, 0.0], &[0.0, 1.0]])).unwrap().norm() < 1e-14);
        assert!(d.inverse().checked_sub(&real_op(1, 2, 2, &[&[0.25, 0.0], &[0.0, 1.0]])).unwrap().norm() < 1e-14);
        assert!((d.condition_number() - 4.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let b = random_op(2, 3, 3, &mut rng);
        let m = b
            .adjoint()
            .compose(&b)
            .unwrap()
            .checked_add(&ModuleOperator::identity(2, 3).scale(0.1))
            .unwrap();
        let p = PositiveInvertibleOperator::new(&m, DEFAULT_TOL).unwrap();
        let sq = p.sqrt().compose(p.sqrt()).unwrap();
        assert!(sq.checked_sub(&m).unwrap().norm() <= 1e-9 * m.norm());
        let id3 = ModuleOperator::identity(2, 3);
        assert!(p.inverse().compose(&m).unwrap().checked_sub(&id3).unwrap().norm() <= 1e-9);
        assert!(p.sqrt().commutator_norm(p.base()).unwrap() <= 1e-10 * m.norm());
        assert!(id3.scale(p.min_eigenvalue()).loewner_leq(p.base(), 1e-9).unwrap());
        assert!(p.base().loewner_leq(&id3.scale(p.max_eigenvalue()), 1e-9).unwrap());

        let skew = real_op(1, 2, 2, &[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(PositiveInvertibleOperator::new(&skew, DEFAULT_TOL), Err(GFrameError::NotHermitian { .. })));
        let indefinite = real_op(1, 2, 2, &[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            PositiveInvertibleOperator::new(&indefinite, DEFAULT_TOL),
            Err(GFrameError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn general_inverse_reports_condition() {
        let t = real_op(1, 2, 2, &[&[2.0, 1.0], &[0.0, 1.0]]);
        let (inv, cond) = t.inverse().unwrap();
        let id = ModuleOperator::identity(1, 2);
        assert!(inv.compose(&t).unwrap().checked_sub(&id).unwrap().norm() < 1e-14);
        assert!(cond > 1.0);
        assert!(real_op(1, 2, 2, &[&[1.0, 1.0], &[1.0, 1.0]]).inverse().is_err());
    }

    #[test]
    fn commutator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let t = random_op(2, 2, 2, &mut rng);
        assert_eq!(ModuleOperator::identity(2, 2).commutator_norm(&t).unwrap(), 0.0);
        let diag = real_op(1, 2, 2, &[&[1.0, 0.0], &[0.0, 2.0]]);
        let off = real_op(1, 2, 2, &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(diag.commutator_norm(&off).unwrap() > 0.5);
        // polynomials in t commute with each other
        let t2 = t.compose(&t).unwrap();
        let p = t2.checked_add(&t.scale(3.0)).unwrap();
        let q = t2.compose(&t).unwrap().checked_sub(&t.scale(2.0)).unwrap();
        assert!(p.commutator_norm(&q).unwrap() <= 1e-11 * p.norm() * q.norm());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_op(2, 3, 1, &mut rng);
        let back: ModuleOperator = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"n":1,"d":2,"e":1,"action":[[[1,0]]]}"#;
        assert!(serde_json::from_str::<ModuleOperator>(bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn adjoint_identity_and_submultiplicativity(seed in any::<u64>(), n in 1usize..3, d in 1usize..4, e in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_op(n, d, e, &mut rng);
            let s = random_op(n, e, d, &mut rng);
            let x = random_vec(n, d, &mut rng);
            let y = random_vec(n, e, &mut rng);
            let lhs = t.apply(&x).unwrap().inner(&y).unwrap();
            let rhs = x.inner(&t.adjoint().apply(&y).unwrap()).unwrap();
            prop_assert!((&lhs - &rhs).norm() <= 1e-12 * (t.norm() * x.norm() * y.norm()).max(1.0));
            prop_assert!(s.compose(&t).unwrap().norm() <= s.norm() * t.norm() + 1e-10);
        }
    }
}
