//! Continuous g-frames over a finite weighted measure space.
//!
//! Integrals over `(Ω, μ)` are finite weighted sums `Σ_w μ_w f(w)`, always
//! accumulated in point order so results do not depend on scheduling.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{GFrameError, Result};
use crate::generators;
use crate::linalg::{self, CMat};
use crate::module_space::ModuleVector;
use crate::operators::ModuleOperator;
use crate::DEFAULT_TOL;

/// Default frame decision threshold, relative to `λmax(S)`.
pub const FRAME_TOL: f64 = 1e-8;

/// One atom `(μ_w, Λ_w)` of the measure space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePoint {
    pub weight: f64,
    pub lambda: ModuleOperator,
}

impl MeasurePoint {
    /// Rank of the target module `V_w`.
    pub fn codomain_rank(&self) -> usize {
        self.lambda.codomain_rank()
    }
}

/// `{Λ_w}_{w∈Ω}` together with the weights of the measure.
#[derive(Debug, Clone, PartialEq)]
pub struct GFrameFamily {
    n: usize,
    d: usize,
    points: Vec<MeasurePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// Requires `0 < lower ≤ upper < ∞`; an inversion of at most `1e-12`
    /// relative is accepted since tight bounds computed along different
    /// paths may differ in the last bits.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper * (1.0 + 1e-12) && upper.is_finite()) {
            return Err(GFrameError::InvalidValue(format!(
                "frame bounds need 0 < lower <= upper < inf, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Frame,
    BesselOnly,
    NotBessel,
}

/// Classification with the spectral extremes that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub kind: FrameKind,
    pub bounds: Option<FrameBounds>,
    /// Tightest upper (Bessel) bound, present whenever the family is Bessel.
    pub bessel_bound: Option<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub threshold: f64,
}

impl FrameVerdict {
    /// Verdict for a positive operator `S` with the frame threshold
    /// `tol·λmax(S)`.
    pub(crate) fn from_operator(s: &ModuleOperator, tol: f64) -> Self {
        let values = s.eigenvalues();
        let min_eigenvalue = values[0];
        let max_eigenvalue = values[values.len() - 1];
        let threshold = tol * max_eigenvalue.max(0.0);
        let (kind, bounds) = if min_eigenvalue > threshold {
            (FrameKind::Frame, Some(FrameBounds { lower: min_eigenvalue, upper: max_eigenvalue }))
        } else {
            (FrameKind::BesselOnly, None)
        };
        Self {
            kind,
            bounds,
            bessel_bound: Some(max_eigenvalue.max(0.0)),
            min_eigenvalue,
            max_eigenvalue,
            threshold,
        }
    }

    pub fn is_frame(&self) -> bool {
        self.kind == FrameKind::Frame
    }
}

impl GFrameFamily {
    pub fn new(n: usize, d: usize, points: Vec<MeasurePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(GFrameError::InvalidValue("family needs at least one measure point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(GFrameError::InvalidValue(format!("points[{i}].weight must be positive, got {}", p.weight)));
            }
            if p.lambda.algebra_dim() != n || p.lambda.domain_rank() != d {
                return Err(GFrameError::DimensionMismatch(format!(
                    "points[{i}].lambda maps (n={}, d={}), family is (n={n}, d={d})",
                    p.lambda.algebra_dim(),
                    p.lambda.domain_rank()
                )));
            }
        }
        Ok(Self { n, d, points })
    }

    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    pub fn module_rank(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[MeasurePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total rank of `⊕_w V_w`.
    pub fn total_codomain_rank(&self) -> usize {
        self.points.iter().map(MeasurePoint::codomain_rank).sum()
    }

    /// `S = Σ_w μ_w Λ_w*Λ_w`.
    pub fn frame_operator(&self) -> ModuleOperator {
        let k = self.d * self.n;
        let mut acc = CMat::zeros(k, k);
        for p in &self.points {
            let m = p.lambda.action();
            acc += linalg::scale(&(m * m.adjoint()), p.weight);
        }
        ModuleOperator::from_parts_unchecked(self.n, self.d, self.d, acc)
    }

    /// `∫ ⟨Λ_w x, Λ_w x⟩ dμ(w)` evaluated point by point.
    pub fn energy(&self, x: &ModuleVector) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zeros(self.n);
        for p in &self.points {
            let y = p.lambda.apply(x)?;
            acc = &acc + &y.inner(&y)?.scale(p.weight);
        }
        Ok(acc)
    }

    pub fn classify(&self, tol: f64) -> FrameVerdict {
        FrameVerdict::from_operator(&self.frame_operator(), tol)
    }

    /// Tightest scalar bounds `λmin(S)`, `λmax(S)`.
    pub fn optimal_bounds(&self) -> Result<FrameBounds> {
        let v = self.classify(FRAME_TOL);
        v.bounds.ok_or(GFrameError::NotAFrame { min_eigenvalue: v.min_eigenvalue, threshold: v.threshold })
    }

    /// Evaluates `A⟨x,x⟩ ⪯ ∫⟨Λ_w x, Λ_w x⟩dμ ⪯ B⟨x,x⟩` on `samples` seeded
    /// random vectors.
    pub fn check_sandwich(&self, lower: f64, upper: f64, samples: usize, seed: u64) -> bool {
        generators::random_vectors(self.n, self.d, samples, seed).iter().all(|x| {
            let energy = self.energy(x).expect("sampled vectors match the family shape");
            let gram = x.inner(x).expect("same shape");
            gram.scale(lower).loewner_leq(&energy, DEFAULT_TOL).unwrap_or(false)
                && energy.loewner_leq(&gram.scale(upper), DEFAULT_TOL).unwrap_or(false)
        })
    }

    pub(crate) fn same_measure(&self, other: &Self) -> Result<()> {
        if (self.n, self.d, self.len()) != (other.n, other.d, other.len()) {
            return Err(GFrameError::MeasureMismatch(format!(
                "families have shapes (n={}, d={}, m={}) and (n={}, d={}, m={})",
                self.n,
                self.d,
                self.len(),
                other.n,
                other.d,
                other.len()
            )));
        }
        for (i, (a, b)) in self.points.iter().zip(&other.points).enumerate() {
            if (a.weight - b.weight).abs() > 1e-12 * a.weight.max(b.weight) {
                return Err(GFrameError::MeasureMismatch(format!(
                    "points[{i}] weights differ: {} vs {}",
                    a.weight, b.weight
                )));
            }
            if a.codomain_rank() != b.codomain_rank() {
                return Err(GFrameError::MeasureMismatch(format!(
                    "points[{i}] codomain ranks differ: {} vs {}",
                    a.codomain_rank(),
                    b.codomain_rank()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    weight: f64,
    dw: usize,
    lambda: ModuleOperator,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    d: usize,
    points: Vec<PointJson>,
}

impl Serialize for GFrameFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            n: self.n,
            d: self.d,
            points: self
                .points
                .iter()
                .map(|p| PointJson { weight: p.weight, dw: p.codomain_rank(), lambda: p.lambda.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GFrameFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = FamilyJson::deserialize(d)?;
        let mut points = Vec::with_capacity(raw.points.len());
        for (i, p) in raw.points.into_iter().enumerate() {
            if p.lambda.codomain_rank() != p.dw {
                return Err(D::Error::custom(format!("points[{i}].dw = {} but lambda maps to rank {}", p.dw, p.lambda.codomain_rank())));
            }
            points.push(MeasurePoint { weight: p.weight, lambda: p.lambda });
        }
        Self::new(raw.n, raw.d, points).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, Flavor, GeneratorSpec};
    use nalgebra::DVector;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_op(v: f64) -> ModuleOperator {
        ModuleOperator::new(1, 1, 1, CMat::from_element(1, 1, Complex64::new(v, 0.0))).unwrap()
    }

    fn point(weight: f64, lambda: ModuleOperator) -> MeasurePoint {
        MeasurePoint { weight, lambda }
    }

    fn random_family(n: usize, d: usize, m: usize, seed: u64) -> GFrameFamily {
        generators::generate(&GeneratorSpec::new(seed, n, d, m, Flavor::Generic)).unwrap().family().clone()
    }

    /// `Σ μ_w Λ_w* ∘ Λ_w` through operator composition, one point at a time.
    fn naive_frame_operator(f: &GFrameFamily) -> ModuleOperator {
        let (n, d) = (f.algebra_dim(), f.module_rank());
        f.points().iter().fold(ModuleOperator::zeros(n, d, d), |acc, p| {
            let term = p.lambda.adjoint().compose(&p.lambda).unwrap().scale(p.weight);
            acc.checked_add(&term).unwrap()
        })
    }

    /// `v ↦ Σ μ_w M_w M_w* v` without forming `S`.
    fn apply_energy(f: &GFrameFamily, v: &DVector<Complex64>) -> DVector<Complex64> {
        f.points().iter().fold(DVector::zeros(v.len()), |acc, p| {
            let m = p.lambda.action();
            acc + (m * (m.adjoint() * v)) * Complex64::new(p.weight, 0.0)
        })
    }

    fn rayleigh(f: &GFrameFamily, v: &DVector<Complex64>) -> f64 {
        v.dotc(&apply_energy(f, v)).re / v.norm_squared()
    }

    /// Extremal Rayleigh quotients: best of `samples` random vectors, then
    /// polished by (shifted) power iteration.
    fn rayleigh_extremes(f: &GFrameFamily, samples: usize) -> (f64, f64) {
        let k = f.algebra_dim() * f.module_rank();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let candidates: Vec<_> = (0..samples)
            .map(|_| DVector::from_iterator(k, generators::gaussian_matrix(k, 1, &mut rng).iter().copied()))
            .collect();
        let by = |sign: f64| {
            candidates
                .iter()
                .max_by(|a, b| (sign * rayleigh(f, a)).total_cmp(&(sign * rayleigh(f, b))))
                .unwrap()
                .clone()
        };
        let mut hi = by(1.0);
        for _ in 0..20_000 {
            let w = apply_energy(f, &hi);
            hi = &w / Complex64::new(w.norm(), 0.0);
        }
        let top = rayleigh(f, &hi);
        let shift = top * 1.01;
        let mut lo = by(-1.0);
        for _ in 0..20_000 {
            let w = &lo * Complex64::new(shift, 0.0) - apply_energy(f, &lo);
            lo = &w / Complex64::new(w.norm(), 0.0);
        }
        (rayleigh(f, &lo), top)
    }

    fn parseval_identity(n: usize, d: usize) -> GFrameFamily {
        GFrameFamily::new(n, d, vec![point(1.0, ModuleOperator::identity(n, d))]).unwrap()
    }

    #[test]
    fn frame_operator_examples() {
        let two = GFrameFamily::new(1, 1, vec![point(1.0, scalar_op(1.0)), point(1.0, scalar_op(1.0))]).unwrap();
        assert_eq!(two.frame_operator(), scalar_op(2.0));
        assert_eq!(parseval_identity(2, 2).frame_operator(), ModuleOperator::identity(2, 2));

        let f = random_family(2, 3, 5, 17);
        let s = f.frame_operator();
        let oracle = naive_frame_operator(&f);
        assert!(s.checked_sub(&oracle).unwrap().norm() <= 1e-12 * oracle.norm());
        assert!(s.hermitian_residual() <= 1e-11 * s.norm());
        assert!(s.is_positive(1e-10));
    }

    #[test]
    fn optimal_bounds_examples() {
        let two = GFrameFamily::new(1, 1, vec![point(1.0, scalar_op(1.0)), point(1.0, scalar_op(1.0))]).unwrap();
        let b = two.optimal_bounds().unwrap();
        assert!((b.lower - 2.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
        let p = parseval_identity(2, 3).optimal_bounds().unwrap();
        assert!((p.lower - 1.0).abs() < 1e-14 && (p.upper - 1.0).abs() < 1e-14);

        for seed in [1, 2, 3] {
            let f = random_family(2, 2, 4, seed);
            let b = f.optimal_bounds().unwrap();
            let (lo, hi) = rayleigh_extremes(&f, 10_000);
            assert!((b.lower - lo).abs() <= 1e-6, "seed {seed}: {} vs {lo}", b.lower);
            assert!((b.upper - hi).abs() <= 1e-6, "seed {seed}: {} vs {hi}", b.upper);
        }
    }

    #[test]
    fn classify_examples() {
        let v = parseval_identity(2, 2).classify(FRAME_TOL);
        assert_eq!(v.kind, FrameKind::Frame);
        let b = v.bounds.unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);

        // every Λ_w kills the second generator
        let kill = CMat::from_fn(2, 2, |i, j| if i == 0 && j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let lam = ModuleOperator::new(1, 2, 2, kill).unwrap();
        let f = GFrameFamily::new(1, 2, vec![point(1.0, lam.clone()), point(0.5, lam)]).unwrap();
        let v = f.classify(FRAME_TOL);
        assert_eq!(v.kind, FrameKind::BesselOnly);
        assert!(v.bounds.is_none());
        assert!(matches!(f.optimal_bounds(), Err(GFrameError::NotAFrame { .. })));

        let f = random_family(2, 3, 4, 5);
        let v = f.classify(FRAME_TOL);
        assert!(v.is_frame());
        let b = v.bounds.unwrap();
        assert!(f.check_sandwich(b.lower, b.upper, 200, 5));
    }

    #[test]
    fn sandwich_examples() {
        let p = parseval_identity(2, 2);
        assert!(p.check_sandwich(1.0, 1.0, 50, 1));
        assert!(!p.check_sandwich(2.0, 2.0, 50, 1));

        let f = random_family(2, 1, 3, 8);
        let b = f.optimal_bounds().unwrap();
        assert!(f.check_sandwich(b.lower, b.upper, 100, 8));
        assert!(!f.check_sandwich(b.lower * 1.01, b.upper, 100, 8));
        assert!(!f.check_sandwich(b.lower, b.upper * 0.99, 100, 8));
    }

    #[test]
    fn norm_form_bounds_hold_on_samples() {
        let f = random_family(2, 3, 6, 12);
        let b = f.optimal_bounds().unwrap();
        for x in generators::random_vectors(2, 3, 200, 12) {
            let energy = f.energy(&x).unwrap().norm();
            let nx = x.norm() * x.norm();
            assert!(b.lower * nx <= energy + 1e-9 * energy.max(1.0));
            assert!(energy <= b.upper * nx + 1e-9 * energy.max(1.0));
        }
    }

    #[test]
    fn classify_invariant_under_permutation_and_splitting() {
        let f = random_family(2, 2, 4, 21);
        let base = f.classify(FRAME_TOL);
        let mut reversed = f.points().to_vec();
        reversed.reverse();
        let permuted = GFrameFamily::new(2, 2, reversed).unwrap().classify(FRAME_TOL);
        let mut split = f.points().to_vec();
        let first = split.remove(0);
        split.push(MeasurePoint { weight: first.weight / 2.0, lambda: first.lambda.clone() });
        split.push(MeasurePoint { weight: first.weight / 2.0, lambda: first.lambda });
        let split = GFrameFamily::new(2, 2, split).unwrap().classify(FRAME_TOL);
        for other in [permuted, split] {
            assert_eq!(other.kind, base.kind);
            assert!((other.min_eigenvalue - base.min_eigenvalue).abs() <= 1e-12);
            assert!((other.max_eigenvalue - base.max_eigenvalue).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_families() {
        assert!(GFrameFamily::new(1, 1, vec![]).is_err());
        assert!(GFrameFamily::new(1, 1, vec![point(0.0, scalar_op(1.0))]).is_err());
        assert!(GFrameFamily::new(1, 1, vec![point(-1.0, scalar_op(1.0))]).is_err());
        assert!(GFrameFamily::new(2, 1, vec![point(1.0, scalar_op(1.0))]).is_err());
        assert!(FrameBounds::new(2.0, 1.0).is_err());
        assert!(FrameBounds::new(0.0, 1.0).is_err());
    }

    #[test]
    fn json_round_trip_checks_dw() {
        let f = random_family(1, 2, 3, 4);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<GFrameFamily>(&text).unwrap(), f);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["points"][0]["dw"] = serde_json::json!(17);
        assert!(serde_json::from_value::<GFrameFamily>(v).is_err());
    }
}
