//! Seeded scenario construction for property testing.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, stream)`.
//! The stream id is `(purpose << 32) | point`, so each measure point and
//! each kind of draw has its own independent sequence.

use std::ops::RangeInclusive;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::controlled::{ControlPair, ControlledScenario};
use crate::error::{GFrameError, Result};
use crate::frames::{GFrameFamily, MeasurePoint};
use crate::linalg::{self, CMat};
use crate::module_space::ModuleVector;
use crate::operators::{ModuleOperator, PositiveInvertibleOperator};
use crate::DEFAULT_TOL;

const BASIS: u64 = 0;
const SKELETON: u64 = 1;
const ISOMETRY: u64 = 2;
const LAMBDA: u64 = 3;
const GAMMA: u64 = 4;
const CONTROLS: u64 = 5;
const NULL_DIRECTION: u64 = 6;
const VECTORS: u64 = 7;

fn stream_id(purpose: u64, point: usize) -> u64 {
    (purpose << 32) | point as u64
}

/// Tolerance at which generated controls are certified to commute.
pub const GENERATOR_COMMUTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Independent complex Gaussian `Λ_w`, identity controls.
    Generic,
    /// `Λ_w*Λ_w`, `C` and `C′` share one eigenbasis.
    Commuting,
    /// Generic family normalized so that `S = I`.
    Parseval,
    /// Commuting family with a common null direction, so `λmin(S) = 0`.
    BesselOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    #[serde(default = "default_dw_range")]
    pub dw_range: [usize; 2],
    #[serde(default = "default_spectrum_range")]
    pub spectrum_range: [f64; 2],
    pub flavor: Flavor,
}

fn default_dw_range() -> [usize; 2] {
    [1, 3]
}

fn default_spectrum_range() -> [f64; 2] {
    [0.5, 2.0]
}

impl GeneratorSpec {
    pub fn new(seed: u64, n: usize, d: usize, m: usize, flavor: Flavor) -> Self {
        Self {
            seed,
            n,
            d,
            m,
            dw_range: default_dw_range(),
            spectrum_range: default_spectrum_range(),
            flavor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.m == 0 {
            return Err(GFrameError::InvalidSpec(format!(
                "dimensions must be >= 1, got n={}, d={}, m={}",
                self.n, self.d, self.m
            )));
        }
        let [lo, hi] = self.dw_range;
        if lo == 0 || lo > hi {
            return Err(GFrameError::InvalidSpec(format!("dw_range [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
        }
        let [a, b] = self.spectrum_range;
        if !(a > 0.0 && a <= b && b.is_finite()) {
            return Err(GFrameError::InvalidSpec(format!("spectrum_range [{a}, {b}] must lie in (0, inf)")));
        }
        Ok(())
    }

    fn dw_range(&self) -> RangeInclusive<usize> {
        self.dw_range[0]..=self.dw_range[1]
    }
}

/// The 200-scenario batch used by `verify --default`.
pub fn default_batch() -> Vec<GeneratorSpec> {
    const FLAVORS: [Flavor; 5] =
        [Flavor::Commuting, Flavor::Commuting, Flavor::Generic, Flavor::Parseval, Flavor::BesselOnly];
    (0..200u64)
        .map(|i| {
            let k = i as usize;
            GeneratorSpec::new(i, 1 + k % 3, 1 + (k / 3) % 6, 1 + (k / 7) % 8, FLAVORS[k % 5])
        })
        .collect()
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix
/// with the diagonal phases of `R` removed.
pub(crate) fn random_unitary(k: usize, rng: &mut ChaCha8Rng) -> CMat {
    let qr = gaussian_matrix(k, k, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..k {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

pub fn random_vector(n: usize, d: usize, rng: &mut ChaCha8Rng) -> ModuleVector {
    ModuleVector::from_flat(n, gaussian_matrix(n, d * n, rng)).expect("gaussian entries are finite")
}

/// `count` vectors from the dedicated sampling stream of `seed`.
pub fn random_vectors(n: usize, d: usize, count: usize, seed: u64) -> Vec<ModuleVector> {
    let mut rng = stream_rng(seed, stream_id(VECTORS, 0));
    (0..count).map(|_| random_vector(n, d, &mut rng)).collect()
}

/// `W·diag(values)·W*`.
fn in_basis(w: &CMat, values: &[f64]) -> CMat {
    let diag = DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)));
    w * CMat::from_diagonal(&diag) * w.adjoint()
}

struct Skeleton {
    weights: Vec<f64>,
    dws: Vec<usize>,
}

fn draw_skeleton(spec: &GeneratorSpec) -> Skeleton {
    let mut weights = Vec::with_capacity(spec.m);
    let mut dws = Vec::with_capacity(spec.m);
    for w in 0..spec.m {
        let mut rng = stream_rng(spec.seed, stream_id(SKELETON, w));
        weights.push(rng.random_range(0.5..1.5));
        dws.push(rng.random_range(spec.dw_range()));
    }
    Skeleton { weights, dws }
}

/// Shared-eigenbasis construction `Λ_w = (W·Σ_w·A_w*)` in right-action form.
struct CommutingBasis {
    w: CMat,
    isometries: Vec<CMat>,
    /// `(row, column)` positions of the nonzero singular values of each point.
    patterns: Vec<Vec<(usize, usize)>>,
}

impl CommutingBasis {
    fn draw(spec: &GeneratorSpec, skel: &Skeleton) -> Self {
        let k = spec.d * spec.n;
        let w = random_unitary(k, &mut stream_rng(spec.seed, stream_id(BASIS, 0)));
        let mut offset = 0;
        let mut isometries = Vec::with_capacity(spec.m);
        let mut patterns = Vec::with_capacity(spec.m);
        for (idx, &dw) in skel.dws.iter().enumerate() {
            let cols = dw * spec.n;
            isometries.push(random_unitary(cols, &mut stream_rng(spec.seed, stream_id(ISOMETRY, idx))));
            let count = cols.min(k);
            patterns.push((0..count).map(|c| ((offset + c) % k, c)).collect());
            offset = (offset + count) % k;
        }
        Self { w, isometries, patterns }
    }

    fn family(
        &self,
        spec: &GeneratorSpec,
        skel: &Skeleton,
        purpose: u64,
        null_row: Option<usize>,
    ) -> Result<GFrameFamily> {
        let k = spec.d * spec.n;
        let mut points = Vec::with_capacity(spec.m);
        for (idx, (&dw, &weight)) in skel.dws.iter().zip(&skel.weights).enumerate() {
            let mut rng = stream_rng(spec.seed, stream_id(purpose, idx));
            let cols = dw * spec.n;
            let mut sigma = CMat::zeros(k, cols);
            for &(r, c) in &self.patterns[idx] {
                let s: f64 = rng.random_range(0.25..1.5);
                if Some(r) != null_row {
                    sigma[(r, c)] = Complex64::new(s, 0.0);
                }
            }
            let action = &self.w * sigma * self.isometries[idx].adjoint();
            points.push(MeasurePoint { weight, lambda: ModuleOperator::new(spec.n, spec.d, dw, action)? });
        }
        GFrameFamily::new(spec.n, spec.d, points)
    }

    fn controls(&self, spec: &GeneratorSpec) -> Result<(PositiveInvertibleOperator, PositiveInvertibleOperator)> {
        let k = spec.d * spec.n;
        let mut rng = stream_rng(spec.seed, stream_id(CONTROLS, 0));
        let [lo, hi] = spec.spectrum_range;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..k).map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo }).collect()
        };
        let c = draw(&mut rng);
        let cp = draw(&mut rng);
        let as_op = |vals: &[f64]| -> Result<PositiveInvertibleOperator> {
            let op = ModuleOperator::new(spec.n, spec.d, spec.d, in_basis(&self.w, vals))?;
            PositiveInvertibleOperator::new(&op, DEFAULT_TOL)
        };
        Ok((as_op(&c)?, as_op(&cp)?))
    }

    fn null_row(spec: &GeneratorSpec) -> usize {
        let mut rng = stream_rng(spec.seed, stream_id(NULL_DIRECTION, 0));
        rng.random_range(0..spec.d * spec.n)
    }
}

fn gaussian_family(spec: &GeneratorSpec, dws: &[usize], weights: &[f64], purpose: u64) -> Result<GFrameFamily> {
    let k = spec.d * spec.n;
    let mut points = Vec::with_capacity(spec.m);
    for (idx, (&dw, &weight)) in dws.iter().zip(weights).enumerate() {
        let mut rng = stream_rng(spec.seed, stream_id(purpose, idx));
        let scale = 1.0 / (k as f64).sqrt();
        let action = linalg::scale(&gaussian_matrix(k, dw * spec.n, &mut rng), scale);
        points.push(MeasurePoint { weight, lambda: ModuleOperator::new(spec.n, spec.d, dw, action)? });
    }
    GFrameFamily::new(spec.n, spec.d, points)
}

/// Raises codomain ranks, in point order, until `Σ d_w ≥ d`. If the whole
/// range cannot reach `d`, the first point absorbs the deficit.
fn ensure_total_rank(spec: &GeneratorSpec, dws: &mut [usize]) {
    let target = spec.dw_range[1];
    for i in 0..dws.len() {
        if dws.iter().sum::<usize>() >= spec.d {
            return;
        }
        dws[i] = target.max(dws[i]);
    }
    let total: usize = dws.iter().sum();
    if total < spec.d {
        dws[0] += spec.d - total;
    }
}

fn normalize_parseval(family: &GFrameFamily) -> Result<GFrameFamily> {
    let s = PositiveInvertibleOperator::new(&family.frame_operator(), DEFAULT_TOL)
        .map_err(|e| GFrameError::InvalidSpec(format!("parseval normalization needs a frame: {e}")))?;
    let inv_sqrt = PositiveInvertibleOperator::new(s.inverse(), DEFAULT_TOL)?.sqrt().clone();
    let points = family
        .points()
        .iter()
        .map(|p| {
            Ok(MeasurePoint { weight: p.weight, lambda: p.lambda.compose(&inv_sqrt)? })
        })
        .collect::<Result<Vec<_>>>()?;
    GFrameFamily::new(family.algebra_dim(), family.module_rank(), points)
}

fn identity_scenario(family: GFrameFamily) -> Result<ControlledScenario> {
    let pair = ControlPair::identity(family.algebra_dim(), family.module_rank());
    ControlledScenario::new(family, pair, GENERATOR_COMMUTATION_TOL)
}

/// Builds the scenario described by `spec`; identical specs give
/// bit-identical scenarios.
pub fn generate(spec: &GeneratorSpec) -> Result<ControlledScenario> {
    Ok(generate_pair(spec)?.0)
}

/// Builds the scenario together with a second family `Γ` on the same
/// measure points. For the shared-basis flavors `Γ` reuses the eigenbasis
/// and isometric factors of `Λ`, so the controls also commute with every
/// `Γ_w*Γ_w` and `Γ_w*Λ_w`.
pub fn generate_pair(spec: &GeneratorSpec) -> Result<(ControlledScenario, GFrameFamily)> {
    spec.validate()?;
    let mut skel = draw_skeleton(spec);
    match spec.flavor {
        Flavor::Generic => {
            let lam = gaussian_family(spec, &skel.dws, &skel.weights, LAMBDA)?;
            let gam = gaussian_family(spec, &skel.dws, &skel.weights, GAMMA)?;
            Ok((identity_scenario(lam)?, gam))
        }
        Flavor::Parseval => {
            ensure_total_rank(spec, &mut skel.dws);
            let raw = gaussian_family(spec, &skel.dws, &skel.weights, LAMBDA)?;
            let gam = gaussian_family(spec, &skel.dws, &skel.weights, GAMMA)?;
            Ok((identity_scenario(normalize_parseval(&raw)?)?, gam))
        }
        Flavor::Commuting | Flavor::BesselOnly => {
            let basis = CommutingBasis::draw(spec, &skel);
            let null_row = (spec.flavor == Flavor::BesselOnly).then(|| CommutingBasis::null_row(spec));
            let lam = basis.family(spec, &skel, LAMBDA, null_row)?;
            let gam = basis.family(spec, &skel, GAMMA, None)?;
            let (c, cp) = basis.controls(spec)?;
            let pair = ControlPair::new(c, cp, GENERATOR_COMMUTATION_TOL)?;
            Ok((ControlledScenario::new(lam, pair, GENERATOR_COMMUTATION_TOL)?, gam))
        }
    }
}
