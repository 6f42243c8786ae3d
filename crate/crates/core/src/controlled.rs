//! (C−C′)-controlled continuous g-frames.
//!
//! Every operation here assumes the standing hypothesis that `C` and `C′`
//! commute with each other and with each `Λ_w*Λ_w`. A [`ControlledScenario`]
//! carries the measured [`CommutationReport`] and refuses to compute
//! controlled quantities when it failed.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::error::{GFrameError, Result};
use crate::frames::{FrameBounds, FrameVerdict, GFrameFamily, FRAME_TOL};
use crate::linalg::{self, CMat};
use crate::module_space::ModuleVector;
use crate::operators::{ModuleOperator, PositiveInvertibleOperator, SURJECTIVITY_TOL};
use crate::DEFAULT_TOL;

/// Controls `C, C′ ∈ GL⁺(U)` with the shared square root `(CC′)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPair {
    c: PositiveInvertibleOperator,
    cp: PositiveInvertibleOperator,
    product_sqrt: ModuleOperator,
}

impl ControlPair {
    /// Fails with [`GFrameError::CommutationViolated`] when
    /// `‖[C, C′]‖ > tol·max(1, ‖C‖‖C′‖)`; only then is `CC′` positive and
    /// `(CC′)^{1/2} = (C′C)^{1/2}`.
    pub fn new(c: PositiveInvertibleOperator, cp: PositiveInvertibleOperator, tol: f64) -> Result<Self> {
        let commutator = c.base().commutator_norm(cp.base())?;
        let scale = (c.norm() * cp.norm()).max(1.0);
        if commutator > tol * scale {
            return Err(GFrameError::CommutationViolated(format!(
                "controls do not commute: ||[C, C']|| = {commutator:e}"
            )));
        }
        let product = c.base().compose(cp.base())?;
        let product = PositiveInvertibleOperator::new(&product, DEFAULT_TOL)?;
        Ok(Self { product_sqrt: product.sqrt().clone(), c, cp })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        let id = PositiveInvertibleOperator::identity(n, d);
        Self { product_sqrt: id.base().clone(), c: id.clone(), cp: id }
    }

    /// The pair `(C, C)`.
    pub fn symmetric(c: PositiveInvertibleOperator) -> Result<Self> {
        Self::new(c.clone(), c, DEFAULT_TOL)
    }

    pub fn c(&self) -> &PositiveInvertibleOperator {
        &self.c
    }

    pub fn cprime(&self) -> &PositiveInvertibleOperator {
        &self.cp
    }

    pub fn product_sqrt(&self) -> &ModuleOperator {
        &self.product_sqrt
    }

    pub fn algebra_dim(&self) -> usize {
        self.c.base().algebra_dim()
    }

    pub fn module_rank(&self) -> usize {
        self.c.base().domain_rank()
    }

    fn check_family(&self, family: &GFrameFamily) -> Result<()> {
        if self.algebra_dim() != family.algebra_dim() || self.module_rank() != family.module_rank() {
            return Err(GFrameError::DimensionMismatch(format!(
                "controls act on (n={}, d={}), family on (n={}, d={})",
                self.algebra_dim(),
                self.module_rank(),
                family.algebra_dim(),
                family.module_rank()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCommutation {
    pub c: f64,
    pub cprime: f64,
}

/// Commutator norms behind the standing hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub cc_commutator: f64,
    pub per_point: Vec<PointCommutation>,
    pub tol: f64,
    pub passed: bool,
}

fn within(commutator: f64, a: &ModuleOperator, b: &ModuleOperator, tol: f64) -> bool {
    commutator <= tol * (a.norm() * b.norm()).max(1.0)
}

/// Measures `‖[C, C′]‖`, `‖[C, Λ_w*Λ_w]‖` and `‖[C′, Λ_w*Λ_w]‖`; an entry
/// passes when it is at most `tol·max(1, ‖X‖‖Y‖)`.
pub fn validate_commutation(
    family: &GFrameFamily,
    c: &PositiveInvertibleOperator,
    cp: &PositiveInvertibleOperator,
    tol: f64,
) -> Result<CommutationReport> {
    let (c, cp) = (c.base(), cp.base());
    let cc_commutator = c.commutator_norm(cp)?;
    let mut passed = within(cc_commutator, c, cp, tol);
    let mut per_point = Vec::with_capacity(family.len());
    for p in family.points() {
        let gram = p.lambda.adjoint().compose(&p.lambda)?;
        let entry = PointCommutation { c: c.commutator_norm(&gram)?, cprime: cp.commutator_norm(&gram)? };
        passed &= within(entry.c, c, &gram, tol) && within(entry.cprime, cp, &gram, tol);
        per_point.push(entry);
    }
    Ok(CommutationReport { cc_commutator, per_point, tol, passed })
}

/// A family with its controls and the measured commutation certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledScenario {
    family: GFrameFamily,
    pair: ControlPair,
    commutation: CommutationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisNormReport {
    pub sigma: f64,
    pub sqrt_bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub xhat: ModuleVector,
    pub error: f64,
    /// `1e-8·‖x‖·cond(S_{CC′})`.
    pub bound: f64,
}

impl ControlledScenario {
    pub fn new(family: GFrameFamily, pair: ControlPair, tol: f64) -> Result<Self> {
        pair.check_family(&family)?;
        let commutation = validate_commutation(&family, pair.c(), pair.cprime(), tol)?;
        Ok(Self { family, pair, commutation })
    }

    pub fn family(&self) -> &GFrameFamily {
        &self.family
    }

    pub fn pair(&self) -> &ControlPair {
        &self.pair
    }

    pub fn commutation(&self) -> &CommutationReport {
        &self.commutation
    }

    /// Same family under different controls.
    pub fn with_pair(&self, pair: ControlPair) -> Result<Self> {
        Self::new(self.family.clone(), pair, self.commutation.tol)
    }

    fn require_commutation(&self) -> Result<()> {
        if self.commutation.passed {
            Ok(())
        } else {
            Err(GFrameError::CommutationViolated(format!(
                "commutation certificate failed at tol {:e}",
                self.commutation.tol
            )))
        }
    }

    /// `S_{CC′} = Σ_w μ_w C′Λ_w*Λ_w C`.
    pub fn controlled_frame_operator(&self) -> Result<ModuleOperator> {
        self.require_commutation()?;
        let s = self.family.frame_operator();
        self.pair.cprime().base().compose(&s)?.compose(self.pair.c().base())
    }

    /// `∫⟨Λ_w Cx, Λ_w C′x⟩dμ(w)` evaluated point by point.
    pub fn controlled_energy(&self, x: &ModuleVector) -> Result<AlgebraElement> {
        let cx = self.pair.c().base().apply(x)?;
        let cpx = self.pair.cprime().base().apply(x)?;
        let mut acc = AlgebraElement::zeros(self.family.algebra_dim());
        for p in self.family.points() {
            let lhs = p.lambda.apply(&cx)?;
            let rhs = p.lambda.apply(&cpx)?;
            acc = &acc + &lhs.inner(&rhs)?.scale(p.weight);
        }
        Ok(acc)
    }

    /// Verdict from the spectrum of `S_{CC′}` with threshold `tol·λmax`.
    /// The plain Bessel property the definition also asks for holds for
    /// every finite family; see [`GFrameFamily::classify`].
    pub fn controlled_classify(&self, tol: f64) -> Result<FrameVerdict> {
        Ok(FrameVerdict::from_operator(&self.controlled_frame_operator()?, tol))
    }

    /// `T_{CC′}({y_w}) = Σ_w μ_w (CC′)^{1/2} Λ_w* y_w`.
    pub fn synthesis(&self, ys: &[ModuleVector]) -> Result<ModuleVector> {
        self.require_commutation()?;
        if ys.len() != self.family.len() {
            return Err(GFrameError::DimensionMismatch(format!(
                "expected {} coefficient vectors, got {}",
                self.family.len(),
                ys.len()
            )));
        }
        let mut acc = ModuleVector::zeros(self.family.algebra_dim(), self.family.module_rank());
        for (p, y) in self.family.points().iter().zip(ys) {
            let v = self.pair.product_sqrt().apply(&p.lambda.adjoint().apply(y)?)?;
            acc = acc.checked_add(&v.scale(p.weight))?;
        }
        Ok(acc)
    }

    /// `T*_{CC′}(x) = {Λ_w (C′C)^{1/2} x}_w`.
    pub fn analysis(&self, x: &ModuleVector) -> Result<Vec<ModuleVector>> {
        self.require_commutation()?;
        let root_x = self.pair.product_sqrt().apply(x)?;
        self.family.points().iter().map(|p| p.lambda.apply(&root_x)).collect()
    }

    /// The synthesis operator as one map `⊕_w V_w → U`, with block `w`
    /// scaled by `√μ_w` so the direct-sum inner product is the plain
    /// stacked one.
    pub fn synthesis_operator(&self) -> Result<ModuleOperator> {
        self.require_commutation()?;
        Ok(stacked_synthesis(&self.family, self.pair.product_sqrt()))
    }

    /// `σ(T_{CC′}) ≤ √B + 1e-8·max(1, √B)` for the controlled Bessel bound `B`.
    pub fn synthesis_norm_check(&self) -> Result<SynthesisNormReport> {
        let verdict = self.controlled_classify(FRAME_TOL)?;
        let bound = verdict.bessel_bound.unwrap_or(f64::INFINITY);
        let sigma = self.synthesis_operator()?.norm();
        let sqrt_bound = bound.sqrt();
        Ok(SynthesisNormReport { sigma, sqrt_bound, passed: sigma <= sqrt_bound + 1e-8 * sqrt_bound.max(1.0) })
    }

    /// `x̂ = S_{CC′}⁻¹ T_{CC′} T*_{CC′} x`.
    pub fn reconstruct(&self, x: &ModuleVector) -> Result<ReconstructionResult> {
        let s = self.controlled_frame_operator()?;
        let verdict = FrameVerdict::from_operator(&s, FRAME_TOL);
        if !verdict.is_frame() {
            return Err(GFrameError::NotAFrame { min_eigenvalue: verdict.min_eigenvalue, threshold: verdict.threshold });
        }
        let s = PositiveInvertibleOperator::new(&s, DEFAULT_TOL)?;
        let xhat = s.inverse().apply(&self.synthesis(&self.analysis(x)?)?)?;
        let error = x.checked_sub(&xhat)?.norm();
        Ok(ReconstructionResult { error, bound: 1e-8 * x.norm() * s.condition_number(), xhat })
    }
}

fn stacked_synthesis(family: &GFrameFamily, root: &ModuleOperator) -> ModuleOperator {
    let n = family.algebra_dim();
    let k = family.module_rank() * n;
    let rows = family.total_codomain_rank() * n;
    let mut stacked = CMat::zeros(rows, k);
    let mut offset = 0;
    for p in family.points() {
        let m = p.lambda.action();
        let block = linalg::scale(&(m.adjoint() * root.action()), p.weight.sqrt());
        stacked.view_mut((offset, 0), (m.ncols(), k)).copy_from(&block);
        offset += m.ncols();
    }
    ModuleOperator::from_parts_unchecked(n, family.total_codomain_rank(), family.module_rank(), stacked)
}

#[derive(Serialize, Deserialize)]
struct ScenarioJson {
    family: GFrameFamily,
    #[serde(rename = "C")]
    c: ModuleOperator,
    #[serde(rename = "Cprime")]
    cprime: ModuleOperator,
}

impl Serialize for ControlledScenario {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScenarioJson {
            family: self.family.clone(),
            c: self.pair.c().base().clone(),
            cprime: self.pair.cprime().base().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ControlledScenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ScenarioJson::deserialize(d)?;
        let build = || -> Result<Self> {
            let c = PositiveInvertibleOperator::new(&raw.c, DEFAULT_TOL)?;
            let cp = PositiveInvertibleOperator::new(&raw.cprime, DEFAULT_TOL)?;
            Self::new(raw.family, ControlPair::new(c, cp, DEFAULT_TOL)?, DEFAULT_TOL)
        };
        build().map_err(D::Error::custom)
    }
}

fn check_cross_preconditions(lam: &GFrameFamily, gam: &GFrameFamily, pair: &ControlPair, tol: f64) -> Result<()> {
    lam.same_measure(gam)?;
    pair.check_family(lam)?;
    for (name, fam) in [("Lambda", lam), ("Gamma", gam)] {
        if !validate_commutation(fam, pair.c(), pair.cprime(), tol)?.passed {
            return Err(GFrameError::CommutationViolated(format!("controls do not commute with {name}_w* {name}_w")));
        }
    }
    Ok(())
}

fn weighted_sum(
    fam: &GFrameFamily,
    mut term: impl FnMut(usize) -> Result<ModuleOperator>,
) -> Result<ModuleOperator> {
    let (n, d) = (fam.algebra_dim(), fam.module_rank());
    let mut acc = ModuleOperator::zeros(n, d, d);
    for (i, p) in fam.points().iter().enumerate() {
        acc = acc.checked_add(&term(i)?.scale(p.weight))?;
    }
    Ok(acc)
}

/// `L_{CC′} = Σ_w μ_w C′Γ_w*Λ_w C`.
pub fn cross_operator(lam: &GFrameFamily, gam: &GFrameFamily, pair: &ControlPair, tol: f64) -> Result<ModuleOperator> {
    check_cross_preconditions(lam, gam, pair, tol)?;
    let (c, cp) = (pair.c().base(), pair.cprime().base());
    weighted_sum(lam, |i| {
        let (l, g) = (&lam.points()[i].lambda, &gam.points()[i].lambda);
        cp.compose(&g.adjoint().compose(&l.compose(c)?)?)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossNormReport {
    pub norm: f64,
    pub lambda_bessel: f64,
    pub gamma_bessel: f64,
    pub bound: f64,
    pub passed: bool,
}

/// `‖L_{CC′}‖ ≤ √(E₁E₂) + 1e-8·max(1, √(E₁E₂))` with `E₁`, `E₂` the
/// controlled Bessel bounds of the two families.
pub fn cross_operator_norm_check(lam: &GFrameFamily, gam: &GFrameFamily, pair: &ControlPair, tol: f64) -> Result<CrossNormReport> {
    let norm = cross_operator(lam, gam, pair, tol)?.norm();
    let bessel = |f: &GFrameFamily| -> Result<f64> {
        let s = ControlledScenario::new(f.clone(), pair.clone(), tol)?.controlled_classify(FRAME_TOL)?;
        Ok(s.max_eigenvalue.max(0.0))
    };
    let (e1, e2) = (bessel(lam)?, bessel(gam)?);
    let bound = (e1 * e2).sqrt();
    Ok(CrossNormReport { norm, lambda_bessel: e1, gamma_bessel: e2, bound, passed: norm <= bound + 1e-8 * bound.max(1.0) })
}

/// The true adjoint of `L_{CC′}` compared with the two candidate closed
/// forms `C′Λ*ΓC` and `CΛ*ΓC′`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossAdjointReport {
    pub adjoint: ModuleOperator,
    /// Relative residual against `Σ μ_w C′Λ_w*Γ_w C`.
    pub statement_residual: f64,
    /// Relative residual against `Σ μ_w CΛ_w*Γ_w C′`.
    pub proof_residual: f64,
    pub matches_statement: bool,
    pub matches_proof: bool,
    /// Whether `C` and `C′` also commute with every `Γ_w*Λ_w`, the case in
    /// which both forms coincide.
    pub controls_commute_with_cross_terms: bool,
}

pub fn cross_adjoint_resolve(lam: &GFrameFamily, gam: &GFrameFamily, pair: &ControlPair, tol: f64) -> Result<CrossAdjointReport> {
    let adjoint = cross_operator(lam, gam, pair, tol)?.adjoint();
    let (c, cp) = (pair.c().base(), pair.cprime().base());
    let cross = |i: usize| -> Result<ModuleOperator> {
        lam.points()[i].lambda.adjoint().compose(&gam.points()[i].lambda)
    };
    let statement = weighted_sum(lam, |i| cp.compose(&cross(i)?.compose(c)?))?;
    let proof = weighted_sum(lam, |i| c.compose(&cross(i)?.compose(cp)?))?;
    let scale = adjoint.norm().max(1.0);
    let statement_residual = adjoint.checked_sub(&statement)?.norm() / scale;
    let proof_residual = adjoint.checked_sub(&proof)?.norm() / scale;
    let mut controls_commute_with_cross_terms = true;
    for i in 0..lam.len() {
        let g = gam.points()[i].lambda.adjoint().compose(&lam.points()[i].lambda)?;
        controls_commute_with_cross_terms &=
            within(c.commutator_norm(&g)?, c, &g, tol) && within(cp.commutator_norm(&g)?, cp, &g, tol);
    }
    Ok(CrossAdjointReport {
        adjoint,
        statement_residual,
        proof_residual,
        matches_statement: statement_residual <= 1e-10,
        matches_proof: proof_residual <= 1e-10,
        controls_commute_with_cross_terms,
    })
}

/// Plain frame bounds `(A‖C‖⁻², B‖C⁻¹‖²)` from (C,C)-controlled bounds.
pub fn bounds_plain_from_cc(a: f64, b: f64, c: &PositiveInvertibleOperator) -> Result<FrameBounds> {
    let norm = c.base().norm();
    let inv_norm = c.inverse().norm();
    FrameBounds::new(a / (norm * norm), b * inv_norm * inv_norm)
}

/// (C,C)-controlled bounds `(E‖C⁻¹‖⁻², F‖C‖²)` from plain frame bounds.
pub fn bounds_cc_from_plain(e: f64, f: f64, c: &PositiveInvertibleOperator) -> Result<FrameBounds> {
    let norm = c.base().norm();
    let inv_norm = c.inverse().norm();
    FrameBounds::new(e / (inv_norm * inv_norm), f * norm * norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityTransfer {
    pub surjective: bool,
    /// Smallest singular value of `L*_{CC′}`.
    pub cross_lower_bound: f64,
    /// `m = ‖(KK*)⁻¹‖⁻¹` for the synthesis operator `K` of `Γ`.
    pub gamma_lower_bound: Option<f64>,
    /// `m > 0` and `m·I ⪯ S^Γ_{CC′}`.
    pub certified: bool,
}

/// If `L_{CC′}` is surjective, `Γ` inherits a controlled lower frame bound.
pub fn surjectivity_transfer(lam: &GFrameFamily, gam: &GFrameFamily, pair: &ControlPair, tol: f64) -> Result<SurjectivityTransfer> {
    check_cross_preconditions(lam, gam, pair, tol)
        .map_err(|e| GFrameError::PreconditionViolated(format!("cross-operator hypotheses: {e}")))?;
    let lam_scenario = ControlledScenario::new(lam.clone(), pair.clone(), tol)?;
    if !lam_scenario.controlled_classify(FRAME_TOL)?.is_frame() {
        return Err(GFrameError::PreconditionViolated("Lambda is not a (C-C')-controlled frame".into()));
    }
    let l = cross_operator(lam, gam, pair, tol)?;
    let threshold = SURJECTIVITY_TOL * l.norm().max(1.0);
    let (surjective, cross_lower_bound) = l.adjoint().bounded_below(threshold);
    if !surjective {
        return Ok(SurjectivityTransfer { surjective, cross_lower_bound, gamma_lower_bound: None, certified: false });
    }
    let gam_scenario = ControlledScenario::new(gam.clone(), pair.clone(), tol)?;
    let k = gam_scenario.synthesis_operator()?;
    let kk = k.compose(&k.adjoint())?;
    let Ok(kk) = PositiveInvertibleOperator::new(&kk, DEFAULT_TOL) else {
        return Ok(SurjectivityTransfer { surjective, cross_lower_bound, gamma_lower_bound: None, certified: false });
    };
    let m = 1.0 / kk.inverse().norm();
    let s_gamma = gam_scenario.controlled_frame_operator()?;
    let id = ModuleOperator::identity(gam.algebra_dim(), gam.module_rank());
    let certified = m > 0.0 && id.scale(m).loewner_leq(&s_gamma, DEFAULT_TOL)?;
    Ok(SurjectivityTransfer { surjective, cross_lower_bound, gamma_lower_bound: Some(m), certified })
}
