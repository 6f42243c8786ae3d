//! Controlled continuous g-frames in Hilbert C*-modules over the matrix
//! algebra `Mₙ(ℂ)`.
//!
//! The algebra, the free module `Aᵈ`, adjointable operators, g-frame
//! families over a finite weighted measure space and their controlled
//! variants are all realized with dense complex matrices, so every frame
//! inequality can be checked numerically in the Loewner order.

pub mod algebra;
pub mod cli;
pub mod controlled;
pub mod error;
pub mod frames;
pub mod generators;
pub mod io;
pub(crate) mod linalg;
pub mod module_space;
pub mod operators;
pub mod verifier;

pub use algebra::AlgebraElement;
pub use controlled::{
    CommutationReport, ControlPair, ControlledScenario, CrossAdjointReport, CrossNormReport, ReconstructionResult,
    SurjectivityTransfer, SynthesisNormReport,
};
pub use error::{GFrameError, Result};
pub use frames::{FrameBounds, FrameKind, FrameVerdict, GFrameFamily, MeasurePoint};
pub use generators::{Flavor, GeneratorSpec};
pub use module_space::ModuleVector;
pub use operators::{ModuleOperator, PositiveInvertibleOperator};
pub use verifier::{CheckResult, CheckStatus, SuiteOptions, SuiteReport};

pub use num_complex::Complex64;

/// Default relative working tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
