//! Bimatrix algebra and control design for complex-valued linear systems.
//!
//! A bimatrix `{P1, P2}` is an ordered pair of equally-shaped complex matrices
//! acting on a complex vector as `x ↦ P1·x + conj(P2)·conj(x)`. The action is
//! linear over the reals but not over the complexes, which makes bimatrices a
//! compact carrier for systems whose state evolution depends on both the state
//! and its conjugate (antilinear dynamics, second-order plants folded into
//! half the dimension, and so on).
//!
//! The crate provides:
//!
//! * [`bimatrix`] — value types and dense algebra: action, composition,
//!   adjoint, the 2n×2m real representation, complex lifting, inversion,
//!   spectra and matrix exponentials.
//! * [`poly`] — polynomial bimatrices, minimal right coprime factorizations
//!   (general, normal and antilinear variants) and numerical coprimeness
//!   certification.
//! * [`solve`] — closed-form and series solvers for generalized Sylvester,
//!   Sylvester, Stein and Lyapunov bimatrix equations, the conjugate matrix
//!   equation specializations, and a vectorized brute-force oracle.
//! * [`assign`] — full-state-feedback pole assignment, normalization and
//!   anti-preserving design for antilinear systems, second-order system
//!   conversion and the spacecraft rendezvous demo model.
//! * [`json`] — the JSON problem/report schemas used by the `bimat` CLI.
//!
//! Batch helpers in [`par`] run data-parallel under the default `parallel`
//! feature (rayon) and fall back to sequential iteration without it.

pub mod assign;
pub mod bimatrix;
pub mod error;
pub mod json;
pub mod mat;
pub mod par;
pub mod poly;
pub mod solve;

pub use bimatrix::{Bimatrix, RealRep, Spectrum};
pub use error::BimatError;
pub use mat::{CMat, CVec, RMat, RVec};
pub use poly::{CoprimeFactorization, CoprimeReport, FactorVariant, PolyBimatrix, RealPolyPair};
pub use solve::{CharPoly, EquationKind, GSylSolution, OracleOutcome};

pub use assign::{
    FeedbackDesign, SecondOrderModel, SpectrumMode, Structure, SystemModel, TargetSpectrum,
    TimeDomain,
};

/// Default relative tolerance for residual checks.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Default tolerance for eigenvalue multiset matching.
pub const EIGEN_TOL: f64 = 1e-8;
/// Condition-number threshold beyond which a matrix is treated as singular.
pub const SINGULARITY_COND: f64 = 1e12;
