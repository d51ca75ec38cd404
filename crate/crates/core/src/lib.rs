//! Balanced augmented Lagrangian solvers with an adaptive stepsize, plus a
//! structure-exploiting application to Cramér-Rao-bound beamforming design
//! for integrated sensing and communication (ISAC).
//!
//! The crate has three layers:
//!
//! * [`splitting`]: generic solvers (adaptive balanced AL, constant-stepsize
//!   balanced AL, and a TF-PDHG-style baseline) over an abstract problem
//!   contract of proximal and constraint operators;
//! * [`isac`]: the beamforming problem itself, with scenario data, the linear
//!   operators of its equality reformulation, eigenvalue-based proximal maps,
//!   a Schur-complement dual solve, a constraint tightener, and a feasibility
//!   certificate;
//! * [`oracles`]: independent dense-algebra and brute-force verifiers used
//!   by tests, debug assertions, and the benchmark's reference anchor.
//!
//! All numerics are generic over the real scalar via [`scalar::Real`]
//! (`f32`/`f64`); the aliases below fix the common concrete choices.

// `!(x > 0)` guards reject NaN along with nonpositive values; the
// suggested `x <= 0` form would let NaN through the validations.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod isac;
pub mod linalg;
pub mod oracles;
pub mod scalar;
pub mod splitting;

pub use error::{Error, Result};
pub use scalar::{CMatrix, CVector, Complex, RMatrix, RVector, Real};

/// `f64` solver configuration.
pub type AbalConfig64 = splitting::AbalConfig<f64>;
/// `f32` solver configuration.
pub type AbalConfig32 = splitting::AbalConfig<f32>;
/// `f64` run report.
pub type RunReport64 = splitting::RunReport<f64>;
/// `f64` beamforming scenario.
pub type Scenario64 = isac::ScenarioData<f64>;
/// `f32` beamforming scenario.
pub type Scenario32 = isac::ScenarioData<f32>;
/// `f64` primal state (the Hermitian blocks `W` and the coupling variable `Z`).
pub type PrimalState64 = isac::PrimalState<f64>;
/// `f64` dual state (the multipliers `μ` and `Λ`).
pub type DualState64 = isac::DualState<f64>;
/// `f64` factorized dual system.
pub type DualSystemFactor64 = isac::DualSystemFactor<f64>;
/// `f64` feasibility certificate.
pub type FeasibilityCertificate64 = isac::FeasibilityCertificate<f64>;
