//! Adaptive BB gradient methods.
//!
//! The crate is `no_std` (with `alloc`) and carries the numerical parts:
//!
//! * [`objective`] and [`bounds`]: problem abstractions, box geometry, projection.
//! * [`stepsize`]: every stepsize rule (SD, MG, BB1, BB2, DY, the monotone
//!   `tilde` steps and the adaptive ANGM / ANGR1 / ANGR2 selections) together with
//!   the iteration history that feeds the retarded formulas.
//! * [`quad`]: the exact-step driver for strongly convex quadratics.
//! * [`linesearch`] and [`general`]: the nonmonotone projected gradient method for
//!   smooth objectives over boxes.
//! * [`problems`]: benchmark generators (random spectra, the non-random diagonal
//!   problem, the 3D Laplacian and a set of classical unconstrained functions).
//!
//! IO, configuration and the command line live in the companion `angrad` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod general;
pub mod linalg;
pub mod linesearch;
pub(crate) mod math;
pub mod objective;
pub mod problems;
pub mod quad;
pub mod rng;
pub mod stepsize;

pub use bounds::{project_box, projected_gradient_residual, BoxBounds};
pub use error::{Error, Result};
pub use objective::{
    quadratic_eval, DenseQuadratic, DiagonalQuadratic, QuadObjective, QuadraticModel,
    SmoothObjective,
};
pub use stepsize::{Branch, RuleKind, StepHistory, StepRecord, StepsizeRule};
