//! Convex optimization with an interpolation-based projection.
//!
//! The feasible set is described by a convex domain-defining function `h`
//! (feasible iff `h(x) <= 0`) together with a strictly feasible anchor point.
//! Any point is mapped into the set by interpolating toward the anchor, with
//! the interpolation weight available in closed form from convexity; descent
//! then runs on the composition of the objective with that projection. The
//! crate provides:
//!
//! * [`linalg`] — dense vectors/matrices, a symmetric eigensolver, pivoted QR
//!   kernels, and bit-reproducible seeded sampling;
//! * [`projection`] — the projection, its interpolation weight, and the
//!   gradient of the objective-projection composition;
//! * [`optim`] — the composition solver plus subgradient-descent, projected
//!   gradient-descent and Adam baselines;
//! * [`problems`] — seeded generators for five benchmark problem families
//!   (linear, semidefinite, second-order cone, bounded-norm, exponential) and
//!   a 2-D demo instance, with reference-optimum estimation and a text
//!   archive format;
//! * [`harness`] — algorithm/step-size/instance sweeps with normalized
//!   best-so-far metrics, quantile curves and CSV reports.

pub mod constraint;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod optim;
pub mod problems;
pub mod program;
pub mod projection;

pub use constraint::{ConstraintFunction, ConstraintKind, ConstraintOracle};
pub use error::{Error, Result};
pub use linalg::{Matrix, Rng, Vector};
pub use optim::{Algorithm, IgdConfig, RunTrace, StepSize, StopReport};
pub use program::{AffineEquality, ConvexProgram, EqualityLift, LinearObjective};
pub use projection::{composite_gradient, interpolation_weight, project, ProjectionResult};
