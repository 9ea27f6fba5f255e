//! Minimal dense linear algebra and seeded random sampling.
//!
//! Everything is implemented from scratch on `f64` — no external numerical
//! dependencies — which keeps seeded generation bit-reproducible across
//! platforms (see [`rng`]).

mod detmath;
mod eig;
mod factor;
mod matrix;
pub mod rng;
mod vector;

pub use detmath::{det_exp, det_ln};
pub use eig::{sym_eig, SymEigResult};
pub use factor::{null_space_basis, orthonormal_factor, particular_solution};
pub use matrix::Matrix;
pub use rng::{derive_seed, sample_normal, sample_unit_ball, sample_unit_sphere, Rng};
pub use vector::Vector;
