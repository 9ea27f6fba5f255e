//! First-order optimizers producing uniform run traces.
//!
//! Each run is single-threaded and self-contained; runs on shared immutable
//! programs may execute concurrently.

mod adam;
mod baselines;
mod igd;
mod trace;

pub use adam::{run_adam, AdamConfig};
pub use baselines::{
    composed_descent, naive_projected_update, run_pgd, run_subgd, DifferentiableObjective,
};
pub use igd::{resolve_step_size, run_igd, IgdConfig, ResolvedStep, StepSize, LEMMA_TOLERANCE};
pub use trace::{Algorithm, RunTrace, StopReport};
