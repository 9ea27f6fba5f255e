//! Gradient descent on the composition of a linear objective with the
//! interpolation projection.
//!
//! One run performs, after internally rescaling `h` so that `h(x0) = -1`:
//!
//! ```text
//! for k in 0..K {
//!     if h(x_k) <= 0 { alpha_k = beta;                 x_{k+1} = x_k - alpha_k c }
//!     else           { alpha_k = |h(x0) - h(x_k)| beta; x_{k+1} = x_k - alpha_k grad f(g(x_k)) }
//! }
//! return mean of g(x_0) .. g(x_{K-1})
//! ```
//!
//! With the automatic step size `beta = R / (L (1 + H0 R) sqrt(K))`, where
//! `H0 = H / |h(x0)|`, the averaged return point satisfies
//! `f(avg) - f(x*) <= R L (1 + H0 R) / sqrt(K)`.
//!
//! The rescale only affects the step-size schedule: the projection weight and
//! the composite gradient are invariant under positive scaling of `h`, so the
//! loop below works in original units and folds the scale into `alpha_k`.

use crate::error::{Error, Result};
use crate::program::ConvexProgram;
use crate::projection::{composite_gradient_parts, FEASIBILITY_CLAMP};

use super::trace::{RunTrace, StopReport, TraceBuilder};

/// Slack allowed on the descent-direction sign monitor before a violation is
/// flagged; absorbs accumulated floating-point rounding.
pub const LEMMA_TOLERANCE: f64 = 1e-9;

/// Constant step-size parameter, or automatic selection from `(L, H, R, K)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSize {
    /// `beta = R / (L (1 + H0 R) sqrt(K))`; requires the Lipschitz constants
    /// and domain bound to be available.
    Auto,
    Fixed(f64),
}

/// Configuration of one solver run.
///
/// The Lipschitz constants `L`, `H` and the domain bound `R` are needed only
/// for [`StepSize::Auto`]; when absent here they fall back to the program's
/// stored metadata.
#[derive(Clone, Debug)]
pub struct IgdConfig {
    pub iterations: usize,
    pub step_size: StepSize,
    pub lipschitz_objective: Option<f64>,
    pub lipschitz_constraint: Option<f64>,
    pub domain_bound: Option<f64>,
    /// Retain the full per-iteration vectors in the trace.
    pub record_trace: bool,
}

impl IgdConfig {
    pub fn fixed(beta: f64, iterations: usize) -> Self {
        IgdConfig {
            iterations,
            step_size: StepSize::Fixed(beta),
            lipschitz_objective: None,
            lipschitz_constraint: None,
            domain_bound: None,
            record_trace: false,
        }
    }

    pub fn auto(iterations: usize) -> Self {
        IgdConfig {
            step_size: StepSize::Auto,
            ..Self::fixed(0.0, iterations)
        }
    }

    pub fn with_record_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn with_constants(mut self, l: f64, h: f64, r: f64) -> Self {
        self.lipschitz_objective = Some(l);
        self.lipschitz_constraint = Some(h);
        self.domain_bound = Some(r);
        self
    }
}

/// Resolved automatic step size along with the constants that produced it.
#[derive(Clone, Copy, Debug)]
pub struct ResolvedStep {
    pub beta: f64,
    /// Rescaled constraint Lipschitz constant `H / |h(x0)|`, when known.
    pub h_rescaled: Option<f64>,
}

/// Resolves the step size without running; surfaces configuration errors.
pub fn resolve_step_size(program: &ConvexProgram, config: &IgdConfig) -> Result<ResolvedStep> {
    if config.iterations == 0 {
        return Err(Error::Configuration(
            "iteration count must be at least 1".into(),
        ));
    }
    let scale = program.h_at_anchor().abs();
    let h_rescaled = config
        .lipschitz_constraint
        .or(program.constraint().lipschitz())
        .map(|h| h / scale);
    match config.step_size {
        StepSize::Fixed(beta) => {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::Configuration(format!(
                    "step size must be positive and finite, got {beta}"
                )));
            }
            Ok(ResolvedStep { beta, h_rescaled })
        }
        StepSize::Auto => {
            let l = config
                .lipschitz_objective
                .unwrap_or_else(|| program.objective().lipschitz());
            let h0 = h_rescaled.ok_or_else(|| {
                Error::Configuration(
                    "automatic step size needs a constraint Lipschitz bound H".into(),
                )
            })?;
            let r = config
                .domain_bound
                .or(program.domain_bound())
                .ok_or_else(|| {
                    Error::Configuration(
                        "automatic step size needs a domain bound R".into(),
                    )
                })?;
            if l <= 0.0 || h0 <= 0.0 || r <= 0.0 {
                return Err(Error::Configuration(format!(
                    "automatic step size needs positive constants, got L = {l}, H0 = {h0}, R = {r}"
                )));
            }
            let k = config.iterations as f64;
            let threshold = (r * h0 / (1.0 + h0 * r)).powi(2);
            if k < threshold {
                return Err(Error::Configuration(format!(
                    "iteration count {} is below the guarantee threshold {threshold:.6}",
                    config.iterations
                )));
            }
            Ok(ResolvedStep {
                beta: r / (l * (1.0 + h0 * r) * k.sqrt()),
                h_rescaled: Some(h0),
            })
        }
    }
}

/// Runs the solver and returns the full trace.
///
/// The sign quantity `c . (g(x_k) - x0)` is monitored at every iteration; it
/// stays nonpositive whenever `beta <= 1 / (L H0)`, and any observed violation
/// (a user-supplied step size may exceed that cap) is flagged in the
/// [`StopReport`] rather than treated as an error.
pub fn run_igd(program: &ConvexProgram, config: &IgdConfig) -> Result<RunTrace> {
    let step = resolve_step_size(program, config)?;
    let beta = step.beta;
    let k_total = config.iterations;
    let cost = program.objective().cost().clone();
    let anchor = program.anchor().clone();
    let cost_dot_anchor = cost.dot(&anchor);
    let h_anchor = program.h_at_anchor();
    let scale = h_anchor.abs();

    let mut builder = TraceBuilder::new(program.dimension(), k_total, config.record_trace);
    let mut stop = StopReport::new(k_total);
    let mut x = anchor.clone();

    for k in 0..k_total {
        let (h_k, subgrad) = program.constraint().value_and_subgradient(&x);
        if !h_k.is_finite() {
            return Err(Error::Numerical(format!(
                "constraint value became non-finite at iteration {k}"
            )));
        }
        let treat_feasible = h_k < FEASIBILITY_CLAMP;

        let (projected, eta, alpha, mut next) = if treat_feasible {
            let projected = x.clone();
            let mut next = x.clone();
            next.add_scaled(-beta, &cost);
            (projected, 1.0, beta, next)
        } else {
            let eta = h_anchor / (h_anchor - h_k);
            let projected = x.lin_comb(eta, 1.0 - eta, &anchor);
            let grad = composite_gradient_parts(program, &x, h_k, &subgrad);
            // Post-rescale schedule: |h(x0) - h(x_k)| beta with h(x0) = -1.
            let alpha = (1.0 + h_k / scale) * beta;
            let mut next = x.clone();
            next.add_scaled(-alpha, &grad);
            (projected, eta, alpha, next)
        };

        let sign_quantity = cost.dot(&projected) - cost_dot_anchor;
        if sign_quantity > LEMMA_TOLERANCE && !stop.lemma_violated {
            stop.lemma_violated = true;
            stop.first_violation = Some(k);
        }

        builder.push(
            &x,
            &projected,
            cost.dot(&projected),
            h_k,
            eta,
            alpha,
            h_k <= 0.0,
            true,
        );

        if !next.is_finite() {
            return Err(Error::Numerical(format!(
                "iterate became non-finite at iteration {k}"
            )));
        }
        std::mem::swap(&mut x, &mut next);
    }

    Ok(builder.finish(x, |p| program.objective().value(p), stop))
}
