//! Comparison baselines: switching subgradient descent, projected gradient
//! descent, and the two update rules used by the illustrative 2-D demo.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::program::ConvexProgram;
use crate::projection::{project, FEASIBILITY_CLAMP};

use super::trace::{RunTrace, StopReport, TraceBuilder};

fn check_finite(x: &Vector, k: usize) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "iterate became non-finite at iteration {k}"
        )))
    }
}

/// Switching subgradient descent: follow the objective gradient inside the
/// feasible set and the constraint subgradient outside.
///
/// There is no projection, so the trace records `f(x_k)` directly and flags
/// feasibility per iterate; downstream metrics consider only feasible ones.
/// `start` overrides the starting point (the anchor by default) — unlike the
/// composition method, this baseline may start infeasible.
pub fn run_subgd(
    program: &ConvexProgram,
    beta: f64,
    iterations: usize,
    start: Option<&Vector>,
    record_trace: bool,
) -> Result<RunTrace> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Configuration(format!(
            "step size must be positive and finite, got {beta}"
        )));
    }
    let cost = program.objective().cost();
    let mut x = start.unwrap_or(program.anchor()).clone();
    if x.len() != program.dimension() {
        return Err(Error::InvalidInput("start dimension mismatch".into()));
    }
    let mut builder = TraceBuilder::new(program.dimension(), iterations, record_trace);

    for k in 0..iterations {
        let (h_k, subgrad) = program.constraint().value_and_subgradient(&x);
        let feasible = h_k <= 0.0;
        builder.push(&x, &x, cost.dot(&x), h_k, 1.0, beta, feasible, feasible);
        if feasible {
            x.add_scaled(-beta, cost);
        } else {
            x.add_scaled(-beta, &subgrad);
        }
        check_finite(&x, k)?;
    }
    Ok(builder.finish(x, |p| program.objective().value(p), StopReport::new(iterations)))
}

/// Projected gradient descent with a caller-supplied orthogonal projector
/// onto the feasible set: `x_{k+1} = P(x_k - beta c)`.
///
/// Available only where a closed-form norm-minimizing projection exists (for
/// the unit-ball problems: `x / max(1, |x|)`).
pub fn run_pgd(
    program: &ConvexProgram,
    projector: &dyn Fn(&Vector) -> Vector,
    beta: f64,
    iterations: usize,
    record_trace: bool,
) -> Result<RunTrace> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Configuration(format!(
            "step size must be positive and finite, got {beta}"
        )));
    }
    let cost = program.objective().cost();
    let mut x = program.anchor().clone();
    let mut builder = TraceBuilder::new(program.dimension(), iterations, record_trace);

    for k in 0..iterations {
        let h_k = program.constraint().value(&x);
        builder.push(&x, &x, cost.dot(&x), h_k, 1.0, beta, h_k <= 0.0, true);
        let mut stepped = x.clone();
        stepped.add_scaled(-beta, cost);
        x = projector(&stepped);
        check_finite(&x, k)?;
    }
    Ok(builder.finish(x, |p| program.objective().value(p), StopReport::new(iterations)))
}

/// A differentiable (not necessarily linear) objective for the demo runners.
#[derive(Clone)]
pub struct DifferentiableObjective {
    value: Arc<dyn Fn(&Vector) -> f64 + Send + Sync>,
    gradient: Arc<dyn Fn(&Vector) -> Vector + Send + Sync>,
}

impl DifferentiableObjective {
    pub fn new<V, G>(value: V, gradient: G) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        DifferentiableObjective {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    /// The sphere function `0.5 |x|^2`.
    pub fn sphere() -> Self {
        Self::new(|x: &Vector| 0.5 * x.norm_sq(), |x: &Vector| x.clone())
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
}

/// Interpolation projection applied after each raw gradient step,
/// `x_{k+1} = g(x_k - beta grad f(x_k))`.
///
/// This is the update that does NOT converge with the interpolation
/// projection: once the descent ray leaves the feasible set the projection
/// pulls the iterate back onto the same ray and the run stalls there. It is
/// kept as a demo of why the composition update is needed, and accepts a
/// non-linear objective for that demo only; it carries no convergence claims.
pub fn naive_projected_update(
    program: &ConvexProgram,
    objective: &DifferentiableObjective,
    beta: f64,
    iterations: usize,
    record_trace: bool,
) -> Result<RunTrace> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Configuration(format!(
            "step size must be positive and finite, got {beta}"
        )));
    }
    let mut x = program.anchor().clone();
    let mut builder = TraceBuilder::new(program.dimension(), iterations, record_trace);

    for k in 0..iterations {
        let h_k = program.constraint().value(&x);
        builder.push(&x, &x, objective.value(&x), h_k, 1.0, beta, h_k <= 0.0, true);
        let mut stepped = x.clone();
        stepped.add_scaled(-beta, &objective.gradient(&x));
        x = project(program, &stepped)?.point;
        check_finite(&x, k)?;
    }
    Ok(builder.finish(x, |p| objective.value(p), StopReport::new(iterations)))
}

/// Gradient descent on the composition `f(g(x))` for a general differentiable
/// objective: the demo counterpart of [`naive_projected_update`].
///
/// At infeasible points the chain rule gives
/// `eta (grad_f(g(x)) + (grad_f(g(x)) . (g(x) - x0) / h(x0)) s(x))`.
pub fn composed_descent(
    program: &ConvexProgram,
    objective: &DifferentiableObjective,
    beta: f64,
    iterations: usize,
    record_trace: bool,
) -> Result<RunTrace> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Configuration(format!(
            "step size must be positive and finite, got {beta}"
        )));
    }
    let anchor = program.anchor().clone();
    let h_anchor = program.h_at_anchor();
    let mut x = anchor.clone();
    let mut builder = TraceBuilder::new(program.dimension(), iterations, record_trace);

    for k in 0..iterations {
        let (h_k, subgrad) = program.constraint().value_and_subgradient(&x);
        let (projected, eta) = if h_k < FEASIBILITY_CLAMP {
            (x.clone(), 1.0)
        } else {
            let eta = h_anchor / (h_anchor - h_k);
            (x.lin_comb(eta, 1.0 - eta, &anchor), eta)
        };
        builder.push(
            &x,
            &projected,
            objective.value(&projected),
            h_k,
            eta,
            beta,
            h_k <= 0.0,
            true,
        );

        let grad_at_projected = objective.gradient(&projected);
        let step_dir = if eta >= 1.0 {
            grad_at_projected
        } else {
            let mixing = grad_at_projected.dot(&(&projected - &anchor)) / h_anchor;
            let mut dir = grad_at_projected.scaled(eta);
            dir.add_scaled(eta * mixing, &subgrad);
            dir
        };
        x.add_scaled(-beta, &step_dir);
        check_finite(&x, k)?;
    }
    Ok(builder.finish(x, |p| objective.value(p), StopReport::new(iterations)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{halfspace, ConstraintFunction};
    use crate::optim::igd::{run_igd, IgdConfig};
    use crate::program::LinearObjective;

    fn norm_program(c: Vector, anchor: Vector) -> ConvexProgram {
        ConvexProgram::new(
            LinearObjective::new(c),
            ConstraintFunction::smooth(
                |x: &Vector| x.norm() - 1.0,
                |x: &Vector| {
                    let n = x.norm();
                    if n == 0.0 {
                        Vector::zeros(x.len())
                    } else {
                        x.scaled(1.0 / n)
                    }
                },
            )
            .with_lipschitz(1.0),
            anchor,
        )
        .unwrap()
    }

    fn ball_projector(x: &Vector) -> Vector {
        let n = x.norm();
        if n > 1.0 {
            x.scaled(1.0 / n)
        } else {
            x.clone()
        }
    }

    #[test]
    fn subgd_matches_igd_on_always_feasible_problems() {
        let program = ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[1.0, -0.5])),
            halfspace(Vector::from_slice(&[1.0, 0.0]), -1e9),
            Vector::zeros(2),
        )
        .unwrap();
        let a = run_subgd(&program, 0.05, 50, None, false).unwrap();
        let b = run_igd(&program, &IgdConfig::fixed(0.05, 50)).unwrap();
        assert!(a.final_iterate.distance(&b.final_iterate) <= 1e-14);
        assert_eq!(a.objectives, b.objectives);
    }

    #[test]
    fn subgd_first_step_from_infeasible_start() {
        // On the unit-ball problem the constraint subgradient at x is
        // x / |x|, so the first step from an infeasible start moves along
        // -x / |x|.
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.2, 0.1]),
        );
        let start = Vector::from_slice(&[0.0, 2.0]);
        let beta = 0.5;
        let trace = run_subgd(&program, beta, 1, Some(&start), false).unwrap();
        let expected = Vector::from_slice(&[0.0, 2.0 - beta]);
        assert!(trace.final_iterate.distance(&expected) <= 1e-14);
        assert_eq!(trace.feasible, vec![false]);
    }

    #[test]
    fn pgd_radial_projection_and_convergence() {
        let c = Vector::from_slice(&[0.6, 0.8]);
        assert!(ball_projector(&c.scaled(2.0)).distance(&c) <= 1e-15);

        let program = norm_program(c.clone(), Vector::from_slice(&[0.1, -0.3]));
        let trace = run_pgd(&program, &ball_projector, 1e-2, 5_000, false).unwrap();
        let best = trace.stop.best_feasible_objective.unwrap();
        assert!((best - (-1.0)).abs() <= 1e-3, "best {best}");
        // Iterates stay in the ball up to the projector's rounding.
        assert!(trace.constraints.iter().all(|&h| h <= 1e-12));
    }

    #[test]
    fn pgd_inside_ball_is_plain_descent() {
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.5, 0.0]),
        );
        let trace = run_pgd(&program, &ball_projector, 0.1, 3, false).unwrap();
        // 0.5 -> 0.4 -> 0.3 -> 0.2, never leaving the ball.
        assert!((trace.final_iterate[0] - 0.2).abs() <= 1e-15);
    }

    #[test]
    fn naive_zero_iterations_returns_start() {
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.4, 0.2]),
        );
        let trace =
            naive_projected_update(&program, &DifferentiableObjective::sphere(), 0.1, 0, false)
                .unwrap();
        assert_eq!(trace.iterations(), 0);
        assert_eq!(&trace.final_iterate, program.anchor());
        assert_eq!(&trace.averaged_point, program.anchor());
    }

    #[test]
    fn naive_feasible_only_trajectory_is_plain_descent() {
        // Sphere objective from an interior start that never exits the ball:
        // x_{k+1} = (1 - beta) x_k.
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.4, 0.2]),
        );
        let trace =
            naive_projected_update(&program, &DifferentiableObjective::sphere(), 0.1, 10, false)
                .unwrap();
        let shrink = 0.9f64.powi(10);
        let expected = Vector::from_slice(&[0.4 * shrink, 0.2 * shrink]);
        assert!(trace.final_iterate.distance(&expected) <= 1e-12);
    }

    #[test]
    fn composed_matches_naive_while_feasible() {
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.4, 0.2]),
        );
        let sphere = DifferentiableObjective::sphere();
        let a = naive_projected_update(&program, &sphere, 0.05, 8, true).unwrap();
        let b = composed_descent(&program, &sphere, 0.05, 8, true).unwrap();
        for (x, y) in a
            .iterates
            .unwrap()
            .iter()
            .zip(b.iterates.unwrap().iter())
        {
            assert!(x.distance(y) <= 1e-14);
        }
    }

    #[test]
    fn subgd_trails_the_composition_method_on_a_boundary_optimum() {
        // 2-D halfspace instance whose optimum lies on the boundary: the
        // switching baseline can only sample feasible iterates a step deep
        // inside, while the composition method evaluates projected points.
        // Minimizing -(x1 + x2)/sqrt(2) pushes against x1 + x2 <= -1, so the
        // optimum sits on the boundary with value 1/sqrt(2).
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        let program = ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[-inv_sqrt2, -inv_sqrt2])),
            halfspace(Vector::from_slice(&[1.0, 1.0]), 1.0),
            Vector::from_slice(&[-2.0, 0.3]),
        )
        .unwrap();
        let k = 10_000;
        let beta = 1e-3;
        let igd = run_igd(&program, &IgdConfig::fixed(beta, k)).unwrap();
        let sub = run_subgd(&program, beta, k, None, false).unwrap();
        let best_igd = igd.stop.best_feasible_objective.unwrap();
        let best_sub = sub.stop.best_feasible_objective.unwrap();
        assert!(
            best_igd < best_sub,
            "composition best {best_igd} vs subgradient best {best_sub}"
        );
    }

    #[test]
    fn baselines_reject_bad_step_sizes() {
        let program = norm_program(
            Vector::from_slice(&[1.0, 0.0]),
            Vector::from_slice(&[0.0, 0.0]),
        );
        assert!(run_subgd(&program, 0.0, 5, None, false).is_err());
        assert!(run_pgd(&program, &ball_projector, -1.0, 5, false).is_err());
    }
}
