//! The interpolation projection and the gradient of the objective composed
//! with it.
//!
//! Given a program with anchor `x0` (so `h(x0) < 0`), the projection maps any
//! point into the feasible set by interpolating toward the anchor:
//!
//! ```text
//! g(x) = x                          if h(x) <= 0
//!        eta x + (1 - eta) x0       otherwise,    eta = h(x0) / (h(x0) - h(x))
//! ```
//!
//! Convexity of `h` guarantees `h(g(x)) <= 0`. Unlike a norm-minimizing
//! projection, `g` costs one constraint evaluation and is differentiable
//! wherever `h` is, which is what makes descent on the composition `f(g(x))`
//! practical.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::program::ConvexProgram;

/// Constraint values in `(0, FEASIBILITY_CLAMP)` are treated as feasible:
/// the interpolation weight would otherwise suffer catastrophic cancellation
/// in `h(x0) - h(x)`, and both branches agree to machine precision there.
pub const FEASIBILITY_CLAMP: f64 = 1e-14;

/// Outcome of projecting one point.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// The feasible point `g(x)`.
    pub point: Vector,
    /// Interpolation weight in `(0, 1]`; `1` means the input was feasible.
    pub eta: f64,
    /// Whether interpolation actually happened (`eta < 1`).
    pub was_projected: bool,
}

/// Interpolation weight `eta` for the point `x`.
///
/// Returns `1` for feasible `x` and `h(x0) / (h(x0) - h(x)) in (0, 1)`
/// otherwise. For a max-aggregate constraint this equals the smallest weight
/// over the violated components, i.e. the one forced by the worst violation.
pub fn interpolation_weight(program: &ConvexProgram, x: &Vector) -> f64 {
    weight_from_value(program.h_at_anchor(), program.constraint().value(x))
}

#[inline]
pub(crate) fn weight_from_value(h_anchor: f64, h_x: f64) -> f64 {
    if h_x < FEASIBILITY_CLAMP {
        1.0
    } else {
        h_anchor / (h_anchor - h_x)
    }
}

/// Projects `x` onto the feasible set along the segment to the anchor.
pub fn project(program: &ConvexProgram, x: &Vector) -> Result<ProjectionResult> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    if x.len() != program.dimension() {
        return Err(Error::InvalidInput(format!(
            "point dimension {} vs program dimension {}",
            x.len(),
            program.dimension()
        )));
    }
    let eta = interpolation_weight(program, x);
    if eta >= 1.0 {
        return Ok(ProjectionResult {
            point: x.clone(),
            eta: 1.0,
            was_projected: false,
        });
    }
    Ok(ProjectionResult {
        point: x.lin_comb(eta, 1.0 - eta, program.anchor()),
        eta,
        was_projected: true,
    })
}

/// Gradient of `x -> f(g(x))` at an infeasible point (Jacobian chain rule):
///
/// ```text
/// grad = eta * ( c + (c . (g(x) - x0) / h(x0)) * s(x) )
/// ```
///
/// where `s(x)` is the constraint subgradient at `x`. Feasible points are the
/// caller's responsibility (there the gradient is just `c`); calling this with
/// `h(x) <= 0` is a contract violation.
pub fn composite_gradient(program: &ConvexProgram, x: &Vector) -> Result<Vector> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    let (h_x, subgrad) = program.constraint().value_and_subgradient(x);
    if h_x < FEASIBILITY_CLAMP {
        return Err(Error::ContractViolation(format!(
            "composite_gradient called at a feasible point (h = {h_x}); \
             the gradient there is the plain objective gradient"
        )));
    }
    Ok(composite_gradient_parts(program, x, h_x, &subgrad))
}

/// Shared kernel for callers that already evaluated `h(x)` and `s(x)`.
///
/// Uses the identity `g(x) - x0 = eta (x - x0)`, avoiding a second projection.
#[inline]
pub(crate) fn composite_gradient_parts(
    program: &ConvexProgram,
    x: &Vector,
    h_x: f64,
    subgrad: &Vector,
) -> Vector {
    let h_anchor = program.h_at_anchor();
    let eta = h_anchor / (h_anchor - h_x);
    let cost = program.objective().cost();
    // c . (g(x) - x0) = eta * c . (x - x0)
    let mixing = eta * (cost.dot(x) - cost.dot(program.anchor())) / h_anchor;
    let mut grad = cost.scaled(eta);
    grad.add_scaled(eta * mixing, subgrad);
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{halfspace, ConstraintFunction};
    use crate::program::LinearObjective;

    fn halfspace_program_1d() -> ConvexProgram {
        // h(x) = x - 1, anchor 0 with h(x0) = -1.
        ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[1.0])),
            halfspace(Vector::from_slice(&[1.0]), -1.0),
            Vector::zeros(1),
        )
        .unwrap()
    }

    fn norm_program_2d() -> ConvexProgram {
        ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[1.0, 0.0])),
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
            Vector::zeros(2),
        )
        .unwrap()
    }

    #[test]
    fn weight_hand_values() {
        // h(x0) = -1, h(x) = 1 gives 0.5; h(x0) = -2, h(x) = 6 gives 0.25.
        assert_eq!(weight_from_value(-1.0, 1.0), 0.5);
        assert_eq!(weight_from_value(-2.0, 6.0), 0.25);
        // Feasible point: no projection.
        assert_eq!(weight_from_value(-1.0, -0.3), 1.0);
    }

    #[test]
    fn weight_matches_min_over_violated_components() {
        let comps = vec![
            halfspace(Vector::from_slice(&[1.0, 0.0]), -0.25),
            halfspace(Vector::from_slice(&[0.0, 1.0]), -0.5),
            halfspace(Vector::from_slice(&[-1.0, -1.0]), -4.0),
        ];
        let program = ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[1.0, 0.0])),
            ConstraintFunction::max_of(comps.clone()).unwrap(),
            Vector::zeros(2),
        )
        .unwrap();
        let x = Vector::from_slice(&[2.0, 1.5]);
        let h0 = program.h_at_anchor();
        let direct = interpolation_weight(&program, &x);
        let per_component = comps
            .iter()
            .map(|c| c.value(&x))
            .filter(|&h| h > 0.0)
            .map(|h| h0 / (h0 - h))
            .fold(f64::INFINITY, f64::min);
        assert!((direct - per_component).abs() <= 1e-15);
    }

    #[test]
    fn project_feasible_is_identity() {
        let program = halfspace_program_1d();
        let r = project(&program, &Vector::from_slice(&[0.5])).unwrap();
        assert_eq!(r.eta, 1.0);
        assert!(!r.was_projected);
        assert_eq!(r.point, Vector::from_slice(&[0.5]));
    }

    #[test]
    fn project_halfspace_boundary() {
        // x = 3, h(x) = 2, eta = 1/3, landing exactly on the boundary x = 1.
        let program = halfspace_program_1d();
        let r = project(&program, &Vector::from_slice(&[3.0])).unwrap();
        assert!((r.eta - 1.0 / 3.0).abs() <= 1e-15);
        assert!(r.was_projected);
        assert!((r.point[0] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn project_norm_ball() {
        // h(x) = |x| - 1 at (3,4): h = 4, eta = 1/5, point (0.6, 0.8).
        let program = norm_program_2d();
        let r = project(&program, &Vector::from_slice(&[3.0, 4.0])).unwrap();
        assert!((r.eta - 0.2).abs() <= 1e-15);
        assert!((r.point[0] - 0.6).abs() <= 1e-15);
        assert!((r.point[1] - 0.8).abs() <= 1e-15);
        assert!(program.constraint().value(&r.point).abs() <= 1e-12);
    }

    #[test]
    fn project_rejects_bad_input() {
        let program = halfspace_program_1d();
        let mut bad = Vector::zeros(1);
        bad[0] = f64::NAN;
        assert!(matches!(
            project(&program, &bad),
            Err(Error::InvalidInput(_))
        ));
        assert!(project(&program, &Vector::zeros(3)).is_err());
    }

    #[test]
    fn composite_gradient_1d_vanishes_past_boundary() {
        // g is constant along this ray beyond the boundary, so the composite
        // gradient is exactly zero: (1/3)(1 + (1 * 1 / -1) * 1) = 0.
        let program = halfspace_program_1d();
        let g = composite_gradient(&program, &Vector::from_slice(&[3.0])).unwrap();
        assert!(g[0].abs() <= 1e-15);
    }

    #[test]
    fn composite_gradient_2d_hand_value() {
        // f(g(x)) = x1 / (x1 + x2) beyond the halfspace x1 + x2 <= 1; the
        // partials at (2, 0) are (0, -1/2).
        let program = ConvexProgram::new(
            LinearObjective::new(Vector::from_slice(&[1.0, 0.0])),
            halfspace(Vector::from_slice(&[1.0, 1.0]), -1.0),
            Vector::zeros(2),
        )
        .unwrap();
        let g = composite_gradient(&program, &Vector::from_slice(&[2.0, 0.0])).unwrap();
        assert!(g[0].abs() <= 1e-15);
        assert!((g[1] + 0.5).abs() <= 1e-15);
    }

    #[test]
    fn composite_gradient_rejects_feasible_point() {
        let program = halfspace_program_1d();
        let err = composite_gradient(&program, &Vector::from_slice(&[0.0]));
        assert!(matches!(err, Err(Error::ContractViolation(_))));
    }

    #[test]
    fn projection_idempotent_and_on_segment() {
        let program = norm_program_2d();
        let anchor = program.anchor().clone();
        for (a, b) in [(3.0, 4.0), (-2.0, 0.1), (0.9, -0.9), (10.0, 10.0)] {
            let x = Vector::from_slice(&[a, b]);
            let r = project(&program, &x).unwrap();
            let again = project(&program, &r.point).unwrap();
            assert_eq!(again.eta, 1.0);
            if r.was_projected {
                // point = eta x + (1 - eta) x0 must sit on the segment
                let recon = x.lin_comb(r.eta, 1.0 - r.eta, &anchor);
                assert!(recon.distance(&r.point) <= 1e-12);
            }
        }
    }
}
