//! Bounded-norm problem family: minimize `c . x` subject to `|x| <= 1`.
//!
//! The optimum is `-c` with value `-1` for unit `c`, which makes this the one
//! family with both an analytic reference and a closed-form orthogonal
//! projection (so projected gradient descent is applicable).

use crate::constraint::ConstraintFunction;
use crate::error::Result;
use crate::linalg::{sample_unit_sphere, Rng, Vector};
use crate::program::{ConvexProgram, LinearObjective};

use super::{GeneratedInstance, InstanceData, ProblemClass, ProblemSpec, ReferenceValue};

/// `h(x) = |x| - 1` with subgradient `x / |x|` (zero at the origin, a valid
/// subgradient there).
pub fn ball_constraint(dimension: usize) -> ConstraintFunction {
    let _ = dimension;
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
    .with_lipschitz(1.0)
}

/// Euclidean projection onto the unit ball: `x / max(1, |x|)`.
pub fn ball_projector(x: &Vector) -> Vector {
    let n = x.norm();
    if n > 1.0 {
        x.scaled(1.0 / n)
    } else {
        x.clone()
    }
}

pub(crate) fn build_program(cost: Vector, anchor: Vector) -> Result<ConvexProgram> {
    let d = cost.len();
    let r = anchor.norm() + 1.0;
    Ok(ConvexProgram::new(
        LinearObjective::with_lipschitz(cost, 1.0)?,
        ball_constraint(d),
        anchor,
    )?
    .with_domain_bound(r)
    .with_reference_optimum(-1.0))
}

/// Generates a bounded-norm instance: unit cost direction, anchor sampled in
/// the unit ball (resampled until strictly interior).
///
/// The anchor radius is drawn uniformly in `[0, 1)` (sphere direction times
/// radius) rather than volume-uniformly: at the default dimension 100 a
/// volume-uniform draw sits within ~0.01 of the boundary almost surely, and
/// such sliver margins make the interpolation weight collapse toward the
/// anchor on any sizable violation, washing out the comparison against the
/// orthogonal projection at large step sizes.
pub fn gen_norm(d: usize, seed: u64) -> Result<GeneratedInstance> {
    let mut rng = Rng::seed_from_u64(seed);
    let cost = sample_unit_sphere(d, &mut rng)?;
    let anchor = loop {
        let direction = sample_unit_sphere(d, &mut rng)?;
        let candidate = direction.scaled(rng.next_f64());
        if candidate.norm() < 1.0 {
            break candidate;
        }
    };
    Ok(GeneratedInstance {
        spec: ProblemSpec::new(ProblemClass::Norm, seed).with_dimension(d),
        program: build_program(cost, anchor)?,
        reference: Some(ReferenceValue::Analytic(-1.0)),
        data: InstanceData::Norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_unit_ball;

    #[test]
    fn optimum_sits_on_the_boundary() {
        let inst = gen_norm(100, 7).unwrap();
        let c = inst.program.objective().cost();
        let minus_c = c.scaled(-1.0);
        assert!((inst.program.objective().value(&minus_c) - (-1.0)).abs() <= 1e-12);
        assert!(inst.program.constraint().value(&minus_c).abs() <= 1e-12);
        assert!(inst.program.h_at_anchor() < 0.0);
    }

    #[test]
    fn projector_is_radial() {
        let c = Vector::from_slice(&[0.6, 0.8]);
        assert!(ball_projector(&c.scaled(2.0)).distance(&c) <= 1e-15);
        let inside = Vector::from_slice(&[0.1, 0.2]);
        assert_eq!(ball_projector(&inside), inside);
    }

    #[test]
    fn constraint_is_one_lipschitz() {
        let h = ball_constraint(5);
        let mut rng = Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = sample_unit_ball(5, &mut rng).unwrap().scaled(3.0);
            let y = sample_unit_ball(5, &mut rng).unwrap().scaled(3.0);
            assert!((h.value(&x) - h.value(&y)).abs() <= x.distance(&y) + 1e-12);
        }
    }

    #[test]
    fn generation_is_seed_stable() {
        let a = gen_norm(20, 99).unwrap();
        let b = gen_norm(20, 99).unwrap();
        assert_eq!(a.program.anchor(), b.program.anchor());
        assert_eq!(a.program.objective().cost(), b.program.objective().cost());
    }
}
