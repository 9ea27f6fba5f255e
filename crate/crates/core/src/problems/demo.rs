//! 2-D demo instance: the sphere function `0.5 |x|^2` under one linear
//! constraint placing the unconstrained optimum (the origin) outside the
//! feasible set.
//!
//! This is the instance that separates the two update rules visually: the
//! naive projected update stalls on the ray along which it first exits the
//! feasible set, while descent on the composition reaches the constrained
//! optimum. The constrained optimum of `min 0.5 |x|^2  s.t.  a . x <= r` with
//! an infeasible origin is the orthogonal foot `r a / |a|^2`.

use crate::constraint::halfspace;
use crate::error::Result;
use crate::linalg::Vector;
use crate::optim::DifferentiableObjective;
use crate::program::{ConvexProgram, LinearObjective};

use super::{DemoData, GeneratedInstance, InstanceData, ProblemClass, ProblemSpec};

/// The demo's constants are fixed: the anchor sits off the normal direction
/// so the naive update's stall ray visibly misses the optimum.
pub(crate) fn demo_data() -> DemoData {
    let normal = Vector::from_slice(&[1.0, 1.0]);
    let rhs = -1.0;
    let optimum = normal.scaled(rhs / normal.norm_sq());
    let optimum_value = 0.5 * optimum.norm_sq();
    DemoData {
        normal,
        rhs,
        optimum,
        optimum_value,
    }
}

pub(crate) fn build_program(data: &DemoData, anchor: Vector) -> Result<ConvexProgram> {
    // The linear objective slot is unused by the demo runners (the sphere
    // objective is supplied separately); it is stored as zero.
    Ok(ConvexProgram::new(
        LinearObjective::new(Vector::zeros(2)),
        halfspace(data.normal.clone(), -data.rhs),
        anchor,
    )?
    .with_reference_optimum(data.optimum_value))
}

/// The sphere objective used by both demo update rules.
pub fn sphere_objective() -> DifferentiableObjective {
    DifferentiableObjective::sphere()
}

/// Builds the fixed demo instance (no randomness involved).
pub fn gen_demo() -> Result<GeneratedInstance> {
    let data = demo_data();
    let anchor = Vector::from_slice(&[-2.0, 0.3]);
    Ok(GeneratedInstance {
        spec: ProblemSpec::new(ProblemClass::Demo, 0).with_dimension(2),
        program: build_program(&data, anchor)?,
        reference: Some(super::ReferenceValue::Analytic(data.optimum_value)),
        data: InstanceData::Demo(data),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constrained_optimum_is_orthogonal_foot() {
        let data = demo_data();
        // min 0.5|x|^2 s.t. a.x = r has Lagrangian solution x = r a / |a|^2.
        assert!((data.optimum[0] + 0.5).abs() <= 1e-15);
        assert!((data.optimum[1] + 0.5).abs() <= 1e-15);
        assert!((data.optimum_value - 0.25).abs() <= 1e-15);
        // The foot is on the boundary.
        assert!((data.normal.dot(&data.optimum) - data.rhs).abs() <= 1e-15);
    }

    #[test]
    fn anchor_feasible_origin_not() {
        let inst = gen_demo().unwrap();
        assert!(inst.program.h_at_anchor() < 0.0);
        assert!(inst.program.constraint().value(&Vector::zeros(2)) > 0.0);
    }

    #[test]
    fn anchor_is_off_the_normal_direction() {
        // If the anchor were parallel to the constraint normal, the naive
        // update's stall ray would pass through the optimum and the demo
        // would show nothing.
        let inst = gen_demo().unwrap();
        let a = inst.program.anchor();
        let n = demo_data().normal;
        let cross = a[0] * n[1] - a[1] * n[0];
        assert!(cross.abs() > 0.5);
    }
}
