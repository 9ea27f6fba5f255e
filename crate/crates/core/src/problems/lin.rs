//! Linear program family: minimize `c . x` subject to `a_i . x <= 0`.
//!
//! Instances are built so the optimum is the origin with every constraint
//! active there: the first constraint gradient is set to `a_1 = -c`, which
//! makes the stationarity condition `c + mu a_1 = 0` hold with `mu = 1`, and
//! the remaining gradients are sampled on the sphere and flipped so that the
//! point `x = c` stays feasible.

use crate::constraint::{halfspace, ConstraintFunction};
use crate::error::{Error, Result};
use crate::linalg::{sample_unit_ball, sample_unit_sphere, Rng, Vector};
use crate::program::{ConvexProgram, LinearObjective};

use super::{GeneratedInstance, InstanceData, LinData, ProblemClass, ProblemSpec, ReferenceValue};

const ANCHOR_ATTEMPTS: usize = 10_000;

pub(crate) fn build_program(
    cost: Vector,
    normals: &[Vector],
    anchor: Vector,
) -> Result<ConvexProgram> {
    let components = normals
        .iter()
        .map(|a| halfspace(a.clone(), 0.0))
        .collect::<Vec<_>>();
    let r = anchor.norm();
    Ok(ConvexProgram::new(
        LinearObjective::new(cost),
        ConstraintFunction::max_of(components)?,
        anchor,
    )?
    .with_domain_bound(r)
    .with_reference_optimum(0.0))
}

/// Generates a linear-program instance with `m` halfspace constraints in
/// dimension `d`. The anchor is sampled uniformly in the unit ball and
/// resampled until strictly feasible.
pub fn gen_lin(d: usize, m: usize, seed: u64) -> Result<GeneratedInstance> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidInput(
            "linear instances need d >= 1 and m >= 1".into(),
        ));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let cost = sample_unit_sphere(d, &mut rng)?;

    let mut normals = Vec::with_capacity(m);
    normals.push(cost.scaled(-1.0));
    for _ in 1..m {
        let mut a = sample_unit_sphere(d, &mut rng)?;
        if a.dot(&cost) > 0.0 {
            a = a.scaled(-1.0);
        }
        normals.push(a);
    }

    let strictly_feasible =
        |x: &Vector| normals.iter().all(|a| a.dot(x) < 0.0);
    let mut anchor = None;
    for _ in 0..ANCHOR_ATTEMPTS {
        let candidate = sample_unit_ball(d, &mut rng)?;
        if strictly_feasible(&candidate) {
            anchor = Some(candidate);
            break;
        }
    }
    // The scaled cost direction is strictly feasible by construction
    // (a_1 . c = -1 and a_i . c < 0 after the flip); fall back to it if the
    // ball sampler keeps missing the feasible cone.
    let anchor = match anchor {
        Some(a) => a,
        None => {
            let fallback = cost.scaled(0.5);
            if !strictly_feasible(&fallback) {
                return Err(Error::GenerationFailure(
                    "no strictly feasible anchor found".into(),
                ));
            }
            fallback
        }
    };

    Ok(GeneratedInstance {
        spec: ProblemSpec::new(ProblemClass::Lin, seed)
            .with_dimension(d)
            .with_constraints(m),
        program: build_program(cost, &normals, anchor)?,
        reference: Some(ReferenceValue::Analytic(0.0)),
        data: InstanceData::Lin(LinData { normals }),
    })
}
