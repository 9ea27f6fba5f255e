//! Exponential-constraint family: minimize `c . x` subject to
//! `0.5 |x - b|^2 + sum_i exp(x_i - b_i) <= d`.
//!
//! Each entry of `b` is the Lambert W function at 1 (the solution of
//! `w e^w = 1`), which places the constraint's unconstrained minimum exactly
//! at the origin: the gradient `(x - b) + exp(x - b)` vanishes there because
//! `e^{-W(1)} = W(1)`. That makes feasible points easy to sample around 0.

use std::sync::Arc;

use crate::constraint::{ConstraintFunction, ConstraintKind, ConstraintOracle};
use crate::error::{Error, Result};
use crate::linalg::{det_exp, sample_unit_ball, sample_unit_sphere, Rng, Vector};
use crate::program::{ConvexProgram, LinearObjective};

use super::{ExpData, GeneratedInstance, InstanceData, ProblemClass, ProblemSpec};

const ANCHOR_ATTEMPTS: usize = 10_000;

/// `W(1)`, computed by Newton iteration on `w e^w - 1` to full precision.
///
/// Uses the crate's deterministic `exp` so the value (and everything derived
/// from it) is bit-identical across platforms.
pub fn lambert_w1() -> f64 {
    let mut w: f64 = 0.5;
    for _ in 0..50 {
        let ew = det_exp(w);
        let delta = (w * ew - 1.0) / (ew * (1.0 + w));
        w -= delta;
        if delta.abs() <= 1e-16 {
            break;
        }
    }
    w
}

struct ExpOracle {
    center: Vector,
    level: f64,
}

impl ConstraintOracle for ExpOracle {
    fn value(&self, x: &Vector) -> f64 {
        let mut quadratic = 0.0;
        let mut exps = 0.0;
        for (xi, bi) in x.iter().zip(self.center.iter()) {
            let t = xi - bi;
            quadratic += 0.5 * t * t;
            exps += det_exp(t);
        }
        quadratic + exps - self.level
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        Vector::from_vec(
            x.iter()
                .zip(self.center.iter())
                .map(|(xi, bi)| {
                    let t = xi - bi;
                    t + det_exp(t)
                })
                .collect(),
        )
    }
}

/// The exponential gradient is unbounded globally, so the stored Lipschitz
/// bound is regional: it covers the ball `|x| <= EXP_LIPSCHITZ_RADIUS`, which
/// contains the feasible set and every iterate the benchmark step sizes
/// produce.
pub const EXP_LIPSCHITZ_RADIUS: f64 = 3.0;

fn regional_lipschitz(d: usize, w: f64) -> f64 {
    let per_coord = (EXP_LIPSCHITZ_RADIUS - w) + det_exp(EXP_LIPSCHITZ_RADIUS - w);
    (d as f64).sqrt() * per_coord
}

pub(crate) fn build_program(
    cost: Vector,
    center: Vector,
    level: f64,
    anchor: Vector,
) -> Result<ConvexProgram> {
    let d = cost.len();
    let w = lambert_w1();
    // Feasibility forces |x - b| <= sqrt(2 level), bounding the optimum.
    let r = anchor.norm() + w * (d as f64).sqrt() + (2.0 * level).sqrt();
    let oracle = Arc::new(ExpOracle {
        center,
        level,
    });
    let constraint = ConstraintFunction::from_oracle(oracle, ConstraintKind::Smooth)
        .with_lipschitz(regional_lipschitz(d, w));
    Ok(ConvexProgram::new(LinearObjective::with_lipschitz(cost, 1.0)?, constraint, anchor)?
        .with_domain_bound(r))
}

/// Generates an exponential-constraint instance of dimension `d`; the
/// constraint level equals `d` and the anchor is sampled in the unit ball,
/// resampled until strictly feasible.
pub fn gen_exp(d: usize, seed: u64) -> Result<GeneratedInstance> {
    if d == 0 {
        return Err(Error::InvalidInput("exp instances need d >= 1".into()));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let cost = sample_unit_sphere(d, &mut rng)?;
    let w = lambert_w1();
    let center = Vector::from_vec(vec![w; d]);
    let level = d as f64;

    let probe = ExpOracle {
        center: center.clone(),
        level,
    };
    let mut anchor = None;
    for _ in 0..ANCHOR_ATTEMPTS {
        let candidate = sample_unit_ball(d, &mut rng)?;
        if probe.value(&candidate) < 0.0 {
            anchor = Some(candidate);
            break;
        }
    }
    let anchor = anchor.ok_or_else(|| {
        Error::GenerationFailure("no strictly feasible anchor found in the unit ball".into())
    })?;

    Ok(GeneratedInstance {
        spec: ProblemSpec::new(ProblemClass::Exp, seed).with_dimension(d),
        program: build_program(cost, center.clone(), level, anchor)?,
        reference: None,
        data: InstanceData::Exp(ExpData { center, level }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_w_solves_its_equation() {
        let w = lambert_w1();
        assert!((w * det_exp(w) - 1.0).abs() <= 1e-15);
        assert!((w - 0.5671432904097838).abs() <= 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_origin() {
        let inst = gen_exp(2, 5).unwrap();
        let g = inst.program.constraint().subgradient(&Vector::zeros(2));
        for i in 0..2 {
            assert!(g[i].abs() <= 1e-12, "gradient entry {}", g[i]);
        }
    }

    #[test]
    fn value_at_origin_matches_formula() {
        for d in [1usize, 2, 7] {
            let inst = gen_exp(d, 1).unwrap();
            let w = lambert_w1();
            let expected = d as f64 * (w * w / 2.0 + w - 1.0);
            let got = inst.program.constraint().value(&Vector::zeros(d));
            assert!((got - expected).abs() <= 1e-10, "d = {d}: {got} vs {expected}");
        }
    }

    #[test]
    fn convex_along_random_segments() {
        let inst = gen_exp(2, 9).unwrap();
        let h = inst.program.constraint();
        let mut rng = Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x = sample_unit_ball(2, &mut rng).unwrap().scaled(2.0);
            let y = sample_unit_ball(2, &mut rng).unwrap().scaled(2.0);
            let t = rng.next_f64();
            let mid = x.lin_comb(t, 1.0 - t, &y);
            assert!(h.value(&mid) <= t * h.value(&x) + (1.0 - t) * h.value(&y) + 1e-9);
        }
    }

    #[test]
    fn anchor_is_strictly_feasible() {
        for seed in 0..20 {
            let inst = gen_exp(2, seed).unwrap();
            assert!(inst.program.h_at_anchor() < 0.0);
        }
    }
}
