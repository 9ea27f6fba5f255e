//! Second-order-cone family: minimize `c . x` subject to
//! `|A_i x + b_i| <= z_i . x + d_i` for `i = 1..M`.
//!
//! The offsets `d_i` are chosen so every cone constraint is exactly active at
//! a raw sphere sample, which leaves `h(x0) = 0` — unusable as a projection
//! anchor. The anchor is therefore refined by running Adam on `max_i h_i` for
//! 100 steps at step size 1e-2; instances whose refinement fails to reach a
//! strictly negative value are resampled (a bounded number of times), and the
//! refined anchor is the one shared by all algorithms.

use std::sync::Arc;

use crate::constraint::{ConstraintFunction, ConstraintKind, ConstraintOracle};
use crate::error::{Error, Result};
use crate::linalg::{sample_normal, sample_unit_sphere, sym_eig, Matrix, Rng, Vector};
use crate::optim::{run_adam, AdamConfig};
use crate::program::{ConvexProgram, LinearObjective};

use super::{GeneratedInstance, InstanceData, ProblemClass, ProblemSpec, SocData};

/// Resampling budget when the anchor refinement fails to enter the interior.
pub const RESAMPLE_LIMIT: usize = 16;

/// One cone constraint `|a x + b| - z . x - offset <= 0`.
#[derive(Clone, Debug)]
pub struct SocCone {
    pub a: Matrix,
    pub b: Vector,
    pub z: Vector,
    pub offset: f64,
}

impl ConstraintOracle for SocCone {
    fn value(&self, x: &Vector) -> f64 {
        let mut ax = self.a.matvec(x);
        ax.add_scaled(1.0, &self.b);
        ax.norm() - self.z.dot(x) - self.offset
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        self.value_and_subgradient(x).1
    }

    fn value_and_subgradient(&self, x: &Vector) -> (f64, Vector) {
        let mut ax = self.a.matvec(x);
        ax.add_scaled(1.0, &self.b);
        let norm = ax.norm();
        let value = norm - self.z.dot(x) - self.offset;
        // At |Ax + b| = 0 the zero direction is a valid subgradient choice.
        let mut sub = if norm == 0.0 {
            Vector::zeros(x.len())
        } else {
            self.a.tr_matvec(&ax.scaled(1.0 / norm))
        };
        sub.add_scaled(-1.0, &self.z);
        (value, sub)
    }
}

fn spectral_norm(a: &Matrix) -> Result<f64> {
    let gram = a.transpose().matmul(a);
    let eig = sym_eig(&gram)?;
    Ok(eig.eigenvalues[a.cols() - 1].max(0.0).sqrt())
}

fn cone_component(cone: Arc<SocCone>) -> Result<ConstraintFunction> {
    let bound = spectral_norm(&cone.a)? + cone.z.norm();
    Ok(
        ConstraintFunction::from_oracle(cone, ConstraintKind::Custom)
            .with_lipschitz(bound),
    )
}

pub(crate) fn build_program(
    cones: &[Arc<SocCone>],
    cost: Vector,
    anchor: Vector,
) -> Result<ConvexProgram> {
    let components = cones
        .iter()
        .map(|c| cone_component(Arc::clone(c)))
        .collect::<Result<Vec<_>>>()?;
    ConvexProgram::new(
        LinearObjective::with_lipschitz(cost, 1.0)?,
        ConstraintFunction::max_of(components)?,
        anchor,
    )
}

/// Generates a second-order-cone instance of dimension `d` with `m` cones.
pub fn gen_soc(d: usize, m: usize, seed: u64) -> Result<GeneratedInstance> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidInput(
            "cone instances need d >= 1 and m >= 1".into(),
        ));
    }
    let mut rng = Rng::seed_from_u64(seed);

    for _ in 0..RESAMPLE_LIMIT {
        let cost = sample_unit_sphere(d, &mut rng)?;
        let raw_anchor = sample_unit_sphere(d, &mut rng)?;
        let mut cones = Vec::with_capacity(m);
        for _ in 0..m {
            let a_data: Vec<f64> = (0..d * d).map(|_| rng.next_normal()).collect();
            let a = Matrix::from_vec(d, d, a_data).expect("finite normal samples");
            let b = sample_normal(d, &mut rng)?;
            let z = sample_normal(d, &mut rng)?;
            // Offset making the cone exactly active at the raw anchor.
            let mut ax = a.matvec(&raw_anchor);
            ax.add_scaled(1.0, &b);
            let offset = ax.norm() - z.dot(&raw_anchor);
            cones.push(Arc::new(SocCone { a, b, z, offset }));
        }

        let components = cones
            .iter()
            .map(|c| cone_component(Arc::clone(c)))
            .collect::<Result<Vec<_>>>()?;
        let aggregate = ConstraintFunction::max_of(components)?;
        let refined = run_adam(
            |x| aggregate.subgradient(x),
            &raw_anchor,
            &AdamConfig::default(),
        )?;
        if aggregate.value(&refined) >= 0.0 {
            continue;
        }

        return Ok(GeneratedInstance {
            spec: ProblemSpec::new(ProblemClass::Soc, seed)
                .with_dimension(d)
                .with_constraints(m),
            program: build_program(&cones, cost, refined)?,
            reference: None,
            data: InstanceData::Soc(SocData { cones, raw_anchor }),
        });
    }
    Err(Error::GenerationFailure(format!(
        "anchor refinement failed on {RESAMPLE_LIMIT} consecutive instances (seed {seed})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_unit_ball;

    #[test]
    fn raw_anchor_sits_on_every_cone_boundary() {
        let inst = gen_soc(20, 5, 3).unwrap();
        let InstanceData::Soc(data) = &inst.data else {
            panic!("wrong metadata")
        };
        for cone in data.cones.iter() {
            assert!(cone.value(&data.raw_anchor).abs() <= 1e-10);
        }
    }

    #[test]
    fn refined_anchor_is_interior() {
        for seed in 0..10 {
            let inst = gen_soc(20, 5, seed).unwrap();
            assert!(inst.program.h_at_anchor() < 0.0, "seed {seed}");
        }
    }

    #[test]
    fn components_are_convex_along_segments() {
        let inst = gen_soc(10, 3, 8).unwrap();
        let InstanceData::Soc(data) = &inst.data else {
            panic!("wrong metadata")
        };
        let mut rng = Rng::seed_from_u64(21);
        for cone in data.cones.iter() {
            for _ in 0..200 {
                let x = sample_unit_ball(10, &mut rng).unwrap().scaled(3.0);
                let y = sample_unit_ball(10, &mut rng).unwrap().scaled(3.0);
                let t = rng.next_f64();
                let mid = x.lin_comb(t, 1.0 - t, &y);
                assert!(
                    cone.value(&mid) <= t * cone.value(&x) + (1.0 - t) * cone.value(&y) + 1e-9
                );
            }
        }
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let inst = gen_soc(10, 3, 5).unwrap();
        let InstanceData::Soc(data) = &inst.data else {
            panic!("wrong metadata")
        };
        let mut rng = Rng::seed_from_u64(2);
        let cone = &data.cones[0];
        for _ in 0..5 {
            let x = sample_normal(10, &mut rng).unwrap();
            let (_, s) = cone.value_and_subgradient(&x);
            let step = 1e-6;
            for i in 0..10 {
                let mut xp = x.clone();
                xp[i] += step;
                let mut xm = x.clone();
                xm[i] -= step;
                let fd = (cone.value(&xp) - cone.value(&xm)) / (2.0 * step);
                assert!((fd - s[i]).abs() <= 1e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn lipschitz_bound_covers_observed_subgradients() {
        let inst = gen_soc(10, 3, 13).unwrap();
        let h = inst.program.constraint();
        let bound = h.lipschitz().unwrap();
        let mut rng = Rng::seed_from_u64(31);
        for _ in 0..100 {
            let x = sample_normal(10, &mut rng).unwrap().scaled(5.0);
            assert!(h.subgradient(&x).norm() <= bound + 1e-9);
        }
    }
}
