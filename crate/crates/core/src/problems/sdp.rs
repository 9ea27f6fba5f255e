//! Semidefinite family: minimize `c . x` subject to `sum_i x_i A_i >= C`
//! (matrix inequality in the positive-semidefinite order).
//!
//! The domain-defining function is `h(x) = -lambda_min(sum_i x_i A_i - C)`
//! with subgradient entries `-v^T A_i v`, where `v` is a unit eigenvector of
//! the smallest eigenvalue. Instances are built around a Slater point and a
//! positive-semidefinite dual certificate so that strict feasibility and a
//! finite optimum hold by construction.

use std::sync::Arc;

use crate::constraint::{ConstraintFunction, ConstraintKind, ConstraintOracle};
use crate::error::{Error, Result};
use crate::linalg::{sample_normal, sym_eig, Matrix, Rng, Vector};
use crate::program::{ConvexProgram, LinearObjective};

use super::{GeneratedInstance, InstanceData, ProblemClass, ProblemSpec};

/// Raw data of one semidefinite instance: `h(x) = -lambda_min(sum x_i mats_i - shift)`.
#[derive(Clone, Debug)]
pub struct SdpData {
    pub mats: Vec<Matrix>,
    pub shift: Matrix,
}

impl SdpData {
    pub fn matrix_size(&self) -> usize {
        self.shift.rows()
    }

    pub fn variables(&self) -> usize {
        self.mats.len()
    }

    /// The symmetric pencil `sum_i x_i mats_i - shift` whose smallest
    /// eigenvalue defines the constraint.
    pub fn pencil_matrix(&self, x: &Vector) -> Matrix {
        let mut s = self.shift.clone();
        s.scale_all(-1.0);
        for (xi, a) in x.iter().zip(self.mats.iter()) {
            s.add_scaled(*xi, a);
        }
        s
    }
}

/// Eigenvalue-based constraint oracle; one eigendecomposition serves both the
/// value and the subgradient.
struct SdpOracle {
    data: Arc<SdpData>,
}

impl SdpOracle {
    fn eig_min(&self, x: &Vector) -> Option<(f64, Vector)> {
        let s = self.data.pencil_matrix(x);
        sym_eig(&s).ok().map(|r| r.min_pair())
    }
}

impl ConstraintOracle for SdpOracle {
    fn value(&self, x: &Vector) -> f64 {
        // Jacobi failure cannot occur on finite symmetric input; a NaN here
        // propagates to the solvers' finiteness checks instead of panicking.
        self.eig_min(x).map_or(f64::NAN, |(w, _)| -w)
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        self.value_and_subgradient(x).1
    }

    fn value_and_subgradient(&self, x: &Vector) -> (f64, Vector) {
        match self.eig_min(x) {
            Some((w, v)) => {
                let s = Vector::from_vec(
                    self.data
                        .mats
                        .iter()
                        .map(|a| -a.matvec(&v).dot(&v))
                        .collect(),
                );
                (-w, s)
            }
            None => (f64::NAN, Vector::zeros(self.data.variables())),
        }
    }
}

/// Sum of squared spectral norms bounds the subgradient norm globally:
/// `|v^T A_i v| <= |A_i|_2` for unit `v`.
fn subgradient_bound(mats: &[Matrix]) -> Result<f64> {
    let mut sum = 0.0;
    for a in mats {
        let eig = sym_eig(a)?;
        let lo = eig.eigenvalues[0].abs();
        let hi = eig.eigenvalues[a.rows() - 1].abs();
        let spectral = lo.max(hi);
        sum += spectral * spectral;
    }
    Ok(sum.sqrt())
}

pub(crate) fn build_program(
    data: Arc<SdpData>,
    cost: Vector,
    anchor: Vector,
) -> Result<ConvexProgram> {
    let lipschitz = subgradient_bound(&data.mats)?;
    let constraint = ConstraintFunction::from_oracle(
        Arc::new(SdpOracle { data }),
        ConstraintKind::Custom,
    )
    .with_lipschitz(lipschitz);
    ConvexProgram::new(LinearObjective::new(cost), constraint, anchor)
}

fn sample_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.next_normal()).collect();
    Matrix::from_vec(rows, cols, data).expect("finite normal samples")
}

fn symmetrized(b: &Matrix) -> Matrix {
    let n = b.rows();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, 0.5 * (b.get(i, j) + b.get(j, i)));
        }
    }
    a
}

/// Generates a semidefinite instance with `n x n` matrices and `m` variables.
///
/// Construction: symmetrized Gaussian `A_i`; Slater point `x_hat` (the
/// anchor) with a well-conditioned positive-definite margin `D = Q L Q^T`
/// (`L` uniform in `[0.5, 1.5]`) defining `C = sum x_hat_i A_i - D`, so
/// `h(x_hat) = -lambda_min(D) < 0`; and a cost read off a positive-
/// semidefinite certificate `Z = G G^T` via `c_i = tr(A_i Z)`, normalized to
/// unit length, which bounds the objective below and keeps the optimum
/// finite.
pub fn gen_sdp(n: usize, m: usize, seed: u64) -> Result<GeneratedInstance> {
    if n < 2 || m == 0 {
        return Err(Error::InvalidInput(
            "semidefinite instances need n >= 2 and m >= 1".into(),
        ));
    }
    let mut rng = Rng::seed_from_u64(seed);

    let mats: Vec<Matrix> = (0..m)
        .map(|_| symmetrized(&sample_matrix(n, n, &mut rng)))
        .collect();
    let anchor = sample_normal(m, &mut rng)?;

    let q = crate::linalg::orthonormal_factor(&sample_matrix(n, n, &mut rng));
    let mut d = Matrix::zeros(n, n);
    for k in 0..n {
        let lam = rng.next_range(0.5, 1.5);
        let qk = q.col(k);
        for i in 0..n {
            for j in 0..n {
                d.set(i, j, d.get(i, j) + lam * qk[i] * qk[j]);
            }
        }
    }
    let mut shift = Matrix::zeros(n, n);
    for (xi, a) in anchor.iter().zip(mats.iter()) {
        shift.add_scaled(*xi, a);
    }
    shift.add_scaled(-1.0, &d);

    let g = sample_matrix(n, n, &mut rng);
    let z = g.matmul(&g.transpose());
    let mut cost = Vector::from_vec(
        mats.iter()
            .map(|a| {
                a.as_slice()
                    .iter()
                    .zip(z.as_slice().iter())
                    .map(|(x, y)| x * y)
                    .sum()
            })
            .collect(),
    );
    let cost_norm = cost.norm();
    if cost_norm <= 1e-12 {
        return Err(Error::GenerationFailure(
            "degenerate certificate produced a zero cost vector".into(),
        ));
    }
    cost.scale(1.0 / cost_norm);

    let data = Arc::new(SdpData { mats, shift });
    Ok(GeneratedInstance {
        spec: ProblemSpec::new(ProblemClass::Sdp, seed).with_dimension(m),
        program: build_program(Arc::clone(&data), cost, anchor)?,
        reference: None,
        data: InstanceData::Sdp(data),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_margin_is_the_conditioning_spectrum() {
        for seed in 0..10 {
            let inst = gen_sdp(10, 10, seed).unwrap();
            // h(x_hat) = -lambda_min(D) with D's spectrum in [0.5, 1.5].
            let h0 = inst.program.h_at_anchor();
            assert!(h0 < -0.5 + 1e-9 && h0 > -1.5 - 1e-9, "h0 = {h0}");
        }
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let inst = gen_sdp(10, 10, 2).unwrap();
        let h = inst.program.constraint();
        let mut rng = Rng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 5 {
            let x = sample_normal(10, &mut rng).unwrap();
            // Only probe where lambda_min is simple enough for smoothness.
            let InstanceData::Sdp(data) = &inst.data else {
                panic!()
            };
            let eig = sym_eig(&data.pencil_matrix(&x)).unwrap();
            if eig.eigenvalues[1] - eig.eigenvalues[0] < 1e-3 {
                continue;
            }
            let s = h.subgradient(&x);
            let step = 1e-6;
            for i in 0..10 {
                let mut xp = x.clone();
                xp[i] += step;
                let mut xm = x.clone();
                xm[i] -= step;
                let fd = (h.value(&xp) - h.value(&xm)) / (2.0 * step);
                assert!(
                    (fd - s[i]).abs() <= 1e-4 * (1.0 + fd.abs()),
                    "coordinate {i}: fd {fd} vs subgradient {}",
                    s[i]
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn scalar_case_has_known_form() {
        // One variable, A = I, C = 0: h(x) = -x1, subgradient -1; the
        // optimum of min x1 s.t. x1 I >= 0 is approached as x1 -> 0+.
        let data = Arc::new(SdpData {
            mats: vec![Matrix::identity(3)],
            shift: Matrix::zeros(3, 3),
        });
        let program = build_program(
            Arc::clone(&data),
            Vector::from_slice(&[1.0]),
            Vector::from_slice(&[1.0]),
        )
        .unwrap();
        let x = Vector::from_slice(&[0.7]);
        assert!((program.constraint().value(&x) + 0.7).abs() <= 1e-12);
        let s = program.constraint().subgradient(&x);
        assert!((s[0] + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn subgradient_inequality_holds() {
        // h(y) >= h(x) + s(x) . (y - x): valid even at eigenvalue crossings.
        let inst = gen_sdp(8, 6, 4).unwrap();
        let h = inst.program.constraint();
        let mut rng = Rng::seed_from_u64(9);
        for _ in 0..50 {
            let x = sample_normal(6, &mut rng).unwrap();
            let y = sample_normal(6, &mut rng).unwrap();
            let (hx, s) = h.value_and_subgradient(&x);
            assert!(hx + s.dot(&(&y - &x)) <= h.value(&y) + 1e-7);
        }
    }

    #[test]
    fn cost_is_unit_norm() {
        let inst = gen_sdp(10, 10, 1).unwrap();
        assert!((inst.program.objective().cost().norm() - 1.0).abs() <= 1e-12);
    }
}
