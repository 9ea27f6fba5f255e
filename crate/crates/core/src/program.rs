//! Constrained program representation: linear objective, convex inequality
//! constraint, strictly feasible anchor, and optional affine equalities.

use crate::constraint::ConstraintFunction;
use crate::error::{Error, Result};
use crate::linalg::{null_space_basis, Matrix, Vector};

/// Linear objective `f(x) = c . x` with its Lipschitz bound `|c| <= L`.
#[derive(Clone)]
pub struct LinearObjective {
    cost: Vector,
    lipschitz: f64,
}

impl LinearObjective {
    /// Objective with the tight bound `L = |c|`.
    pub fn new(cost: Vector) -> Self {
        let lipschitz = cost.norm();
        LinearObjective { cost, lipschitz }
    }

    /// Objective with a caller-supplied bound; must satisfy `|c| <= L`.
    pub fn with_lipschitz(cost: Vector, lipschitz: f64) -> Result<Self> {
        if cost.norm() > lipschitz * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "cost norm {} exceeds the declared Lipschitz bound {lipschitz}",
                cost.norm()
            )));
        }
        Ok(LinearObjective { cost, lipschitz })
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.cost.dot(x)
    }

    /// The gradient of a linear objective is the constant cost vector.
    pub fn gradient(&self) -> &Vector {
        &self.cost
    }

    pub fn cost(&self) -> &Vector {
        &self.cost
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn dimension(&self) -> usize {
        self.cost.len()
    }
}

/// Affine equality system `A x = b`.
#[derive(Clone)]
pub struct AffineEquality {
    pub matrix: Matrix,
    pub rhs: Vector,
}

/// A convex program: minimize `c . x` subject to `h(x) <= 0` (and optionally
/// `A x = b`), with a strictly feasible anchor `x0` satisfying `h(x0) < 0`.
///
/// Values are immutable after construction and all operations on them are
/// pure, so programs can be shared freely across threads.
#[derive(Clone)]
pub struct ConvexProgram {
    objective: LinearObjective,
    constraint: ConstraintFunction,
    anchor: Vector,
    h_at_anchor: f64,
    equality: Option<AffineEquality>,
    domain_bound: Option<f64>,
    reference_optimum: Option<f64>,
}

impl ConvexProgram {
    /// Builds a program, checking that the anchor is strictly feasible.
    pub fn new(
        objective: LinearObjective,
        constraint: ConstraintFunction,
        anchor: Vector,
    ) -> Result<Self> {
        if !anchor.is_finite() {
            return Err(Error::InvalidInput("non-finite anchor".into()));
        }
        if objective.dimension() != anchor.len() {
            return Err(Error::InvalidInput(format!(
                "objective dimension {} vs anchor dimension {}",
                objective.dimension(),
                anchor.len()
            )));
        }
        let h_at_anchor = constraint.value(&anchor);
        if !(h_at_anchor < 0.0) {
            return Err(Error::InvalidAnchor(format!(
                "h(x0) = {h_at_anchor}, expected a strictly negative value"
            )));
        }
        Ok(ConvexProgram {
            objective,
            constraint,
            anchor,
            h_at_anchor,
            equality: None,
            domain_bound: None,
            reference_optimum: None,
        })
    }

    /// Attaches `A x = b`; the anchor must already satisfy it to `1e-10`.
    pub fn with_equality(mut self, equality: AffineEquality) -> Result<Self> {
        let mut residual = equality.matrix.matvec(&self.anchor);
        residual.add_scaled(-1.0, &equality.rhs);
        if residual.norm() > 1e-10 * (1.0 + equality.rhs.norm()) {
            return Err(Error::InvalidAnchor(format!(
                "anchor violates the equality system (residual {})",
                residual.norm()
            )));
        }
        self.equality = Some(equality);
        Ok(self)
    }

    /// Declares a bound `R` on the anchor-to-optimum distance.
    pub fn with_domain_bound(mut self, r: f64) -> Self {
        self.domain_bound = Some(r);
        self
    }

    /// Records a known or estimated optimal value.
    pub fn with_reference_optimum(mut self, f_star: f64) -> Self {
        self.reference_optimum = Some(f_star);
        self
    }

    pub fn objective(&self) -> &LinearObjective {
        &self.objective
    }

    pub fn constraint(&self) -> &ConstraintFunction {
        &self.constraint
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    /// Cached `h(x0) < 0`.
    pub fn h_at_anchor(&self) -> f64 {
        self.h_at_anchor
    }

    pub fn equality(&self) -> Option<&AffineEquality> {
        self.equality.as_ref()
    }

    pub fn domain_bound(&self) -> Option<f64> {
        self.domain_bound
    }

    pub fn reference_optimum(&self) -> Option<f64> {
        self.reference_optimum
    }

    pub fn dimension(&self) -> usize {
        self.anchor.len()
    }

    /// Same program re-anchored at another strictly feasible point.
    pub fn reanchored(&self, anchor: Vector) -> Result<Self> {
        let mut program = ConvexProgram::new(
            self.objective.clone(),
            self.constraint.clone(),
            anchor,
        )?;
        program.equality = self.equality.clone();
        program.domain_bound = self.domain_bound;
        program.reference_optimum = self.reference_optimum;
        Ok(program)
    }
}

/// Change of variable `x = F z + x0` that eliminates an equality system.
#[derive(Clone)]
pub struct EqualityLift {
    basis: Matrix,
    offset: Vector,
}

impl EqualityLift {
    /// Maps a reduced point `z` back to the original space.
    pub fn lift(&self, z: &Vector) -> Vector {
        let mut x = self.basis.matvec(z);
        x.add_scaled(1.0, &self.offset);
        x
    }

    /// Orthonormal kernel basis `F`.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn reduced_dimension(&self) -> usize {
        self.basis.cols()
    }
}

/// Eliminates the program's affine equality `A x = b` by substituting
/// `x = F z + x0`, where the columns of `F` span the kernel of `A`.
///
/// The reduced program minimizes `(F^T c) . z` subject to `h(F z + x0) <= 0`
/// with anchor `z0 = 0`; the objective stays linear and every lifted point
/// satisfies the equality system. Lipschitz metadata carries over since `F`
/// has orthonormal columns.
pub fn eliminate_equality(program: &ConvexProgram) -> Result<(ConvexProgram, EqualityLift)> {
    let equality = program.equality().ok_or_else(|| {
        Error::InvalidInput("program has no equality system to eliminate".into())
    })?;
    let basis = null_space_basis(&equality.matrix);
    let lift = EqualityLift {
        basis: basis.clone(),
        offset: program.anchor().clone(),
    };

    let reduced_cost = basis.tr_matvec(program.objective().cost());
    let reduced_objective = LinearObjective::new(reduced_cost);

    let inner = program.constraint().clone();
    let lift_for_value = lift.clone();
    let lift_for_grad = lift.clone();
    let grad_inner = program.constraint().clone();
    let grad_basis = basis;
    let mut reduced_constraint = ConstraintFunction::custom(
        move |z: &Vector| inner.value(&lift_for_value.lift(z)),
        move |z: &Vector| {
            let s = grad_inner.subgradient(&lift_for_grad.lift(z));
            grad_basis.tr_matvec(&s)
        },
    );
    if let Some(h) = program.constraint().lipschitz() {
        reduced_constraint = reduced_constraint.with_lipschitz(h);
    }

    let mut reduced = ConvexProgram::new(
        reduced_objective,
        reduced_constraint,
        Vector::zeros(lift.reduced_dimension()),
    )?;
    if let Some(r) = program.domain_bound() {
        reduced = reduced.with_domain_bound(r);
    }
    if let Some(f) = program.reference_optimum() {
        reduced = reduced.with_reference_optimum(f);
    }
    Ok((reduced, lift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng::{sample_normal, Rng};
    use crate::linalg::sample_unit_ball;

    fn ball_constraint() -> ConstraintFunction {
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

    #[test]
    fn rejects_infeasible_anchor() {
        let c = LinearObjective::new(Vector::from_slice(&[1.0, 0.0]));
        let err = ConvexProgram::new(c, ball_constraint(), Vector::from_slice(&[2.0, 0.0]));
        assert!(matches!(err, Err(Error::InvalidAnchor(_))));
    }

    #[test]
    fn rejects_boundary_anchor() {
        let c = LinearObjective::new(Vector::from_slice(&[1.0, 0.0]));
        let err = ConvexProgram::new(c, ball_constraint(), Vector::from_slice(&[1.0, 0.0]));
        assert!(matches!(err, Err(Error::InvalidAnchor(_))));
    }

    #[test]
    fn objective_bound_validated() {
        let err = LinearObjective::with_lipschitz(Vector::from_slice(&[3.0, 4.0]), 4.0);
        assert!(err.is_err());
        let ok = LinearObjective::with_lipschitz(Vector::from_slice(&[3.0, 4.0]), 5.0);
        assert!(ok.is_ok());
    }

    #[test]
    fn equality_requires_consistent_anchor() {
        let c = LinearObjective::new(Vector::from_slice(&[1.0, 0.0]));
        let program = ConvexProgram::new(
            c,
            ball_constraint(),
            Vector::from_slice(&[0.5, 0.0]),
        )
        .unwrap();
        let eq = AffineEquality {
            matrix: Matrix::from_rows(&[&[1.0, 1.0]]),
            rhs: Vector::from_slice(&[0.25]),
        };
        assert!(program.clone().with_equality(eq).is_err());
        let eq_ok = AffineEquality {
            matrix: Matrix::from_rows(&[&[1.0, 1.0]]),
            rhs: Vector::from_slice(&[0.5]),
        };
        assert!(program.with_equality(eq_ok).is_ok());
    }

    #[test]
    fn elimination_identity_pins_everything() {
        let c = LinearObjective::new(Vector::from_slice(&[1.0, 0.0]));
        let anchor = Vector::from_slice(&[0.25, 0.25]);
        let program = ConvexProgram::new(c, ball_constraint(), anchor.clone())
            .unwrap()
            .with_equality(AffineEquality {
                matrix: Matrix::identity(2),
                rhs: anchor.clone(),
            })
            .unwrap();
        let (reduced, lift) = eliminate_equality(&program).unwrap();
        assert_eq!(reduced.dimension(), 0);
        assert_eq!(lift.lift(&Vector::zeros(0)), anchor);
    }

    #[test]
    fn elimination_keeps_lifted_points_on_the_line() {
        let c = LinearObjective::new(Vector::from_slice(&[1.0, 1.0]));
        let anchor = Vector::from_slice(&[0.5, -0.5]);
        let program = ConvexProgram::new(c, ball_constraint(), anchor)
            .unwrap()
            .with_equality(AffineEquality {
                matrix: Matrix::from_rows(&[&[1.0, 1.0]]),
                rhs: Vector::from_slice(&[0.0]),
            })
            .unwrap();
        let (reduced, lift) = eliminate_equality(&program).unwrap();
        assert_eq!(reduced.dimension(), 1);
        for z in [-2.0, -0.3, 0.0, 1.7] {
            let x = lift.lift(&Vector::from_slice(&[z]));
            assert!((x[0] + x[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn elimination_preserves_anchor_value() {
        let mut rng = Rng::seed_from_u64(31);
        for _ in 0..10 {
            let d = 5;
            let mut a = Matrix::zeros(2, d);
            for i in 0..2 {
                for j in 0..d {
                    a.set(i, j, rng.next_normal());
                }
            }
            // Anchor inside the unit ball so the ball constraint is strictly
            // satisfied, with the equality built around it.
            let anchor = sample_unit_ball(d, &mut rng).unwrap().scaled(0.9);
            let rhs = a.matvec(&anchor);
            let cost = sample_normal(d, &mut rng).unwrap();
            let program = ConvexProgram::new(
                LinearObjective::new(cost),
                ball_constraint(),
                anchor.clone(),
            )
            .unwrap()
            .with_equality(AffineEquality { matrix: a, rhs })
            .unwrap();
            let (reduced, _) = eliminate_equality(&program).unwrap();
            let h0 = reduced.constraint().value(&Vector::zeros(reduced.dimension()));
            assert!((h0 - program.h_at_anchor()).abs() <= 1e-12);
        }
    }

    #[test]
    fn subgradient_contract_on_reduced_constraint() {
        // h(y) >= h(x) + s(x).(y - x) for the lifted composition.
        let mut rng = Rng::seed_from_u64(88);
        let d = 4;
        let mut a = Matrix::zeros(1, d);
        for j in 0..d {
            a.set(0, j, rng.next_normal());
        }
        let anchor = Vector::zeros(d);
        let rhs = Vector::from_slice(&[0.0]);
        let program = ConvexProgram::new(
            LinearObjective::new(Vector::basis(d, 0)),
            ball_constraint(),
            anchor,
        )
        .unwrap()
        .with_equality(AffineEquality { matrix: a, rhs })
        .unwrap();
        let (reduced, _) = eliminate_equality(&program).unwrap();
        let h = reduced.constraint();
        for _ in 0..50 {
            let x = sample_normal(reduced.dimension(), &mut rng).unwrap();
            let y = sample_normal(reduced.dimension(), &mut rng).unwrap();
            let s = h.subgradient(&x);
            let lhs = h.value(&x) + s.dot(&(&y - &x));
            assert!(lhs <= h.value(&y) + 1e-9);
        }
    }
}
