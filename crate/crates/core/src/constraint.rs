//! Convex domain-defining functions `h` with subgradient oracles.
//!
//! A constraint describes the feasible set `C = { x : h(x) <= 0 }`. Multiple
//! inequality constraints are folded into one sub-differentiable function by
//! taking their pointwise maximum ([`ConstraintFunction::max_of`]).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Evaluation oracle for a convex function: value and one subgradient.
///
/// `value_and_subgradient` exists so implementations that share work between
/// the two quantities (e.g. an eigendecomposition) can do it once; the default
/// just calls both.
pub trait ConstraintOracle: Send + Sync {
    fn value(&self, x: &Vector) -> f64;
    fn subgradient(&self, x: &Vector) -> Vector;
    fn value_and_subgradient(&self, x: &Vector) -> (f64, Vector) {
        (self.value(x), self.subgradient(x))
    }
}

/// How a constraint's (sub)gradient oracle should be interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Everywhere differentiable; the oracle returns the gradient.
    Smooth,
    /// Pointwise maximum of component constraints.
    MaxAggregate,
    /// Sub-differentiable only; the oracle returns some valid subgradient.
    Custom,
}

/// A convex constraint function with optional Lipschitz metadata.
///
/// Lipschitz constants are caller-supplied metadata: the library consumes
/// them (step-size selection) but never estimates them.
#[derive(Clone)]
pub struct ConstraintFunction {
    oracle: Arc<dyn ConstraintOracle>,
    kind: ConstraintKind,
    lipschitz: Option<f64>,
    components: Arc<[ConstraintFunction]>,
}

struct FnOracle<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> ConstraintOracle for FnOracle<V, G>
where
    V: Fn(&Vector) -> f64 + Send + Sync,
    G: Fn(&Vector) -> Vector + Send + Sync,
{
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }
    fn subgradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
}

struct MaxOracle {
    components: Arc<[ConstraintFunction]>,
}

impl MaxOracle {
    /// Index of the maximizing component, lowest index on ties.
    fn argmax(&self, x: &Vector) -> (usize, f64) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, c) in self.components.iter().enumerate() {
            let v = c.value(x);
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

impl ConstraintOracle for MaxOracle {
    fn value(&self, x: &Vector) -> f64 {
        self.argmax(x).1
    }

    fn subgradient(&self, x: &Vector) -> Vector {
        let (i, _) = self.argmax(x);
        self.components[i].subgradient(x)
    }

    fn value_and_subgradient(&self, x: &Vector) -> (f64, Vector) {
        let (i, v) = self.argmax(x);
        (v, self.components[i].subgradient(x))
    }
}

impl ConstraintFunction {
    /// Everywhere-differentiable constraint given by value and gradient closures.
    pub fn smooth<V, G>(value: V, gradient: G) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        ConstraintFunction {
            oracle: Arc::new(FnOracle { value, gradient }),
            kind: ConstraintKind::Smooth,
            lipschitz: None,
            components: Arc::from([]),
        }
    }

    /// Sub-differentiable constraint given by value and subgradient closures.
    pub fn custom<V, G>(value: V, subgradient: G) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        ConstraintFunction {
            kind: ConstraintKind::Custom,
            ..Self::smooth(value, subgradient)
        }
    }

    /// Constraint backed by a shared oracle implementation.
    pub fn from_oracle(oracle: Arc<dyn ConstraintOracle>, kind: ConstraintKind) -> Self {
        ConstraintFunction {
            oracle,
            kind,
            lipschitz: None,
            components: Arc::from([]),
        }
    }

    /// Pointwise maximum `h(x) = max_i h_i(x)` of the given components.
    ///
    /// The subgradient at `x` is the subgradient of a maximizing component
    /// (lowest index on ties — any maximizer's subgradient is valid, fixing
    /// the index keeps runs deterministic). The Lipschitz bound is the max of
    /// the component bounds when all of them are known.
    pub fn max_of(components: Vec<ConstraintFunction>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput(
                "max-aggregate needs at least one component".into(),
            ));
        }
        let lipschitz = components
            .iter()
            .map(|c| c.lipschitz)
            .try_fold(0f64, |acc, l| l.map(|l| acc.max(l)));
        let components: Arc<[ConstraintFunction]> = components.into();
        Ok(ConstraintFunction {
            oracle: Arc::new(MaxOracle {
                components: Arc::clone(&components),
            }),
            kind: ConstraintKind::MaxAggregate,
            lipschitz,
            components,
        })
    }

    pub fn with_lipschitz(mut self, bound: f64) -> Self {
        self.lipschitz = Some(bound);
        self
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.oracle.value(x)
    }

    pub fn subgradient(&self, x: &Vector) -> Vector {
        self.oracle.subgradient(x)
    }

    pub fn value_and_subgradient(&self, x: &Vector) -> (f64, Vector) {
        self.oracle.value_and_subgradient(x)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Components of a max-aggregate; empty for other kinds.
    pub fn components(&self) -> &[ConstraintFunction] {
        &self.components
    }
}

/// Affine constraint `a . x + offset <= 0`; the basic building block for
/// halfspace feasible sets.
pub fn halfspace(a: Vector, offset: f64) -> ConstraintFunction {
    let norm = a.norm();
    let grad = a.clone();
    ConstraintFunction::smooth(move |x: &Vector| a.dot(x) + offset, move |_| grad.clone())
        .with_lipschitz(norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_of_empty_rejected() {
        assert!(ConstraintFunction::max_of(vec![]).is_err());
    }

    #[test]
    fn single_component_identical() {
        let comp = halfspace(Vector::from_slice(&[2.0, 0.0]), -1.0);
        let agg = ConstraintFunction::max_of(vec![comp.clone()]).unwrap();
        let x = Vector::from_slice(&[3.0, -4.0]);
        assert_eq!(agg.value(&x), comp.value(&x));
        assert_eq!(agg.subgradient(&x), comp.subgradient(&x));
        assert_eq!(agg.lipschitz(), Some(2.0));
        assert_eq!(agg.kind(), ConstraintKind::MaxAggregate);
    }

    #[test]
    fn strict_maximizer_selected() {
        let a1 = halfspace(Vector::from_slice(&[1.0, 0.0]), 0.0);
        let a2 = halfspace(Vector::from_slice(&[0.0, 1.0]), 0.0);
        let agg = ConstraintFunction::max_of(vec![a1, a2]).unwrap();
        let x = Vector::from_slice(&[5.0, 1.0]);
        assert_eq!(agg.value(&x), 5.0);
        assert_eq!(agg.subgradient(&x), Vector::from_slice(&[1.0, 0.0]));
    }

    #[test]
    fn tie_picks_lowest_index() {
        let a1 = halfspace(Vector::from_slice(&[1.0, 0.0]), 0.0);
        let a2 = halfspace(Vector::from_slice(&[0.0, 1.0]), 0.0);
        let agg = ConstraintFunction::max_of(vec![a1, a2]).unwrap();
        let x = Vector::from_slice(&[2.0, 2.0]);
        assert_eq!(agg.subgradient(&x), Vector::from_slice(&[1.0, 0.0]));
    }

    #[test]
    fn unknown_component_bound_clears_aggregate_bound() {
        let known = halfspace(Vector::from_slice(&[1.0]), 0.0);
        let unknown = ConstraintFunction::custom(|x: &Vector| x[0].abs(), |x: &Vector| {
            Vector::from_slice(&[x[0].signum()])
        });
        let agg = ConstraintFunction::max_of(vec![known, unknown]).unwrap();
        assert_eq!(agg.lipschitz(), None);
    }

    #[test]
    fn fused_evaluation_matches_split() {
        let a1 = halfspace(Vector::from_slice(&[1.0, 2.0]), -0.5);
        let a2 = halfspace(Vector::from_slice(&[-1.0, 1.0]), 0.25);
        let agg = ConstraintFunction::max_of(vec![a1, a2]).unwrap();
        let x = Vector::from_slice(&[0.3, 0.7]);
        let (v, s) = agg.value_and_subgradient(&x);
        assert_eq!(v, agg.value(&x));
        assert_eq!(s, agg.subgradient(&x));
    }
}
