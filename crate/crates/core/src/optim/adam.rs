//! Reference Adam recursion, used to refine cone-program anchor points and
//! available as a general-purpose local optimizer.

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Adam hyperparameters. The moment decay rates and epsilon are the standard
/// defaults; the step count and step size default to the values used by the
/// anchor-refinement procedure.
#[derive(Clone, Copy, Debug)]
pub struct AdamConfig {
    pub steps: usize,
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            steps: 100,
            step_size: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Runs the Adam recursion with bias-corrected moments and returns the final
/// iterate.
///
/// `gradient` may be a subgradient oracle for non-smooth targets. Non-finite
/// gradients or iterates abort with a numerical error.
pub fn run_adam(
    gradient: impl Fn(&Vector) -> Vector,
    start: &Vector,
    config: &AdamConfig,
) -> Result<Vector> {
    if !start.is_finite() {
        return Err(Error::InvalidInput("non-finite start point".into()));
    }
    let d = start.len();
    let mut x = start.clone();
    let mut m = Vector::zeros(d);
    let mut v = Vector::zeros(d);
    // Running beta powers; avoids platform-dependent powi lowering.
    let mut beta1_pow = 1.0;
    let mut beta2_pow = 1.0;

    for t in 0..config.steps {
        let g = gradient(&x);
        if !g.is_finite() {
            return Err(Error::Numerical(format!(
                "gradient became non-finite at step {t}"
            )));
        }
        beta1_pow *= config.beta1;
        beta2_pow *= config.beta2;
        for i in 0..d {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            let m_hat = m[i] / (1.0 - beta1_pow);
            let v_hat = v[i] / (1.0 - beta2_pow);
            x[i] -= config.step_size * m_hat / (v_hat.sqrt() + config.epsilon);
        }
        if !x.is_finite() {
            return Err(Error::Numerical(format!(
                "iterate became non-finite at step {t}"
            )));
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_returns_start() {
        let start = Vector::from_slice(&[1.5, -2.0]);
        let out = run_adam(|x| Vector::zeros(x.len()), &start, &AdamConfig::default()).unwrap();
        assert_eq!(out, start);
    }

    #[test]
    fn quadratic_descends_toward_zero() {
        // f(x) = x^2 from x = 1 with the default 100 steps at 1e-2.
        let out = run_adam(
            |x| Vector::from_slice(&[2.0 * x[0]]),
            &Vector::from_slice(&[1.0]),
            &AdamConfig::default(),
        )
        .unwrap();
        assert!(out[0].abs() < 0.5, "final iterate {}", out[0]);
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let err = run_adam(
            |_| Vector::from_slice(&[1.0]).scaled(f64::INFINITY),
            &Vector::from_slice(&[1.0]),
            &AdamConfig::default(),
        );
        assert!(matches!(err, Err(Error::Numerical(_))));
    }

    #[test]
    fn deterministic_given_inputs() {
        let cfg = AdamConfig::default();
        let grad = |x: &Vector| Vector::from_slice(&[x[0].signum() * (x[0].abs() + 0.1)]);
        let a = run_adam(grad, &Vector::from_slice(&[0.7]), &cfg).unwrap();
        let b = run_adam(grad, &Vector::from_slice(&[0.7]), &cfg).unwrap();
        assert_eq!(a, b);
    }
}
