//! Uniform per-run records shared by every optimizer.

use crate::linalg::Vector;

/// Identifies one of the first-order methods exposed by this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Gradient descent on the objective composed with the interpolation
    /// projection, returning the average of the projected iterates.
    Igd,
    /// Switching subgradient descent: objective gradient inside the feasible
    /// set, constraint subgradient outside.
    SubGd,
    /// Projected gradient descent with a caller-supplied orthogonal projector.
    Pgd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Igd => "igd",
            Algorithm::SubGd => "subgd",
            Algorithm::Pgd => "pgd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "igd" => Some(Algorithm::Igd),
            "subgd" => Some(Algorithm::SubGd),
            "pgd" => Some(Algorithm::Pgd),
            _ => None,
        }
    }
}

/// Termination summary of a run.
#[derive(Clone, Debug)]
pub struct StopReport {
    /// Iterations actually executed.
    pub iterations: usize,
    /// Smallest objective value seen at a feasible point, if any was visited.
    pub best_feasible_objective: Option<f64>,
    /// Whether the descent-direction sign invariant
    /// `c . (g(x_k) - x0) <= 0` was ever observed violated (beyond 1e-9).
    pub lemma_violated: bool,
    /// First iteration at which the violation occurred.
    pub first_violation: Option<usize>,
}

impl StopReport {
    pub(crate) fn new(iterations: usize) -> Self {
        StopReport {
            iterations,
            best_feasible_objective: None,
            lemma_violated: false,
            first_violation: None,
        }
    }
}

/// Per-iteration record of a run, plus the averaged return point.
///
/// All scalar series have exactly `iterations` entries, indexed by `k`. The
/// full iterate/projected-point vectors are retained only when the run was
/// configured to record them.
#[derive(Clone, Debug)]
pub struct RunTrace {
    /// Objective at the projected point, `f(g(x_k))` (for methods without a
    /// projection this is `f(x_k)`).
    pub objectives: Vec<f64>,
    /// Constraint value at the raw iterate, `h(x_k)`.
    pub constraints: Vec<f64>,
    /// Interpolation weight at each step (1 when no projection happened).
    pub etas: Vec<f64>,
    /// Step size `alpha_k` actually applied.
    pub step_sizes: Vec<f64>,
    /// Whether `h(x_k) <= 0`.
    pub feasible: Vec<bool>,
    /// Raw iterates `x_k`, when recorded.
    pub iterates: Option<Vec<Vector>>,
    /// Projected iterates `g(x_k)`, when recorded.
    pub projected: Option<Vec<Vector>>,
    /// Final raw iterate `x_K`.
    pub final_iterate: Vector,
    /// Arithmetic mean of the projected iterates (the method's return value).
    pub averaged_point: Vector,
    /// Objective at the averaged point.
    pub averaged_objective: f64,
    pub stop: StopReport,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.objectives.len()
    }
}

/// Incremental trace builder used by the solver loops.
pub(crate) struct TraceBuilder {
    record_points: bool,
    objectives: Vec<f64>,
    constraints: Vec<f64>,
    etas: Vec<f64>,
    step_sizes: Vec<f64>,
    feasible: Vec<bool>,
    iterates: Vec<Vector>,
    projected: Vec<Vector>,
    sum_projected: Vector,
    best_feasible: Option<f64>,
}

impl TraceBuilder {
    pub fn new(dimension: usize, iterations: usize, record_points: bool) -> Self {
        let cap = if record_points { iterations } else { 0 };
        TraceBuilder {
            record_points,
            objectives: Vec::with_capacity(iterations),
            constraints: Vec::with_capacity(iterations),
            etas: Vec::with_capacity(iterations),
            step_sizes: Vec::with_capacity(iterations),
            feasible: Vec::with_capacity(iterations),
            iterates: Vec::with_capacity(cap),
            projected: Vec::with_capacity(cap),
            sum_projected: Vector::zeros(dimension),
            best_feasible: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        iterate: &Vector,
        projected: &Vector,
        objective_at_projected: f64,
        h_value: f64,
        eta: f64,
        step_size: f64,
        feasible_for_metric: bool,
        counts_toward_best: bool,
    ) {
        self.objectives.push(objective_at_projected);
        self.constraints.push(h_value);
        self.etas.push(eta);
        self.step_sizes.push(step_size);
        self.feasible.push(feasible_for_metric);
        self.sum_projected.add_scaled(1.0, projected);
        if counts_toward_best {
            let candidate = objective_at_projected;
            self.best_feasible = Some(match self.best_feasible {
                Some(b) => b.min(candidate),
                None => candidate,
            });
        }
        if self.record_points {
            self.iterates.push(iterate.clone());
            self.projected.push(projected.clone());
        }
    }

    pub fn finish(
        self,
        final_iterate: Vector,
        objective: impl Fn(&Vector) -> f64,
        mut stop: StopReport,
    ) -> RunTrace {
        let k = self.objectives.len();
        let averaged_point = if k == 0 {
            final_iterate.clone()
        } else {
            self.sum_projected.scaled(1.0 / k as f64)
        };
        let averaged_objective = objective(&averaged_point);
        stop.iterations = k;
        stop.best_feasible_objective = self.best_feasible;
        RunTrace {
            objectives: self.objectives,
            constraints: self.constraints,
            etas: self.etas,
            step_sizes: self.step_sizes,
            feasible: self.feasible,
            iterates: if self.record_points {
                Some(self.iterates)
            } else {
                None
            },
            projected: if self.record_points {
                Some(self.projected)
            } else {
                None
            },
            final_iterate,
            averaged_point,
            averaged_objective,
            stop,
        }
    }
}
