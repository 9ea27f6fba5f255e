//! Side-by-side demo of the two update rules on the 2-D sphere instance.
//!
//! Both runs start from the same anchor with the same step size. They follow
//! identical trajectories until the descent ray first leaves the feasible
//! set; from there the naive projected update stalls on that ray, while the
//! composition update bends toward the constrained optimum.

use crate::error::Result;
use crate::linalg::Vector;
use crate::optim::{composed_descent, naive_projected_update};
use crate::problems::{gen_demo, sphere_objective};
use crate::projection::project;

/// Default step size / iteration count of the demo; small enough for a clean
/// stall picture, long enough for the composition run to converge.
pub const DEMO_BETA: f64 = 0.02;
pub const DEMO_ITERATIONS: usize = 20_000;

/// Outcome of the demo: final distances to the constrained optimum and the
/// two recorded trajectories.
pub struct DemoContrastReport {
    pub beta: f64,
    pub iterations: usize,
    pub optimum: Vector,
    pub initial_gap: f64,
    pub composed_final_gap: f64,
    pub naive_final_gap: f64,
    /// Iterations during which the two trajectories coincide (up to the
    /// first exit from the feasible set).
    pub shared_prefix: usize,
    pub composed_trajectory: Vec<Vector>,
    pub naive_trajectory: Vec<Vector>,
}

/// Runs both update rules on the demo instance with matched parameters.
pub fn run_demo_contrast(beta: f64, iterations: usize) -> Result<DemoContrastReport> {
    let instance = gen_demo()?;
    let program = &instance.program;
    let objective = sphere_objective();

    let naive = naive_projected_update(program, &objective, beta, iterations, true)?;
    let composed = composed_descent(program, &objective, beta, iterations, true)?;

    let optimum = match &instance.data {
        crate::problems::InstanceData::Demo(d) => d.optimum.clone(),
        _ => unreachable!("demo generator returns demo data"),
    };

    let initial_gap = program.anchor().distance(&optimum);
    let naive_final_gap = naive.final_iterate.distance(&optimum);
    // The composition run's representative final point is the projection of
    // its last raw iterate.
    let composed_final = project(program, &composed.final_iterate)?.point;
    let composed_final_gap = composed_final.distance(&optimum);

    let naive_trajectory = naive.iterates.expect("recorded");
    let composed_trajectory = composed.iterates.expect("recorded");
    let mut shared_prefix = 0;
    for (a, b) in naive_trajectory.iter().zip(composed_trajectory.iter()) {
        if a.distance(b) > 1e-12 {
            break;
        }
        shared_prefix += 1;
    }

    Ok(DemoContrastReport {
        beta,
        iterations,
        optimum,
        initial_gap,
        composed_final_gap,
        naive_final_gap,
        shared_prefix,
        composed_trajectory,
        naive_trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_converges_and_naive_stalls() {
        let report = run_demo_contrast(DEMO_BETA, DEMO_ITERATIONS).unwrap();
        assert!(
            report.composed_final_gap <= 1e-3 * report.initial_gap,
            "composed gap {} vs initial {}",
            report.composed_final_gap,
            report.initial_gap
        );
        assert!(
            report.naive_final_gap >= 10.0 * report.composed_final_gap,
            "naive gap {} vs composed {}",
            report.naive_final_gap,
            report.composed_final_gap
        );
    }

    #[test]
    fn trajectories_agree_until_first_exit() {
        let report = run_demo_contrast(DEMO_BETA, 2_000).unwrap();
        assert!(report.shared_prefix > 0);
        // The prefix ends exactly when an iterate leaves the feasible set:
        // before that index both runs are plain gradient descent.
        let exit = report
            .composed_trajectory
            .iter()
            .position(|x| x[0] + x[1] + 1.0 > 0.0)
            .unwrap();
        assert!(report.shared_prefix >= exit);
    }
}
