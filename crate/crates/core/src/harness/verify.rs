//! Self-check suites: projection feasibility, gradient correctness against
//! finite differences, the descent-direction sign invariant, the convergence
//! bound, reference-oracle consistency, the demo contrast, and (at the full
//! level) the cross-family ordering sweep.

use crate::error::{Error, Result};
use crate::linalg::{derive_seed, sample_unit_sphere, Rng, Vector};
use crate::optim::{resolve_step_size, run_igd, Algorithm, IgdConfig, StepSize};
use crate::problems::{
    lambert_w1, reference_oracle, GeneratedInstance, InstanceData, ProblemClass,
    ProblemSpec,
};
use crate::program::ConvexProgram;
use crate::projection::{composite_gradient, project};

use super::contrast::{run_demo_contrast, DEMO_BETA, DEMO_ITERATIONS};
use super::sweep::{run_sweep, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Reduced sample counts; finishes well under a minute.
    Fast,
    /// Acceptance-grade counts including the full ordering sweep.
    Full,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

fn instances_for(class: ProblemClass, count: usize, master: u64) -> Result<Vec<GeneratedInstance>> {
    (0..count)
        .map(|i| {
            ProblemSpec::new(class, derive_seed(master, &[class.seed_tag(), i as u64]))
                .generate()
        })
        .collect()
}

/// A probe point drawn around the anchor at a log-uniform radius; covers both
/// feasible and (mostly) infeasible territory.
fn probe_point(program: &ConvexProgram, rng: &mut Rng) -> Result<Vector> {
    let d = program.dimension();
    let dir = sample_unit_sphere(d, rng)?;
    let exponent = rng.next_range(-2.0, 1.0);
    let radius = 10f64.powf(exponent) * (1.0 + program.anchor().norm());
    let mut x = program.anchor().clone();
    x.add_scaled(radius, &dir);
    Ok(x)
}

/// Whether the constraint is smooth enough at `x` for a finite-difference
/// gradient comparison: clear of boundaries, with a unique maximizing
/// component (or a simple extreme eigenvalue for the semidefinite family).
fn smooth_probe(instance: &GeneratedInstance, x: &Vector) -> bool {
    let h = instance.program.constraint().value(x);
    if !(h.is_finite() && h >= 0.1) {
        return false;
    }
    let components = instance.program.constraint().components();
    if components.len() > 1 {
        let mut values: Vec<f64> = components.iter().map(|c| c.value(x)).collect();
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if values[0] - values[1] < 1e-5 * (1.0 + values[0].abs()) {
            return false;
        }
    }
    if let InstanceData::Sdp(data) = &instance.data {
        match crate::linalg::sym_eig(&data.pencil_matrix(x)) {
            Ok(eig) => {
                if eig.eigenvalues[1] - eig.eigenvalues[0] < 1e-4 {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// Largest relative error between `gradient` and central finite differences
/// of `x -> f(project(x))` over `points` admissible probes.
///
/// Exposed with the gradient as a parameter so the check itself can be
/// validated: feeding it a deliberately wrong gradient must trip it.
pub fn composite_gradient_probe(
    instance: &GeneratedInstance,
    gradient: &dyn Fn(&ConvexProgram, &Vector) -> Result<Vector>,
    points: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let program = &instance.program;
    let step = 1e-6;
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < points && attempts < points * 200 {
        attempts += 1;
        let x = probe_point(program, rng)?;
        if !smooth_probe(instance, &x) {
            continue;
        }
        accepted += 1;
        let grad = gradient(program, &x)?;
        let mut fd = Vector::zeros(program.dimension());
        for i in 0..program.dimension() {
            let mut xp = x.clone();
            xp[i] += step;
            let mut xm = x.clone();
            xm[i] -= step;
            let fp = program.objective().value(&project(program, &xp)?.point);
            let fm = program.objective().value(&project(program, &xm)?.point);
            fd[i] = (fp - fm) / (2.0 * step);
        }
        let diff = (&fd - &grad).norm();
        worst = worst.max(diff / fd.norm().max(1.0));
    }
    if accepted < points {
        return Err(Error::Numerical(format!(
            "only {accepted} of {points} admissible probe points found"
        )));
    }
    Ok(worst)
}

/// The step size mandated for the sign-invariant check:
/// `min(1e-3, 0.9 / (L * H_rescaled))`.
pub fn sign_check_beta(program: &ConvexProgram) -> Result<f64> {
    let h = program.constraint().lipschitz().ok_or_else(|| {
        Error::Configuration("sign check needs a constraint Lipschitz bound".into())
    })?;
    let h0 = h / program.h_at_anchor().abs();
    let l = program.objective().lipschitz();
    Ok((1e-3f64).min(0.9 / (l * h0)))
}

struct Scale {
    instances: usize,
    feasibility_points: usize,
    gradient_points: usize,
    sign_iterations: usize,
    oracle_budget: usize,
}

impl Scale {
    fn of(level: VerifyLevel) -> Self {
        match level {
            VerifyLevel::Fast => Scale {
                instances: 4,
                feasibility_points: 2_000,
                gradient_points: 40,
                sign_iterations: 2_000,
                oracle_budget: 100_000,
            },
            VerifyLevel::Full => Scale {
                instances: 20,
                feasibility_points: 100_000,
                gradient_points: 1_000,
                sign_iterations: 10_000,
                oracle_budget: 1_000_000,
            },
        }
    }
}

/// Runs the suites for the requested level, collecting one pass/fail row per
/// named invariant. `parallelism` is forwarded to the full-level sweep.
pub fn run_verification(level: VerifyLevel, parallelism: usize) -> Result<VerificationReport> {
    let scale = Scale::of(level);
    let mut report = VerificationReport::default();
    let master = 0x5eed;

    // Projection feasibility across every family.
    for class in ProblemClass::BENCHMARK {
        let instances = instances_for(class, scale.instances, master)?;
        let points_per_instance = scale.feasibility_points / instances.len();
        let mut worst = f64::NEG_INFINITY;
        let mut rng = Rng::seed_from_u64(derive_seed(master, &[7, class.seed_tag()]));
        for instance in &instances {
            for _ in 0..points_per_instance {
                let x = probe_point(&instance.program, &mut rng)?;
                let projected = project(&instance.program, &x)?;
                worst = worst.max(instance.program.constraint().value(&projected.point));
            }
        }
        report.push(
            &format!("projection-feasibility/{}", class.name()),
            worst <= 1e-12,
            format!("max h(projected) = {worst:.3e}"),
        );
    }

    // Composite gradient against central finite differences.
    for class in ProblemClass::BENCHMARK {
        let instances = instances_for(class, scale.instances.min(4), master)?;
        let mut rng = Rng::seed_from_u64(derive_seed(master, &[11, class.seed_tag()]));
        let mut worst: f64 = 0.0;
        for instance in &instances {
            let err = composite_gradient_probe(
                instance,
                &|p, x| composite_gradient(p, x),
                scale.gradient_points / instances.len().max(1),
                &mut rng,
            )?;
            worst = worst.max(err);
        }
        report.push(
            &format!("composite-gradient/{}", class.name()),
            worst <= 1e-4,
            format!("max relative error = {worst:.3e}"),
        );
    }

    // Sign invariant under the capped step size.
    for class in ProblemClass::BENCHMARK {
        let instances = instances_for(class, scale.instances, master)?;
        let mut all_ok = true;
        let mut detail = String::from("no violations");
        for instance in &instances {
            let beta = sign_check_beta(&instance.program)?;
            let trace = run_igd(
                &instance.program,
                &IgdConfig::fixed(beta, scale.sign_iterations),
            )?;
            if trace.stop.lemma_violated {
                all_ok = false;
                detail = format!(
                    "violation at iteration {:?} (seed {})",
                    trace.stop.first_violation, instance.spec.seed
                );
                break;
            }
        }
        report.push(&format!("sign-invariant/{}", class.name()), all_ok, detail);
    }

    // Convergence bound on the bounded-norm family with the automatic step.
    {
        let instances = instances_for(ProblemClass::Norm, scale.instances, master)?;
        let k = 10_000;
        let mut all_ok = true;
        let mut worst_margin = f64::NEG_INFINITY;
        for instance in &instances {
            let config = IgdConfig {
                iterations: k,
                step_size: StepSize::Auto,
                lipschitz_objective: None,
                lipschitz_constraint: None,
                domain_bound: None,
                record_trace: false,
            };
            let resolved = resolve_step_size(&instance.program, &config)?;
            let h0 = resolved.h_rescaled.expect("norm family has H");
            let r = instance.program.domain_bound().expect("norm family has R");
            let bound = r * (1.0 + h0 * r) / (k as f64).sqrt();
            let trace = run_igd(&instance.program, &config)?;
            let gap = trace.averaged_objective - (-1.0);
            worst_margin = worst_margin.max(gap - bound);
            if gap > bound + 1e-9 {
                all_ok = false;
            }
        }
        report.push(
            "convergence-bound/norm",
            all_ok,
            format!("worst gap-minus-bound = {worst_margin:.3e}"),
        );
    }

    // Reference oracle against the analytic families.
    {
        let lin = instances_for(ProblemClass::Lin, 2, master)?;
        let norm = instances_for(ProblemClass::Norm, 2, master)?;
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for instance in lin.iter() {
            let v = reference_oracle(instance, scale.oracle_budget)?.value();
            let tol = 1e-5 * (1.0 + instance.objective_at_anchor().abs());
            worst = worst.max(v.abs() / tol);
            ok &= v.abs() <= tol;
        }
        for instance in norm.iter() {
            let v = reference_oracle(instance, scale.oracle_budget)?.value();
            worst = worst.max((v - (-1.0)).abs() / 1e-5);
            ok &= (v - (-1.0)).abs() <= 1e-5;
        }
        report.push(
            "oracle-consistency/lin+norm",
            ok,
            format!("worst error / tolerance = {worst:.3}"),
        );
        let w = lambert_w1();
        let stationarity_ok = (w * crate::linalg::det_exp(w) - 1.0).abs() <= 1e-14;
        report.push(
            "oracle-consistency/lambert-w",
            stationarity_ok,
            format!("W(1) = {w:.16}"),
        );
    }

    // Demo contrast between the two update rules.
    {
        let demo = run_demo_contrast(DEMO_BETA, DEMO_ITERATIONS)?;
        let converged = demo.composed_final_gap <= 1e-3 * demo.initial_gap;
        let contrast = demo.naive_final_gap >= 10.0 * demo.composed_final_gap;
        report.push(
            "demo-contrast",
            converged && contrast,
            format!(
                "composed gap {:.3e}, naive gap {:.3e}, initial {:.3e}",
                demo.composed_final_gap, demo.naive_final_gap, demo.initial_gap
            ),
        );
    }

    // Full level: the 20-cell ordering comparison.
    if level == VerifyLevel::Full {
        let (wins, cells, norm_tracking) = ordering_sweep(parallelism)?;
        report.push(
            "benchmark-ordering",
            wins * 100 >= cells * 75 && norm_tracking,
            format!("composition ahead in {wins}/{cells} cells; norm tracking {norm_tracking}"),
        );
    }

    Ok(report)
}

/// Whether one median curve tracks another within a factor of two down to
/// the `floor` level. At every iteration where the reference is above the
/// floor, the tracked curve must be within 2x in value at that iteration, or
/// must reach the reference's level within twice as many iterations (with a
/// small absolute slack); the time branch absorbs the discretization cliff
/// when the reference crosses its whole remaining range in one step.
pub fn tracks_within_2x(tracked: &[f64], reference: &[f64], floor: f64) -> bool {
    let k_total = tracked.len();
    let mut reach = 0usize;
    for k in 0..k_total {
        let level = reference[k];
        if level < floor {
            break;
        }
        let ok_value = tracked[k] <= 2.0 * level;
        while reach < k_total && tracked[reach] > level {
            reach += 1;
        }
        let ok_time = reach <= (2 * k).max(k + 25);
        if !(ok_value || ok_time) {
            return false;
        }
    }
    true
}

/// Runs the five-family sweep grid and counts the cells where the
/// composition method's terminal median beats the subgradient baseline's;
/// also checks that its median curve tracks projected gradient descent on
/// the norm family down to normalized error 1e-2.
pub fn ordering_sweep(parallelism: usize) -> Result<(usize, usize, bool)> {
    let mut wins = 0;
    let mut cells = 0;
    let mut norm_tracking = true;
    for class in ProblemClass::BENCHMARK {
        let mut config = SweepConfig::desk_scale(class);
        config.parallelism = parallelism;
        let report = run_sweep(&config)?;
        for &beta in &config.betas {
            cells += 1;
            let igd = report.terminal_median(Algorithm::Igd, beta).unwrap();
            let sub = report.terminal_median(Algorithm::SubGd, beta).unwrap();
            if igd <= sub {
                wins += 1;
            }
            if class == ProblemClass::Norm {
                let igd_curve = report.curve(Algorithm::Igd, beta).unwrap();
                let pgd_curve = report.curve(Algorithm::Pgd, beta).unwrap();
                norm_tracking &= tracks_within_2x(&igd_curve.median, &pgd_curve.median, 1e-2);
            }
        }
    }
    Ok((wins, cells, norm_tracking))
}
