//! Algorithm x step-size x instance sweeps with normalized quantile curves.
//!
//! Instances are generated once per (class, master seed, index) and reused
//! across every step size and algorithm, so results across cells are directly
//! comparable. All randomness derives from the master seed and the report
//! assembly is index-ordered, making sweeps byte-reproducible regardless of
//! the parallelism degree.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::derive_seed;
use crate::optim::{run_igd, run_pgd, run_subgd, Algorithm, IgdConfig, RunTrace};
use crate::problems::{
    ball_projector, ensure_reference, write_instance, GeneratedInstance, ProblemClass,
    ProblemSpec, ReferenceValue,
};
use crate::program::ConvexProgram;

use super::metrics::{best_so_far, normalize, quartiles};
use super::parallel::parallel_map;

/// Maximum resampling attempts for instances that cannot be normalized.
const DEGENERATE_RESAMPLE_LIMIT: u64 = 8;

/// Fraction of dropped instances above which the whole sweep fails.
const DROP_FRACTION_LIMIT: f64 = 0.10;

/// Configuration of one sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub class: ProblemClass,
    pub dimension: usize,
    pub constraints: Option<usize>,
    pub instances: usize,
    pub iterations: usize,
    pub betas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub parallelism: usize,
    /// Per-anchor iteration budget of the reference oracle (only consulted
    /// for families without an analytic optimum).
    pub oracle_budget: usize,
}

impl SweepConfig {
    /// Desk-scale defaults: 20 instances, 10^4 iterations, the standard
    /// step-size grid, and the composition/subgradient pair (plus projected
    /// gradient descent on the bounded-norm family, the one place it has a
    /// closed-form projection).
    pub fn desk_scale(class: ProblemClass) -> Self {
        let mut algorithms = vec![Algorithm::Igd, Algorithm::SubGd];
        if class == ProblemClass::Norm {
            algorithms.push(Algorithm::Pgd);
        }
        let dimension = class.default_dimension();
        SweepConfig {
            class,
            dimension,
            constraints: class.default_constraints(dimension),
            instances: 20,
            iterations: 10_000,
            betas: vec![1e-4, 1e-3, 1e-2, 1e-1],
            algorithms,
            master_seed: 1,
            parallelism: 1,
            oracle_budget: 100_000,
        }
    }

    /// Paper-scale preset: 100 instances and the full oracle budget.
    pub fn paper_scale(class: ProblemClass) -> Self {
        SweepConfig {
            instances: 100,
            oracle_budget: 1_000_000,
            ..Self::desk_scale(class)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class == ProblemClass::Demo {
            return Err(Error::Configuration(
                "the demo instance is not a sweep class; use the demo runner".into(),
            ));
        }
        if self.instances == 0 || self.iterations == 0 {
            return Err(Error::Configuration(
                "sweeps need at least one instance and one iteration".into(),
            ));
        }
        if self.betas.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Configuration(
                "sweeps need at least one step size and one algorithm".into(),
            ));
        }
        if self.betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::Configuration("step sizes must be positive".into()));
        }
        if self.algorithms.contains(&Algorithm::Pgd) && self.class != ProblemClass::Norm {
            return Err(Error::Configuration(
                "projected gradient descent needs a closed-form projection, \
                 which only the norm family provides"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// One kept instance of a sweep.
#[derive(Clone, Debug)]
pub struct InstanceRecord {
    pub index: usize,
    /// The derived per-instance seed actually used (includes resamples).
    pub seed: u64,
    pub reference: ReferenceValue,
    pub objective_at_anchor: f64,
}

/// Quantile curves and terminal values of one (algorithm, step size) cell.
#[derive(Clone, Debug)]
pub struct CurveSeries {
    pub algorithm: Algorithm,
    pub beta: f64,
    pub median: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    /// Number of instances with a defined value at each iteration (the
    /// subgradient baseline is undefined until its first feasible iterate).
    pub defined: Vec<usize>,
    /// Terminal normalized value per kept instance; `None` when the run never
    /// produced a feasible value.
    pub terminals: Vec<Option<f64>>,
}

/// Complete result of a sweep.
pub struct BenchmarkReport {
    pub config: SweepConfig,
    pub instances: Vec<InstanceRecord>,
    /// Serialized archive text per kept instance (index-aligned).
    pub archives: Vec<String>,
    pub curves: Vec<CurveSeries>,
    pub dropped: Vec<(usize, String)>,
    pub degenerate_resamples: usize,
    pub wall_time_secs: f64,
}

fn run_cell(program: &ConvexProgram, algorithm: Algorithm, beta: f64, k: usize) -> Result<RunTrace> {
    match algorithm {
        Algorithm::Igd => run_igd(program, &IgdConfig::fixed(beta, k)),
        Algorithm::SubGd => run_subgd(program, beta, k, None, false),
        Algorithm::Pgd => run_pgd(program, &ball_projector, beta, k, false),
    }
}

enum Prepared {
    Kept {
        instance: Box<GeneratedInstance>,
        seed: u64,
        resamples: usize,
    },
    Dropped(String),
}

fn prepare_instance(config: &SweepConfig, index: usize) -> Result<Prepared> {
    let mut resamples = 0usize;
    for attempt in 0..DEGENERATE_RESAMPLE_LIMIT {
        let seed = derive_seed(
            config.master_seed,
            &[config.class.seed_tag(), index as u64, attempt],
        );
        let mut spec = ProblemSpec::new(config.class, seed).with_dimension(config.dimension);
        if let Some(m) = config.constraints {
            spec = spec.with_constraints(m);
        }
        let mut instance = spec.generate()?;
        let f_star = match ensure_reference(&mut instance, config.oracle_budget) {
            Ok(v) => v,
            Err(Error::OracleUnreliable(msg)) => return Ok(Prepared::Dropped(msg)),
            Err(e) => return Err(e),
        };
        if instance.objective_at_anchor() - f_star <= 1e-9 {
            resamples += 1;
            continue;
        }
        return Ok(Prepared::Kept {
            instance: Box::new(instance),
            seed,
            resamples,
        });
    }
    Ok(Prepared::Dropped(format!(
        "degenerate after {DEGENERATE_RESAMPLE_LIMIT} resamples"
    )))
}

/// Runs the full sweep.
///
/// Instances whose reference oracle is unreliable are dropped (and listed in
/// the report); the sweep fails if more than 10% of the requested instances
/// are dropped. Instances whose anchor already attains the optimum are
/// resampled with an incremented sub-seed.
pub fn run_sweep(config: &SweepConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let started = Instant::now();

    let prepared = parallel_map(config.instances, config.parallelism, |index| {
        prepare_instance(config, index)
    });

    let mut instances = Vec::new();
    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut degenerate_resamples = 0;
    for (index, result) in prepared.into_iter().enumerate() {
        match result? {
            Prepared::Kept {
                instance,
                seed,
                resamples,
            } => {
                degenerate_resamples += resamples;
                records.push(InstanceRecord {
                    index,
                    seed,
                    reference: instance.reference.expect("reference ensured"),
                    objective_at_anchor: instance.objective_at_anchor(),
                });
                instances.push(*instance);
            }
            Prepared::Dropped(reason) => dropped.push((index, reason)),
        }
    }
    if (dropped.len() as f64) > DROP_FRACTION_LIMIT * config.instances as f64 {
        return Err(Error::GenerationFailure(format!(
            "sweep failed: {} of {} instances dropped (limit 10%)",
            dropped.len(),
            config.instances
        )));
    }
    if instances.is_empty() {
        return Err(Error::GenerationFailure(
            "sweep failed: no usable instances".into(),
        ));
    }

    let archives: Vec<String> = instances.iter().map(write_instance).collect();

    let k = config.iterations;
    let mut curves = Vec::new();
    for &algorithm in &config.algorithms {
        for &beta in &config.betas {
            let normalized: Vec<Vec<Option<f64>>> =
                parallel_map(instances.len(), config.parallelism, |i| {
                    let instance = &instances[i];
                    let trace = run_cell(&instance.program, algorithm, beta, k)
                        .expect("validated configuration");
                    let series = best_so_far(&trace, algorithm);
                    normalize(
                        &series,
                        instance.reference.expect("ensured").value(),
                        instance.objective_at_anchor(),
                    )
                    .expect("degenerate instances were filtered")
                });

            let mut median = Vec::with_capacity(k);
            let mut q25 = Vec::with_capacity(k);
            let mut q75 = Vec::with_capacity(k);
            let mut defined = Vec::with_capacity(k);
            let mut batch = Vec::with_capacity(instances.len());
            for iter in 0..k {
                batch.clear();
                batch.extend(normalized.iter().filter_map(|series| series[iter]));
                defined.push(batch.len());
                if batch.is_empty() {
                    // Plotting convention for the pre-feasible region: the
                    // curve holds at the normalized start value 1.
                    median.push(1.0);
                    q25.push(1.0);
                    q75.push(1.0);
                } else {
                    let (m, lo, hi) = quartiles(&mut batch);
                    median.push(m);
                    q25.push(lo);
                    q75.push(hi);
                }
            }
            let terminals = normalized
                .iter()
                .map(|series| series[k - 1])
                .collect();
            curves.push(CurveSeries {
                algorithm,
                beta,
                median,
                q25,
                q75,
                defined,
                terminals,
            });
        }
    }

    Ok(BenchmarkReport {
        config: config.clone(),
        instances: records,
        archives,
        curves,
        dropped,
        degenerate_resamples,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

impl BenchmarkReport {
    /// Curve of one (algorithm, beta) cell, if present.
    pub fn curve(&self, algorithm: Algorithm, beta: f64) -> Option<&CurveSeries> {
        self.curves
            .iter()
            .find(|c| c.algorithm == algorithm && c.beta == beta)
    }

    /// Median of the terminal normalized errors of one cell.
    pub fn terminal_median(&self, algorithm: Algorithm, beta: f64) -> Option<f64> {
        self.curve(algorithm, beta)
            .map(|c| *c.median.last().expect("non-empty curve"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(class: ProblemClass) -> SweepConfig {
        SweepConfig {
            instances: 3,
            iterations: 200,
            betas: vec![1e-2],
            oracle_budget: 20_000,
            ..SweepConfig::desk_scale(class)
        }
    }

    #[test]
    fn rejects_pgd_off_the_norm_family() {
        let mut config = tiny_config(ProblemClass::Lin);
        config.algorithms.push(Algorithm::Pgd);
        assert!(matches!(
            run_sweep(&config),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn normalized_curves_start_at_one_and_decrease() {
        let report = run_sweep(&tiny_config(ProblemClass::Norm)).unwrap();
        for curve in &report.curves {
            assert!((curve.median[0] - 1.0).abs() <= 1e-12);
            for w in curve.median.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn sweep_is_deterministic_and_parallelism_invariant() {
        let mut config = tiny_config(ProblemClass::Lin);
        let a = run_sweep(&config).unwrap();
        config.parallelism = 4;
        let b = run_sweep(&config).unwrap();
        assert_eq!(a.archives, b.archives);
        let (ca, cb) = (&a.curves[0], &b.curves[0]);
        assert_eq!(ca.median, cb.median);
        assert_eq!(ca.terminals, cb.terminals);
    }

    #[test]
    fn instances_are_shared_across_cells() {
        let mut config = tiny_config(ProblemClass::Norm);
        config.betas = vec![1e-3, 1e-2];
        let report = run_sweep(&config).unwrap();
        // Same archives regardless of how many cells consumed them, and the
        // per-cell curves start from the same normalized value.
        assert_eq!(report.archives.len(), 3);
        for curve in &report.curves {
            assert_eq!(curve.terminals.len(), 3);
        }
    }
}
