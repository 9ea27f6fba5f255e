//! Best-so-far series, normalization, and interpolated quantiles.

use crate::error::{Error, Result};
use crate::optim::{Algorithm, RunTrace};

/// Iteration-indexed running minimum of the trace's objective values.
///
/// For the projection methods every recorded value (objective at the
/// projected point) is feasible and counts. For subgradient descent only
/// feasible iterates count, and entries are `None` until the first feasible
/// iterate has been seen ("best point so far that is feasible").
pub fn best_so_far(trace: &RunTrace, algorithm: Algorithm) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(trace.objectives.len());
    let mut best: Option<f64> = None;
    for (k, &value) in trace.objectives.iter().enumerate() {
        let counts = match algorithm {
            Algorithm::Igd | Algorithm::Pgd => true,
            Algorithm::SubGd => trace.feasible[k],
        };
        if counts {
            best = Some(match best {
                Some(b) => b.min(value),
                None => value,
            });
        }
        out.push(best);
    }
    out
}

/// Normalizes a best-so-far series to `[0, 1]` against the optimum and the
/// anchor value: `(v - f_star) / (f_x0 - f_star)`.
///
/// Instances with `f(x0) <= f_star` (no room to improve) cannot be
/// normalized and are signalled to the sweep loop for regeneration.
pub fn normalize(
    series: &[Option<f64>],
    f_star: f64,
    f_x0: f64,
) -> Result<Vec<Option<f64>>> {
    let gap = f_x0 - f_star;
    if gap <= 1e-9 {
        return Err(Error::DegenerateInstance(format!(
            "anchor value {f_x0} does not exceed the reference optimum {f_star}"
        )));
    }
    Ok(series
        .iter()
        .map(|v| v.map(|v| (v - f_star) / gap))
        .collect())
}

/// Linear-interpolation quantile of an ascending-sorted slice.
pub fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// (median, lower quartile, upper quartile) of an unsorted batch.
pub fn quartiles(values: &mut [f64]) -> (f64, f64, f64) {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (
        interpolated_quantile(values, 0.5),
        interpolated_quantile(values, 0.25),
        interpolated_quantile(values, 0.75),
    )
}
