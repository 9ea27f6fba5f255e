//! File output for sweep reports: quantile-curve CSV, terminal-value CSV,
//! a plain-text manifest, and the per-instance archive.
//!
//! Every float is printed with 17 significant digits so two sweeps with the
//! same configuration produce byte-identical CSV files. The manifest carries
//! wall-time metadata and is exempt from that guarantee.

use std::fmt::Write as _;
use std::fs;
use std::io::{Error as IoError, ErrorKind};
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::sweep::BenchmarkReport;

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Paths written by [`write_report`].
pub struct ReportPaths {
    pub curves: PathBuf,
    pub terminals: PathBuf,
    pub manifest: PathBuf,
    pub instance_dir: PathBuf,
}

fn guard_overwrite(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(IoError::new(
            ErrorKind::AlreadyExists,
            format!("{} exists; pass --force to overwrite", path.display()),
        )
        .into());
    }
    Ok(())
}

/// Renders the quantile-curve CSV
/// (`class,algorithm,beta,iteration,median,q25,q75,defined_count`).
pub fn curves_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("class,algorithm,beta,iteration,median,q25,q75,defined_count\n");
    let class = report.config.class.name();
    for curve in &report.curves {
        let beta = fmt_float(curve.beta);
        let alg = curve.algorithm.name();
        for k in 0..curve.median.len() {
            let _ = writeln!(
                out,
                "{class},{alg},{beta},{k},{},{},{},{}",
                fmt_float(curve.median[k]),
                fmt_float(curve.q25[k]),
                fmt_float(curve.q75[k]),
                curve.defined[k],
            );
        }
    }
    out
}

/// Renders the terminal-value CSV
/// (`class,algorithm,beta,instance,terminal_normalized`); runs that never
/// produced a feasible value print `nan`.
pub fn terminals_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("class,algorithm,beta,instance,terminal_normalized\n");
    let class = report.config.class.name();
    for curve in &report.curves {
        let beta = fmt_float(curve.beta);
        let alg = curve.algorithm.name();
        for (slot, terminal) in curve.terminals.iter().enumerate() {
            let index = report.instances[slot].index;
            let value = terminal.map_or("nan".to_string(), fmt_float);
            let _ = writeln!(out, "{class},{alg},{beta},{index},{value}");
        }
    }
    out
}

/// Renders the plain-text run manifest: resolved configuration, per-instance
/// seeds and reference values, drop log, and wall time.
pub fn manifest_text(report: &BenchmarkReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(out, "sweep manifest");
    let _ = writeln!(out, "class = {}", c.class.name());
    let _ = writeln!(out, "dimension = {}", c.dimension);
    if let Some(m) = c.constraints {
        let _ = writeln!(out, "constraints = {m}");
    }
    let _ = writeln!(out, "instances = {}", c.instances);
    let _ = writeln!(out, "iterations = {}", c.iterations);
    let _ = writeln!(
        out,
        "betas = {}",
        c.betas
            .iter()
            .map(|b| fmt_float(*b))
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        out,
        "algorithms = {}",
        c.algorithms
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(out, "master_seed = {}", c.master_seed);
    let _ = writeln!(out, "parallelism = {}", c.parallelism);
    let _ = writeln!(out, "oracle_budget = {}", c.oracle_budget);
    let _ = writeln!(
        out,
        "quantile_convention = interpolated median with lower/upper quartile band"
    );
    let _ = writeln!(out, "degenerate_resamples = {}", report.degenerate_resamples);
    let _ = writeln!(out, "dropped_count = {}", report.dropped.len());
    for (index, reason) in &report.dropped {
        let _ = writeln!(out, "dropped {index}: {reason}");
    }
    for record in &report.instances {
        let (kind, value, confidence) = match record.reference {
            crate::problems::ReferenceValue::Analytic(v) => ("analytic", v, ""),
            crate::problems::ReferenceValue::Oracle {
                value,
                low_confidence,
            } => (
                "oracle",
                value,
                if low_confidence { " low-confidence" } else { "" },
            ),
        };
        let _ = writeln!(
            out,
            "instance {} seed {} reference {kind} {}{} anchor_objective {}",
            record.index,
            record.seed,
            fmt_float(value),
            confidence,
            fmt_float(record.objective_at_anchor),
        );
    }
    let _ = writeln!(out, "wall_time_secs = {:.3}", report.wall_time_secs);
    out
}

/// Writes the CSVs, the manifest, and one archive file per kept instance
/// under `dir`, creating it if needed. Refuses to overwrite without `force`.
pub fn write_report(report: &BenchmarkReport, dir: &Path, force: bool) -> Result<ReportPaths> {
    fs::create_dir_all(dir)?;
    let class = report.config.class.name();
    let paths = ReportPaths {
        curves: dir.join(format!("{class}_curves.csv")),
        terminals: dir.join(format!("{class}_terminals.csv")),
        manifest: dir.join(format!("{class}_manifest.txt")),
        instance_dir: dir.join("instances"),
    };
    guard_overwrite(&paths.curves, force)?;
    guard_overwrite(&paths.terminals, force)?;
    guard_overwrite(&paths.manifest, force)?;

    fs::write(&paths.curves, curves_csv(report))?;
    fs::write(&paths.terminals, terminals_csv(report))?;
    fs::write(&paths.manifest, manifest_text(report))?;

    fs::create_dir_all(&paths.instance_dir)?;
    for (slot, archive) in report.archives.iter().enumerate() {
        let index = report.instances[slot].index;
        let path = paths
            .instance_dir
            .join(format!("{class}_{index:03}.txt"));
        guard_overwrite(&path, force)?;
        fs::write(path, archive)?;
    }
    Ok(paths)
}
