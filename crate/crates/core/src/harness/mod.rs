//! Benchmark harness: sweeps, metrics, reports, the demo runner, and the
//! self-check suites.

mod contrast;
mod metrics;
mod parallel;
mod report;
mod sweep;
mod verify;

pub use contrast::{run_demo_contrast, DemoContrastReport, DEMO_BETA, DEMO_ITERATIONS};
pub use metrics::{best_so_far, interpolated_quantile, normalize, quartiles};
pub use report::{curves_csv, manifest_text, terminals_csv, write_report, ReportPaths};
pub use sweep::{run_sweep, BenchmarkReport, CurveSeries, InstanceRecord, SweepConfig};
pub use verify::{
    composite_gradient_probe, ordering_sweep, run_verification, sign_check_beta,
    tracks_within_2x, CheckResult, VerificationReport, VerifyLevel,
};
