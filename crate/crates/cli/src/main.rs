//! Command-line interface: instance generation, single solver runs, sweeps,
//! the 2-D demo, and the self-check suites.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime/numerical error,
//! 3 verification failure.

mod config_file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use interproj::error::Error;
use interproj::harness::{
    run_demo_contrast, run_sweep, run_verification, write_report, SweepConfig, VerifyLevel,
    DEMO_BETA, DEMO_ITERATIONS,
};
use interproj::linalg::derive_seed;
use interproj::optim::{
    resolve_step_size, run_igd, run_pgd, run_subgd, Algorithm, IgdConfig, RunTrace, StepSize,
};
use interproj::problems::{
    ball_projector, ensure_reference, parse_instance, write_instance, GeneratedInstance,
    ProblemClass, ProblemSpec,
};

use config_file::FileConfig;

#[derive(Parser)]
#[command(
    name = "interproj",
    about = "Convex optimization with an interpolation-based projection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate archived problem instances.
    Generate(GenerateArgs),
    /// Run one solver on one instance and print a summary.
    Solve(SolveArgs),
    /// Run an algorithm x step-size x instance sweep and write CSV reports.
    Sweep(SweepArgs),
    /// Contrast the naive projected update with the composition update on
    /// the 2-D demo instance.
    Demo(DemoArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Problem family: lin | sdp | soc | norm | exp | demo.
    #[arg(long)]
    class: String,
    /// Dimension (family default when omitted).
    #[arg(long)]
    d: Option<usize>,
    /// Constraint count for the lin/soc families.
    #[arg(long)]
    m: Option<usize>,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Master seed; per-instance seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (or the INTERPROJ_OUT environment variable).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing files.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Path to an archived instance file.
    #[arg(long, conflicts_with_all = ["class", "seed"])]
    instance: Option<PathBuf>,
    /// Problem family (generates the instance on the fly).
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Algorithm: igd | subgd | pgd.
    #[arg(long, default_value = "igd")]
    alg: String,
    /// Step size, or "auto" for the guarantee-optimal choice.
    #[arg(long, default_value = "auto")]
    beta: String,
    /// Iteration count.
    #[arg(long = "iters", visible_alias = "K", default_value_t = 10_000)]
    iters: usize,
    /// Write the full per-iteration trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Estimate a missing reference optimum before solving (per-anchor
    /// iteration budget).
    #[arg(long)]
    oracle_budget: Option<usize>,
    /// Overwrite an existing trace file.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated step sizes.
    #[arg(long)]
    betas: Option<String>,
    /// Comma-separated algorithms.
    #[arg(long)]
    algs: Option<String>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long = "iters", visible_alias = "K")]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Reference-oracle budget per anchor for families without an analytic
    /// optimum.
    #[arg(long)]
    oracle_budget: Option<usize>,
    /// Use the large-scale preset (100 instances, full oracle budget).
    #[arg(long)]
    paper_scale: bool,
    /// Output directory (or the INTERPROJ_OUT environment variable).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = DEMO_BETA)]
    beta: f64,
    #[arg(long = "iters", visible_alias = "K", default_value_t = DEMO_ITERATIONS)]
    iters: usize,
    /// Write both trajectories to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast | full.
    #[arg(long, default_value = "fast")]
    level: String,
    /// Worker threads for the full-level sweep.
    #[arg(long)]
    parallelism: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Configuration(_) | Error::InvalidInput(_) | Error::Parse(_) => {
                Failure::Usage(err.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Demo(args) => cmd_demo(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_class(name: &str) -> Result<ProblemClass, Failure> {
    ProblemClass::parse(name)
        .ok_or_else(|| Failure::Usage(format!("unknown problem class '{name}'")))
}

fn parse_algorithm(name: &str) -> Result<Algorithm, Failure> {
    Algorithm::parse(name).ok_or_else(|| Failure::Usage(format!("unknown algorithm '{name}'")))
}

fn out_dir_or_env(flag: Option<PathBuf>) -> Result<PathBuf, Failure> {
    flag.or_else(|| std::env::var_os("INTERPROJ_OUT").map(PathBuf::from))
        .ok_or_else(|| {
            Failure::Usage("missing --out (or the INTERPROJ_OUT environment variable)".into())
        })
}

fn guard_overwrite(path: &Path, force: bool) -> Result<(), Failure> {
    if path.exists() && !force {
        return Err(Failure::Runtime(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn build_spec(
    class: ProblemClass,
    d: Option<usize>,
    m: Option<usize>,
    seed: u64,
) -> ProblemSpec {
    let mut spec = ProblemSpec::new(class, seed);
    if let Some(d) = d {
        spec = spec.with_dimension(d);
    }
    if let Some(m) = m {
        spec = spec.with_constraints(m);
    }
    spec
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let class = parse_class(&args.class)?;
    let out = out_dir_or_env(args.out)?;
    if args.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let d = args.d.unwrap_or_else(|| class.default_dimension());

    println!("config command = generate");
    println!("config class = {}", class.name());
    println!("config dimension = {d}");
    if let Some(m) = args.m.or(class.default_constraints(d)) {
        println!("config constraints = {m}");
    }
    println!("config count = {}", args.count);
    println!("config master_seed = {}", args.seed);
    println!("config out = {}", out.display());
    println!("config force = {}", args.force);

    std::fs::create_dir_all(&out).map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut manifest = String::from("generate manifest\n");
    manifest.push_str(&format!(
        "class = {}\ndimension = {d}\ncount = {}\nmaster_seed = {}\n",
        class.name(),
        args.count,
        args.seed
    ));
    for index in 0..args.count {
        let seed = derive_seed(args.seed, &[class.seed_tag(), index as u64, 0]);
        let instance = build_spec(class, Some(d), args.m, seed)
            .generate()
            .map_err(|e| Failure::Runtime(format!("instance {index}: {e}")))?;
        let path = out.join(format!("{}_{index:03}.txt", class.name()));
        guard_overwrite(&path, args.force)?;
        std::fs::write(&path, write_instance(&instance))
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        manifest.push_str(&format!("instance {index} seed {seed}\n"));
        println!("wrote {}", path.display());
    }
    let manifest_path = out.join(format!("{}_generate_manifest.txt", class.name()));
    guard_overwrite(&manifest_path, args.force)?;
    std::fs::write(&manifest_path, manifest).map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn load_instance(args: &SolveArgs) -> Result<GeneratedInstance, Failure> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(e.to_string()))?;
        // A malformed archive is bad input data, not bad usage.
        return parse_instance(&text).map_err(|e| Failure::Runtime(e.to_string()));
    }
    let class = parse_class(
        args.class
            .as_deref()
            .ok_or_else(|| Failure::Usage("need --instance or --class".into()))?,
    )?;
    let seed = args.seed.unwrap_or(0);
    Ok(build_spec(class, args.d, args.m, seed).generate()?)
}

fn write_trace_csv(path: &Path, trace: &RunTrace, force: bool) -> Result<(), Failure> {
    guard_overwrite(path, force)?;
    let mut out = String::from("iteration,objective,constraint,eta,alpha,feasible\n");
    for k in 0..trace.iterations() {
        out.push_str(&format!(
            "{k},{},{},{},{},{}\n",
            fmt_float(trace.objectives[k]),
            fmt_float(trace.constraints[k]),
            fmt_float(trace.etas[k]),
            fmt_float(trace.step_sizes[k]),
            trace.feasible[k] as u8,
        ));
    }
    std::fs::write(path, out).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    if args.iters == 0 {
        return Err(Failure::Usage("--iters must be at least 1".into()));
    }
    let algorithm = parse_algorithm(&args.alg)?;
    let auto_beta = args.beta.eq_ignore_ascii_case("auto");
    let beta_value = if auto_beta {
        None
    } else {
        Some(
            args.beta
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("malformed --beta '{}'", args.beta)))?,
        )
    };

    let mut instance = load_instance(&args)?;
    let class = instance.spec.class;
    if algorithm == Algorithm::Pgd && class != ProblemClass::Norm {
        return Err(Failure::Usage(format!(
            "pgd needs a closed-form projection, which '{}' does not provide",
            class.name()
        )));
    }
    if algorithm != Algorithm::Igd && auto_beta {
        return Err(Failure::Usage(
            "--beta auto is only defined for the composition method (igd)".into(),
        ));
    }

    println!("config command = solve");
    println!("config class = {}", class.name());
    println!("config dimension = {}", instance.spec.dimension);
    println!("config seed = {}", instance.spec.seed);
    println!("config algorithm = {}", algorithm.name());
    println!("config beta = {}", args.beta);
    println!("config iters = {}", args.iters);
    if let Some(path) = &args.trace {
        println!("config trace = {}", path.display());
    }

    if let Some(budget) = args.oracle_budget {
        ensure_reference(&mut instance, budget)?;
    }

    let program = &instance.program;
    let record = args.trace.is_some();
    let (trace, bound) = match algorithm {
        Algorithm::Igd => {
            let mut config = match beta_value {
                Some(beta) => IgdConfig::fixed(beta, args.iters),
                None => IgdConfig::auto(args.iters),
            };
            config.record_trace = record;
            let resolved = resolve_step_size(program, &config)?;
            println!("resolved beta = {}", fmt_float(resolved.beta));
            let bound = match (config.step_size, resolved.h_rescaled, program.domain_bound())
            {
                (StepSize::Auto, Some(h0), Some(r)) => {
                    let l = program.objective().lipschitz();
                    Some(r * l * (1.0 + h0 * r) / (args.iters as f64).sqrt())
                }
                _ => None,
            };
            (run_igd(program, &config)?, bound)
        }
        Algorithm::SubGd => (
            run_subgd(program, beta_value.expect("checked"), args.iters, None, record)?,
            None,
        ),
        Algorithm::Pgd => (
            run_pgd(
                program,
                &ball_projector,
                beta_value.expect("checked"),
                args.iters,
                record,
            )?,
            None,
        ),
    };

    println!("averaged_objective = {}", fmt_float(trace.averaged_objective));
    match trace.stop.best_feasible_objective {
        Some(best) => println!("best_objective = {}", fmt_float(best)),
        None => println!("best_objective = nan (no feasible iterate)"),
    }
    println!("lemma_violated = {}", trace.stop.lemma_violated);
    if let Some(reference) = instance.reference {
        let gap = trace.averaged_objective - reference.value();
        println!("reference_optimum = {}", fmt_float(reference.value()));
        println!("averaged_gap = {}", fmt_float(gap));
        if let Some(bound) = bound {
            println!("guarantee_bound = {}", fmt_float(bound));
            println!("within_bound = {}", gap <= bound + 1e-9);
        }
    }
    if let Some(path) = &args.trace {
        write_trace_csv(path, &trace, args.force)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_betas(raw: &str) -> Result<Vec<f64>, Failure> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("malformed step size '{t}'")))
        })
        .collect()
}

fn parse_algorithms(raw: &str) -> Result<Vec<Algorithm>, Failure> {
    raw.split(',').map(|t| parse_algorithm(t.trim())).collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let pick = |flag: Option<String>, key: &str| -> Option<String> {
        flag.or_else(|| file.get(key).map(str::to_string))
    };

    let class_name = pick(args.class.clone(), "class")
        .ok_or_else(|| Failure::Usage("missing --class (or 'class' in the config file)".into()))?;
    let class = parse_class(&class_name)?;

    let mut config = if args.paper_scale {
        SweepConfig::paper_scale(class)
    } else {
        SweepConfig::desk_scale(class)
    };
    let parse_flag_usize = |raw: Option<String>, what: &str| -> Result<Option<usize>, Failure> {
        raw.map(|s| {
            s.parse::<usize>()
                .map_err(|_| Failure::Usage(format!("malformed {what} '{s}'")))
        })
        .transpose()
    };
    if let Some(d) = args.d.or(parse_flag_usize(
        file.get("dimension").map(str::to_string),
        "dimension",
    )?) {
        config.dimension = d;
        config.constraints = class.default_constraints(d);
    }
    if let Some(m) = args.m.or(parse_flag_usize(
        file.get("constraints").map(str::to_string),
        "constraints",
    )?) {
        config.constraints = Some(m);
    }
    if let Some(n) = args.instances.or(parse_flag_usize(
        file.get("instances").map(str::to_string),
        "instances",
    )?) {
        config.instances = n;
    }
    if let Some(k) = args.iters.or(parse_flag_usize(
        file.get("iterations").map(str::to_string),
        "iterations",
    )?) {
        config.iterations = k;
    }
    if let Some(raw) = pick(args.betas.clone(), "betas") {
        config.betas = parse_betas(&raw)?;
    }
    if let Some(raw) = pick(args.algs.clone(), "algorithms") {
        config.algorithms = parse_algorithms(&raw)?;
    }
    if let Some(seed) = args.seed.or_else(|| {
        file.get("seed").and_then(|s| s.parse().ok())
    }) {
        config.master_seed = seed;
    }
    if let Some(p) = args.parallelism.or(parse_flag_usize(
        file.get("parallelism").map(str::to_string),
        "parallelism",
    )?) {
        config.parallelism = p.max(1);
    }
    if let Some(budget) = args.oracle_budget.or(parse_flag_usize(
        file.get("oracle_budget").map(str::to_string),
        "oracle_budget",
    )?) {
        config.oracle_budget = budget;
    }
    let out = out_dir_or_env(
        args.out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from)),
    )?;

    println!("config command = sweep");
    println!("config class = {}", config.class.name());
    println!("config dimension = {}", config.dimension);
    if let Some(m) = config.constraints {
        println!("config constraints = {m}");
    }
    println!("config instances = {}", config.instances);
    println!("config iterations = {}", config.iterations);
    println!(
        "config betas = {}",
        config
            .betas
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    println!(
        "config algorithms = {}",
        config
            .algorithms
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join(",")
    );
    println!("config master_seed = {}", config.master_seed);
    println!("config parallelism = {}", config.parallelism);
    println!("config oracle_budget = {}", config.oracle_budget);
    println!("config out = {}", out.display());
    println!("config force = {}", args.force);

    let report = run_sweep(&config)?;
    let paths = write_report(&report, &out, args.force)?;
    println!("kept_instances = {}", report.instances.len());
    println!("dropped_instances = {}", report.dropped.len());
    println!("wall_time_secs = {:.3}", report.wall_time_secs);
    println!("wrote {}", paths.curves.display());
    println!("wrote {}", paths.terminals.display());
    println!("wrote {}", paths.manifest.display());
    println!("wrote {}/", paths.instance_dir.display());
    Ok(())
}

fn cmd_demo(args: DemoArgs) -> Result<(), Failure> {
    if args.iters == 0 {
        return Err(Failure::Usage("--iters must be at least 1".into()));
    }
    println!("config command = demo");
    println!("config beta = {}", args.beta);
    println!("config iters = {}", args.iters);

    let report = run_demo_contrast(args.beta, args.iters)?;
    println!("optimum = ({}, {})", report.optimum[0], report.optimum[1]);
    println!("initial_gap = {}", fmt_float(report.initial_gap));
    println!("composed_final_gap = {}", fmt_float(report.composed_final_gap));
    println!("naive_final_gap = {}", fmt_float(report.naive_final_gap));
    println!("shared_prefix_iterations = {}", report.shared_prefix);

    if let Some(path) = &args.out {
        guard_overwrite(path, args.force)?;
        let mut csv = String::from("iteration,naive_x1,naive_x2,composed_x1,composed_x2\n");
        for (k, (n, c)) in report
            .naive_trajectory
            .iter()
            .zip(report.composed_trajectory.iter())
            .enumerate()
        {
            csv.push_str(&format!(
                "{k},{},{},{},{}\n",
                fmt_float(n[0]),
                fmt_float(n[1]),
                fmt_float(c[0]),
                fmt_float(c[1]),
            ));
        }
        std::fs::write(path, csv).map_err(|e| Failure::Runtime(e.to_string()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let level = match args.level.to_ascii_lowercase().as_str() {
        "fast" => VerifyLevel::Fast,
        "full" => VerifyLevel::Full,
        other => return Err(Failure::Usage(format!("unknown level '{other}'"))),
    };
    let parallelism = args.parallelism.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    println!("config command = verify");
    println!("config level = {}", args.level);
    println!("config parallelism = {parallelism}");

    let report = run_verification(level, parallelism)?;
    let mut all = true;
    for check in &report.checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<38} {}", check.name, check.detail);
        all &= check.passed;
    }
    if !all {
        return Err(Failure::Verification);
    }
    Ok(())
}
