//! Command-line surface: certified member generation, membership checks,
//! statement verification, suite runs, and SVG plots.
//!
//! Exit codes: 0 = pass/member (boundary verdicts warn on stderr), 1 =
//! failure or non-member, 2 = usage or I/O error.

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nply::classes::{
    class_quotients, close_to_convex_check, membership, prestarlike_test, ClassId, Decision,
    MembershipVerdict, ProbeConfig,
};
use nply::generators::{prestarlike_member, tuple_member, GenConfig};
use nply::harness::{self, SuiteConfig, TheoremId, VerifyParams};
use nply::io::{self, Provenance, SeriesFile, TupleFile};
use nply::operators::{alexander, AlexanderDirection, TupleSystem};
use nply::targets::{parse_target_arg, ConvexTarget, TargetArg, TargetSpec};

/// Numerical toolkit for starlike and convex function classes with respect
/// to n-ply symmetric, conjugate, and symmetric-conjugate points.
#[derive(Parser)]
#[command(name = "nply", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a certified member of a class and write it as JSON.
    Gen(GenArgs),
    /// Decide membership of a serialized function or tuple.
    Check(CheckArgs),
    /// Run seeded trials of one verifiable statement.
    Verify(VerifyArgs),
    /// Run the full verification suite from a config file.
    Suite(SuiteArgs),
    /// Render the quotient circle images over the target boundary as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Class to sample: ST_nm, CV_nm, STS_nm, CVS_nm, STC_nm, CVC_nm,
    /// STSC_nm, CVSC_nm, or prestarlike.
    #[arg(long)]
    class: ClassId,
    /// Symmetrization modulus.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Number of tuple components.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Comma-separated convex weights, one per component.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Target spec: halfplane:<alpha> or sampled:<path>.
    #[arg(long, default_value = "halfplane:0")]
    target: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation order of the generated series.
    #[arg(long, default_value_t = 128)]
    order: usize,
    /// Number of Blaschke factors in each Schwarz witness (at most 8).
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Restrict all random parameters to the real axis.
    #[arg(long)]
    real_only: bool,
    /// Output path; relative paths resolve against NPLY_OUT_DIR when set.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    class: ClassId,
    /// Input JSON: a tuple file, or a single-series file for m = 1 classes.
    #[arg(long)]
    input: PathBuf,
    /// Target spec: halfplane:<alpha> or sampled:<path>.
    #[arg(long, default_value = "halfplane:0")]
    target: String,
    /// Optional convolution kernel g (series JSON); tests the (g, h)-class.
    #[arg(long)]
    g: Option<PathBuf>,
    /// Symmetrization modulus; defaults to the input's provenance, then 1.
    #[arg(long)]
    n: Option<usize>,
    /// Prestarlike order for --class prestarlike (alpha <= 1); defaults to
    /// the half-plane target order.
    #[arg(long)]
    prestarlike_order: Option<f64>,
    /// Witness series file for --class close_to_convex.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[command(flatten)]
    probe: ProbeArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Statement id, e.g. T2_3 or IDENTITIES.
    #[arg(long)]
    theorem: TheoremId,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Comma-separated convex weights, one per component.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, default_value = "halfplane:0")]
    target: String,
    #[arg(long, default_value_t = 128)]
    order: usize,
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Write the JSON report here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite config JSON; the built-in default runs every statement.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report directory; overrides the config and NPLY_OUT_DIR.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Print the default config as JSON and exit.
    #[arg(long)]
    emit_default_config: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    class: ClassId,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "halfplane:0")]
    target: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    probe: ProbeArgs,
}

#[derive(Args)]
struct ProbeArgs {
    /// Probe circle radii.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.8, 0.95])]
    radii: Vec<f64>,
    /// Samples per probe circle.
    #[arg(long, default_value_t = 720)]
    samples: usize,
    /// Verdict tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl ProbeArgs {
    fn to_config(&self, order: usize) -> ProbeConfig {
        ProbeConfig {
            order,
            radii: self.radii.clone(),
            samples: self.samples,
            tol_accept: self.tol,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Check(args) => check(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Suite(args) => suite(args),
        Command::Plot(args) => plot_cmd(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn out_dir_env() -> Option<PathBuf> {
    std::env::var_os("NPLY_OUT_DIR").map(PathBuf::from)
}

/// Resolves a relative output path against NPLY_OUT_DIR when it is set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match out_dir_env() {
        Some(dir) => dir.join(path),
        None => path.to_path_buf(),
    }
}

fn resolve_target(spec: &str) -> Result<ConvexTarget, String> {
    let arg = parse_target_arg(spec).map_err(|e| e.to_string())?;
    match arg {
        TargetArg::HalfPlane(alpha) => ConvexTarget::half_plane(alpha).map_err(|e| e.to_string()),
        TargetArg::SampledFromFile(path) => {
            let spec = io::read_target_file(Path::new(&path)).map_err(|e| e.to_string())?;
            spec.resolve().map_err(|e| e.to_string())
        }
    }
}

fn equal_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

fn gen(args: GenArgs) -> Result<u8, String> {
    let target = resolve_target(&args.target)?;
    let weights = args.alpha.unwrap_or_else(|| equal_weights(args.m));
    if weights.len() != args.m {
        return Err(format!("expected {} weights, got {}", args.m, weights.len()));
    }
    let gen_cfg = GenConfig {
        order: args.order,
        blaschke_degree: args.degree,
        seed: args.seed,
        real_only: args.real_only
            || args
                .class
                .part_kind()
                .is_some_and(|k| k.needs_real_symmetric_target()),
    };
    let out = resolve_out(&args.out);
    let provenance = Provenance {
        class_id: args.class,
        n: args.n,
        target: target.spec(),
        gen: gen_cfg.clone(),
        created: None,
    };
    let probe = ProbeConfig { order: args.order, ..ProbeConfig::default() };

    match args.class {
        ClassId::Prestarlike => {
            let alpha = match target {
                ConvexTarget::HalfPlane { alpha } => alpha,
                _ => return Err("prestarlike generation needs a halfplane:<alpha> target".into()),
            };
            let phi = prestarlike_member(alpha, &gen_cfg).map_err(|e| e.to_string())?;
            let verdict = prestarlike_test(&phi, alpha, &probe).map_err(|e| e.to_string())?;
            if verdict.decided != Decision::Member {
                return Err(format!("generated function failed its own certificate: margin {}", verdict.margin));
            }
            io::write_json(&out, &SeriesFile { series: phi, provenance: Some(provenance) })
                .map_err(|e| e.to_string())?;
        }
        ClassId::CloseToConvex => {
            return Err("close_to_convex has no direct generator; use check with a witness".into());
        }
        class => {
            let family = class.part_kind().expect("tuple class");
            let (tuple, _) = tuple_member(&target, args.n, args.m, &weights, family, &gen_cfg)
                .map_err(|e| e.to_string())?;
            let tuple = if class.is_convex_family() {
                tuple
                    .map_members(|f| alexander(f, AlexanderDirection::Inverse))
                    .map_err(|e| e.to_string())?
            } else {
                tuple
            };
            let verdict = membership(&tuple, args.n, class, &target, None, &probe)
                .map_err(|e| e.to_string())?;
            if verdict.decided != Decision::Member {
                return Err(format!("generated tuple failed its own certificate: margin {}", verdict.margin));
            }
            io::write_json(&out, &TupleFile { tuple, provenance: Some(provenance) })
                .map_err(|e| e.to_string())?;
        }
    }
    eprintln!("wrote {}", out.display());
    Ok(0)
}

/// Reads a tuple file, accepting a bare series file as a one-component tuple.
fn load_tuple(path: &Path) -> Result<(TupleSystem, Option<Provenance>), String> {
    match io::read_tuple_file(path) {
        Ok(file) => Ok((file.tuple, file.provenance)),
        Err(tuple_err) => match io::read_series_file(path) {
            Ok(file) => {
                let tuple = TupleSystem::new(vec![file.series], vec![1.0])
                    .map_err(|e| format!("{path:?} is not a valid one-component tuple: {e}", path = path.display()))?;
                Ok((tuple, file.provenance))
            }
            Err(_) => Err(tuple_err.to_string()),
        },
    }
}

fn report_verdict(verdict: &MembershipVerdict) -> Result<u8, String> {
    println!(
        "{}",
        serde_json::to_string_pretty(verdict).map_err(|e| e.to_string())?
    );
    Ok(match verdict.decided {
        Decision::Member => 0,
        Decision::NonMember => 1,
        Decision::Boundary => {
            eprintln!("warning: margin {} is within tolerance of the boundary", verdict.margin);
            0
        }
    })
}

fn check(args: CheckArgs) -> Result<u8, String> {
    let target = resolve_target(&args.target)?;
    match args.class {
        ClassId::Prestarlike => {
            let file = io::read_series_file(&args.input).map_err(|e| e.to_string())?;
            let alpha = match (args.prestarlike_order, &target) {
                (Some(a), _) => a,
                (None, ConvexTarget::HalfPlane { alpha }) => *alpha,
                _ => return Err("prestarlike check needs --prestarlike-order or a halfplane target".into()),
            };
            let probe = args.probe.to_config(file.series.order());
            let verdict =
                prestarlike_test(&file.series, alpha, &probe).map_err(|e| e.to_string())?;
            report_verdict(&verdict)
        }
        ClassId::CloseToConvex => {
            let file = io::read_series_file(&args.input).map_err(|e| e.to_string())?;
            let witness_path = args
                .witness
                .ok_or("close_to_convex check needs --witness <series.json>")?;
            let witness = io::read_series_file(&witness_path).map_err(|e| e.to_string())?;
            let probe = args.probe.to_config(file.series.order());
            let verdict = close_to_convex_check(&file.series, &witness.series, &target, &probe)
                .map_err(|e| e.to_string())?;
            report_verdict(&verdict)
        }
        class => {
            let (tuple, provenance) = load_tuple(&args.input)?;
            let n = args.n.or(provenance.map(|p| p.n)).unwrap_or(1);
            let kernel = match &args.g {
                Some(path) => Some(io::read_series_file(path).map_err(|e| e.to_string())?.series),
                None => None,
            };
            let probe = args.probe.to_config(tuple.order());
            let verdict = membership(&tuple, n, class, &target, kernel.as_ref(), &probe)
                .map_err(|e| e.to_string())?;
            report_verdict(&verdict)
        }
    }
}

fn verify_cmd(args: VerifyArgs) -> Result<u8, String> {
    let weights = args.alpha.unwrap_or_else(|| equal_weights(args.m));
    if weights.len() != args.m {
        return Err(format!("expected {} weights, got {}", args.m, weights.len()));
    }
    let target_arg = parse_target_arg(&args.target).map_err(|e| e.to_string())?;
    let target_spec = match target_arg {
        TargetArg::HalfPlane(alpha) => TargetSpec::HalfPlane { alpha },
        TargetArg::SampledFromFile(path) => {
            io::read_target_file(Path::new(&path)).map_err(|e| e.to_string())?
        }
    };
    let params = VerifyParams {
        grid: vec![harness::GridPoint { n: args.n, m: args.m, weights, target: target_spec }],
        master_seed: args.seed,
        gen: GenConfig {
            order: args.order,
            blaschke_degree: args.degree,
            seed: 0,
            real_only: false,
        },
        probe: ProbeConfig { order: args.order, ..ProbeConfig::default() },
        inject_corrupt_trial: None,
    };
    let report = harness::verify(args.theorem, args.trials, &params).map_err(|e| e.to_string())?;
    let body = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    println!("{body}");
    if let Some(out) = &args.out {
        let out = resolve_out(out);
        std::fs::write(&out, body + "\n").map_err(|e| format!("writing {}: {e}", out.display()))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn suite(args: SuiteArgs) -> Result<u8, String> {
    if args.emit_default_config {
        let config = SuiteConfig::default();
        println!(
            "{}",
            serde_json::to_string_pretty(&config).map_err(|e| e.to_string())?
        );
        return Ok(0);
    }
    let mut config = match &args.config {
        Some(path) => io::read_suite_config(path).map_err(|e| e.to_string())?,
        None => SuiteConfig::default(),
    };
    if let Some(dir) = &args.out_dir {
        config.out_dir = Some(dir.display().to_string());
    } else if config.out_dir.is_none() {
        config.out_dir = Some(
            out_dir_env()
                .unwrap_or_else(|| PathBuf::from("reports"))
                .display()
                .to_string(),
        );
    }
    let reports = harness::run_suite(&config).map_err(|e| e.to_string())?;
    let mut failures = 0usize;
    for report in &reports {
        let status = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "{:<10} {status}  min margin {:>12.4e}  median {:>12.4e}  trials {}  gen-failures {}  {} ms",
            report.theorem_id.to_string(),
            report.min_margin,
            report.median_margin,
            report.trials,
            report.gen_failures.len(),
            report.runtime_ms,
        );
        failures += report.failures.len();
    }
    if let Some(dir) = &config.out_dir {
        eprintln!("reports written to {dir}");
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn plot_cmd(args: PlotArgs) -> Result<u8, String> {
    let target = resolve_target(&args.target)?;
    let (tuple, provenance) = load_tuple(&args.input)?;
    let n = args.n.or(provenance.map(|p| p.n)).unwrap_or(1);
    let probe = args.probe.to_config(tuple.order());
    let quotients = match args.class {
        ClassId::Prestarlike | ClassId::CloseToConvex => {
            return Err("plot supports the eight tuple classes".into());
        }
        class => class_quotients(&tuple, n, class, None).map_err(|e| e.to_string())?,
    };
    let svg = plot::render(&quotients, &probe.radii, probe.samples, &target);
    let out = resolve_out(&args.out);
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
        }
    }
    std::fs::write(&out, svg).map_err(|e| format!("writing {}: {e}", out.display()))?;
    eprintln!("wrote {}", out.display());
    Ok(0)
}
