//! `cuelab`: sample CUE eigenangles, evaluate exact counting laws and run
//! rate experiments from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cuelab::bounds::{bonferroni_certificate, find_certificate, max_arc_count};
use cuelab::counting::{bernoulli_spectrum, poisson_binomial, variance_bounds_from};
use cuelab::harness::{
    emit_table, format_sig12, rate_diagnostics, run_experiment, write_svg, OutputFormat,
};
use cuelab::metrics::distance_report;
use cuelab::rng::StreamKey;
use cuelab::sampler::sample_replicate;
use cuelab::{Error, ExperimentConfig, KernelConfig, Metric};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "cuelab", version, about = "CUE eigenangle laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one sample of the N eigenangles and print them.
    Sample(SampleArgs),
    /// Exact law of the count in [0, θ): Bernoulli spectrum, pmf, moments, bound checks.
    Exact(ExactArgs),
    /// Monte Carlo rate experiment over an N-grid.
    Rates(ExperimentArgs),
    /// Max-gap study: mean largest spacing and its normalized statistic.
    Gaps(ExperimentArgs),
    /// Bonferroni lower-bound certificate for P[d_K > x].
    Certify(CertifyArgs),
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Matrix size N.
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replicate index within the seeded stream family.
    #[arg(long, default_value_t = 0)]
    replicate: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(short, long)]
    n: usize,
    /// Arc length θ in radians, 0 ≤ θ ≤ 2π.
    #[arg(long)]
    theta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Flat `key = value` file; flags given on the command line override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Comma-separated matrix sizes.
    #[arg(long, value_name = "N,N,...")]
    n_grid: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated subset of d_k, w1, max_gap, grid_sup.
    #[arg(long)]
    metrics: Option<String>,
    /// Comma-separated moment orders p.
    #[arg(long)]
    moments: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Chart of N·mean(d_K)/log N against log₂ N.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(short, long)]
    n: usize,
    /// Deviation x; searched by bisection when omitted.
    #[arg(short, long, requires = "t")]
    x: Option<f64>,
    /// Number of disjoint arcs T.
    #[arg(short, long, requires = "x")]
    t: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invalid(_) => 1,
        Error::Io { .. } => 2,
        Error::NoConvergence { .. }
        | Error::SpectrumOutOfRange { .. }
        | Error::Numerical(_)
        | Error::Json(_) => 3,
    }
}

fn deliver(text: &str, out: Option<&Path>) -> cuelab::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            }
            std::fs::write(path, text).map_err(|e| io_error(path, e))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn json_text(value: &serde_json::Value) -> cuelab::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn sample(args: SampleArgs) -> cuelab::Result<()> {
    let key = StreamKey::new(args.seed, args.n, args.replicate as usize);
    let (s, stats) = sample_replicate(key)?;
    let text = match args.output.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => csv(
            &["index", "angle"],
            s.angles()
                .iter()
                .enumerate()
                .map(|(i, a)| vec![i.to_string(), format_sig12(*a)]),
        ),
        OutputFormat::Json => json_text(&json!({
            "n": args.n,
            "seed": args.seed,
            "replicate": args.replicate,
            "angles": s.angles(),
            "report": distance_report(&s),
            "proposals_used": stats.proposals_used,
        }))?,
    };
    deliver(&text, args.output.out.as_deref())
}

fn exact(args: ExactArgs) -> cuelab::Result<()> {
    let cfg = KernelConfig::new(args.n)?;
    let spec = bernoulli_spectrum(cfg, args.theta)?;
    let law = poisson_binomial(&spec);
    let text = match args.output.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => csv(
            &["k", "lambda", "pmf"],
            (0..=args.n).map(|k| {
                vec![
                    k.to_string(),
                    spec.params()
                        .get(k)
                        .map_or(String::new(), |l| format_sig12(*l)),
                    format_sig12(law.pmf()[k]),
                ]
            }),
        ),
        OutputFormat::Json => {
            let check = variance_bounds_from(args.n, args.theta, law.variance());
            json_text(&json!({
                "n": args.n,
                "theta": args.theta,
                "lambda": spec.params(),
                "pmf": law.pmf(),
                "mean": law.mean(),
                "variance": law.variance(),
                "bounds": check,
            }))?
        }
    };
    deliver(&text, args.output.out.as_deref())
}

fn experiment_config(args: &ExperimentArgs) -> cuelab::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_kv_file(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("n-grid", args.n_grid.as_deref()),
        ("replicates", args.replicates.as_deref()),
        ("seed", args.seed.as_deref()),
        ("metrics", args.metrics.as_deref()),
        ("moments", args.moments.as_deref()),
        ("format", args.format.as_deref()),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(p) = &args.out {
        cfg.output_path = Some(p.clone());
    }
    if let Some(p) = &args.svg {
        cfg.svg_path = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn rates(args: ExperimentArgs, gaps_only: bool) -> cuelab::Result<()> {
    let mut cfg = experiment_config(&args)?;
    if gaps_only {
        cfg.metrics = vec![Metric::MaxGap];
    }
    if cfg.svg_path.is_some() && (cfg.n_grid.len() < 2 || !cfg.has(Metric::DK)) {
        return Err(Error::Invalid(
            "--svg needs at least two N values and the d_k metric".into(),
        ));
    }
    let table = run_experiment(&cfg)?;
    deliver(
        &emit_table(&table, cfg.output_format)?,
        cfg.output_path.as_deref(),
    )?;
    if let Some(path) = &cfg.svg_path {
        write_svg(&rate_diagnostics(&table)?, path)?;
    }
    Ok(())
}

fn certify(args: CertifyArgs) -> cuelab::Result<()> {
    let cert = match (args.x, args.t) {
        (Some(x), Some(t)) => bonferroni_certificate(args.n, x, t)?,
        _ => find_certificate(args.n)?,
    };
    let text = match args.output.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => csv(
            &[
                "n",
                "x",
                "t",
                "t_max",
                "theta",
                "p",
                "tp",
                "lower",
                "in_window",
            ],
            [vec![
                cert.n.to_string(),
                format_sig12(cert.x),
                cert.t.to_string(),
                max_arc_count(cert.n).to_string(),
                format_sig12(cert.theta),
                format_sig12(cert.p),
                format_sig12(cert.tp()),
                format_sig12(cert.lower),
                cert.in_window().to_string(),
            ]],
        ),
        OutputFormat::Json => json_text(&json!({
            "n": cert.n,
            "x": cert.x,
            "t": cert.t,
            "t_max": max_arc_count(cert.n),
            "theta": cert.theta,
            "p": cert.p,
            "tp": cert.tp(),
            "lower": cert.lower,
            "in_window": cert.in_window(),
        }))?,
    };
    deliver(&text, args.output.out.as_deref())
}

fn run(cli: Cli) -> cuelab::Result<()> {
    match cli.command {
        Command::Sample(a) => sample(a),
        Command::Exact(a) => exact(a),
        Command::Rates(a) => rates(a, false),
        Command::Gaps(a) => rates(a, true),
        Command::Certify(a) => certify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cuelab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
