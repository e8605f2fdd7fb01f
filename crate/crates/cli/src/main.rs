use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warpsimons::catalog::{self, Target};
use warpsimons::{run, GeomError, RunConfig, RunReport};

#[derive(Parser)]
#[command(name = "warpsimons", version, about = "Verify extrinsic identities of submanifolds in warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample points and evaluate checks; exits 0 when all pass, 1 on a
    /// failed check, 2 on a configuration error.
    Verify(VerifyArgs),
    /// Print the built-in entries and their expected values.
    ListCatalog,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Built-in entry to verify.
    #[arg(long, conflicts_with = "config")]
    catalog: Option<String>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated check or group names.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-check tolerance override, NAME=VALUE; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Report path; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("tolerance `{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn build_config(args: VerifyArgs) -> Result<RunConfig, GeomError> {
    let mut config = match (&args.config, &args.catalog) {
        (Some(path), _) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| GeomError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&src)?
        }
        (None, Some(name)) => RunConfig::for_entry(name),
        (None, None) => return Err(GeomError::Config("give --catalog NAME or --config FILE".into())),
    };
    if let Some(checks) = args.checks {
        config.checks = checks;
    }
    if let Some(points) = args.points {
        config.points = points;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.tolerances.extend(args.tol);
    if args.out.is_some() {
        config.output = args.out;
    }
    Ok(config)
}

fn summary(report: &RunReport) {
    for check in &report.checks {
        let status = if check.pass { "pass" } else { "FAIL" };
        let errors = check.points.iter().filter(|p| p.error.is_some()).count();
        let mut line = format!("{status} {:<28} max_rel {:.3e}  tol {:.1e}", check.name, check.max_rel, check.tol);
        if errors > 0 {
            line.push_str(&format!("  ({errors} point errors)"));
        }
        eprintln!("{line}");
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let config = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    summary(&report);
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn list_catalog() {
    for entry in catalog::list() {
        let spec = entry.cfg.spec();
        println!("{}", entry.name);
        println!("  {}", entry.description);
        println!(
            "  ambient: epsilon {}, warp {}, N {}, c {}, s {}; submanifold dimension {}",
            spec.epsilon,
            spec.warp,
            spec.fiber_dim,
            spec.fiber_curvature,
            spec.fiber_index,
            entry.imm.dim()
        );
        for exp in &entry.expected {
            let target = match exp.target {
                Target::Equals { value, tol } => format!("= {value} (tol {tol:e})"),
                Target::Formula { formula, tol } => format!("= {} (tol {tol:e})", formula.describe()),
                Target::AtLeast(v) => format!(">= {v}"),
                Target::AtMost(v) => format!("<= {v}"),
            };
            println!("    {} {target}: {}", exp.quantity.name(), exp.note);
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => verify(args),
        Command::ListCatalog => {
            list_catalog();
            ExitCode::SUCCESS
        }
    }
}
