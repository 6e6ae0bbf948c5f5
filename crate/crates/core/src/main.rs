use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wstar::cli::{
    compute_at, describe, load_metric, parse_point, run_session, unix_time, CheckSelection, OutputFormat,
    RunConfig, RunError, Session, CATALOG, CHECKS,
};
use wstar::geometry::Geometry;
use wstar::relativity::{FieldEquationConfig, Tolerance};
use wstar::wstar::Evaluator;

#[derive(Parser)]
#[command(name = "wstar", version, about = "W*-curvature and related identities of space-time metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in metrics.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run checks at seeded sample points.
    Check(RunArgs),
    /// Print one tensor at one point.
    Compute {
        /// Catalog name or metric file.
        #[arg(long)]
        metric: String,
        /// metric, inverse, christoffel, riemann, ricci, scalar, weyl, wstar,
        /// wstar_contraction, energy_momentum or krupka.
        #[arg(long)]
        tensor: String,
        /// Comma-separated `coord=value`; omitted coordinates sit mid-domain.
        #[arg(long, default_value = "")]
        at: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Fill every classification flag and test the theorem pairings.
    Classify(RunArgs),
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Names and descriptions of the built-in metrics.
    List,
    /// Names and descriptions of the checks.
    Checks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct RunArgs {
    /// Catalog name or metric file.
    #[arg(long)]
    metric: String,
    /// `all` or a comma-separated list (see `wstar catalog checks`).
    #[arg(long, default_value = "all")]
    checks: String,
    #[arg(long, default_value_t = 32)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-9)]
    atol: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Vector field components `xi^i`, comma-separated, for the symmetry checks.
    #[arg(long)]
    xi: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Leave the timestamp out of the report.
    #[arg(long)]
    no_timestamp: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, RunError> {
        Ok(RunConfig {
            metric: self.metric.clone(),
            checks: CheckSelection::parse(&self.checks)?,
            points: self.points,
            seed: self.seed,
            tolerance: Tolerance { atol: self.atol, rtol: self.rtol },
            field: FieldEquationConfig { k: self.k, lambda: self.lambda },
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Table => OutputFormat::Table,
            },
            timestamp: !self.no_timestamp,
            xi: self.xi.clone(),
        })
    }
}

fn check(args: &RunArgs) -> Result<bool, RunError> {
    let cfg = args.config()?;
    let session = Session::open(&cfg)?;
    let report = run_session(&session, &cfg)?;
    println!("{}", report.render(cfg.format));
    Ok(!report.any_failed())
}

fn classify(args: &RunArgs) -> Result<bool, RunError> {
    let cfg = args.config()?;
    let session = Session::open(&cfg)?;
    let rec = session.classify(&cfg)?;
    match cfg.format {
        OutputFormat::Json => {
            let mut v = serde_json::json!({
                "metric": rec.metric,
                "seed": cfg.seed,
                "points": cfg.points,
                "tolerances": cfg.tolerance,
                "k": cfg.field.k,
                "lambda": cfg.field.lambda,
                "classification": rec,
            });
            if cfg.timestamp {
                v["timestamp"] = unix_time().into();
            }
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        }
        OutputFormat::Table => {
            println!("metric {} ({} points, seed {})", rec.metric, cfg.points, cfg.seed);
            for (name, f) in rec.flags() {
                println!("{name:26} {:5}  {:.3e}", f.holds, f.worst.value);
            }
            match &rec.ricci_recurrent {
                Some(r) => println!("{:26} {:5}  {:.3e}", "ricci_recurrent", r.flag.holds, r.flag.worst.value),
                None => println!("{:26} n/a", "ricci_recurrent"),
            }
            for p in &rec.pairings {
                println!("{:40} {}  {}", p.name, if p.holds { "ok" } else { "VIOLATED" }, p.detail);
            }
        }
    }
    Ok(rec.consistent())
}

fn compute(metric: &str, tensor: &str, at: &str, k: f64, lambda: f64) -> Result<bool, RunError> {
    let cfg = FieldEquationConfig::new(k, lambda)?;
    let spec = load_metric(metric)?;
    let p = parse_point(&spec, at)?;
    let ev = Evaluator::new(std::sync::Arc::new(Geometry::new(spec)?))?;
    print!("{}", compute_at(&ev, tensor, &p, &cfg)?);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Catalog { action: CatalogAction::List } => {
            for name in CATALOG {
                println!("{name:16} {}", describe(name).unwrap_or(""));
            }
            Ok(true)
        }
        Command::Catalog { action: CatalogAction::Checks } => {
            for (name, what) in CHECKS {
                println!("{name:32} {what}");
            }
            Ok(true)
        }
        Command::Check(args) => check(args),
        Command::Classify(args) => classify(args),
        Command::Compute { metric, tensor, at, k, lambda } => compute(metric, tensor, at, *k, *lambda),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
