//! Command-line front end: one run from a config file and/or flags, or a
//! batch over a directory of configs.
//!
//! Exit codes: 0 success, 2 validation error, 3 route failure under
//! --strict.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use hopf_phase::report::{self, Options};
use hopf_phase::Error;

#[derive(Parser, Debug)]
#[command(
    name = "hopf-phase",
    about = "Rotation angle of a rolling disc: dynamical + geometric phase, cross-checked along independent routes",
    after_help = "Angles are radians; append `deg` for degrees (e.g. --beta0 60deg).\n\
                  Config files hold `key = value` lines with the same keys as the flags."
)]
struct Cli {
    /// Flat key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Run every .cfg file in this directory instead of a single run.
    #[arg(long, conflicts_with = "config")]
    batch: Option<PathBuf>,

    /// Motion family: constant_tilt, wobble, tilt_sweep, piecewise_linear_table.
    #[arg(long)]
    family: Option<String>,

    /// Base tilt angle.
    #[arg(long)]
    beta0: Option<String>,

    /// Wobble amplitude.
    #[arg(long)]
    dbeta: Option<String>,

    /// Wobble frequency (full tilt oscillations per cycle).
    #[arg(long)]
    mfreq: Option<u32>,

    /// Turning tilt of the sweep family.
    #[arg(long)]
    beta1: Option<String>,

    /// Motion table file (t theta beta per line).
    #[arg(long)]
    table: Option<PathBuf>,

    /// Winding count of the contact angle.
    #[arg(long)]
    n: Option<i64>,

    /// Radius of the fixed disc.
    #[arg(long)]
    a: Option<f64>,

    /// Radius of the rolling disc.
    #[arg(long)]
    b: Option<f64>,

    /// Grid intervals (even, >= 256).
    #[arg(long)]
    grid: Option<usize>,

    /// Comma-separated decreasing cut-off ladder inside (0, pi/8).
    #[arg(long)]
    eps_ladder: Option<String>,

    /// Directory for emitted artifacts.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Comma-separated artifacts to write: report,csv,svg.
    #[arg(long)]
    emit: Option<String>,

    /// Warn when a per-interval slope exceeds this bound.
    #[arg(long)]
    lipschitz_warn: Option<f64>,

    /// Label used in artifact filenames and the report header.
    #[arg(long)]
    label: Option<String>,

    /// Exit 3 when any route is skipped.
    #[arg(long)]
    strict: bool,
}

fn collect_options(cli: &Cli) -> Result<Options, Error> {
    let mut opts = Options::default();
    if let Some(path) = &cli.config {
        opts.merge_file(path)?;
    }
    if let Some(v) = &cli.family {
        opts.set("family", v.clone());
    }
    if let Some(v) = &cli.beta0 {
        opts.set("beta0", v.clone());
    }
    if let Some(v) = &cli.dbeta {
        opts.set("dbeta", v.clone());
    }
    if let Some(v) = cli.mfreq {
        opts.set("mfreq", v.to_string());
    }
    if let Some(v) = &cli.beta1 {
        opts.set("beta1", v.clone());
    }
    if let Some(v) = &cli.table {
        opts.set("table", v.display().to_string());
    }
    if let Some(v) = cli.n {
        opts.set("n", v.to_string());
    }
    if let Some(v) = cli.a {
        opts.set("a", v.to_string());
    }
    if let Some(v) = cli.b {
        opts.set("b", v.to_string());
    }
    if let Some(v) = cli.grid {
        opts.set("grid", v.to_string());
    }
    if let Some(v) = &cli.eps_ladder {
        opts.set("eps_ladder", v.clone());
    }
    if let Some(v) = &cli.out_dir {
        opts.set("out_dir", v.display().to_string());
    }
    if let Some(v) = &cli.emit {
        opts.set("emit", v.clone());
    }
    if let Some(v) = cli.lipschitz_warn {
        opts.set("lipschitz_warn", v.to_string());
    }
    if let Some(v) = &cli.label {
        opts.set("label", v.clone());
    }
    if cli.strict {
        opts.set("strict", "true");
    }
    Ok(opts)
}

fn single_run(cli: &Cli) -> Result<bool, Error> {
    let opts = collect_options(cli)?;
    let config = opts.resolve()?;
    let rep = report::run(&config)?;
    print!("{}", report::render_text(&rep));
    let written = report::emit(&config, &rep)?;
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(config.strict && !rep.all_routes_ok())
}

fn batch_run(dir: &Path, strict: bool) -> Result<bool, Error> {
    let results = report::run_batch(dir)?;
    if results.is_empty() {
        return Err(Error::Config(format!(
            "no .cfg files under {}",
            dir.display()
        )));
    }
    let mut any_route_failure = false;
    for (label, result) in results {
        match result {
            Ok(rep) => {
                let ok = rep.all_routes_ok();
                any_route_failure |= !ok;
                println!(
                    "{label}: ok{}",
                    if ok { "" } else { " (some routes skipped)" }
                );
            }
            Err(msg) => {
                any_route_failure = true;
                println!("{label}: failed: {msg}");
            }
        }
    }
    Ok(strict && any_route_failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = if let Some(dir) = &cli.batch {
        batch_run(dir, cli.strict)
    } else {
        single_run(&cli)
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: a route was skipped and --strict is set");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
