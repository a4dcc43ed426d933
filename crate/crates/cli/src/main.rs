use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use minsurf4_cli::{run, RunConfig, RunOptions};

/// Generate, verify and export minimal spacelike surfaces of Minkowski 4-space.
#[derive(Debug, Parser)]
#[command(name = "minsurf4", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Fail (exit 1) when any soft residual exceeds its tolerance.
    #[arg(long)]
    gate: bool,
    /// Quadrature tolerance, overriding the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for every written artifact.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions {
        out_dir: args.out,
        gate: args.gate,
        tol: args.tol,
    };
    let outcome = RunConfig::load(&args.config).and_then(|cfg| run(&cfg, &opts));
    match outcome {
        Ok(o) => {
            for e in o.report.residuals.iter().filter(|e| !e.pass) {
                eprintln!("{} {}: maxAbs {:e} > tol {:e}", if e.kind == minsurf4::report::GateKind::Hard { "FAIL" } else { "soft" }, e.name, e.max_abs, e.tol);
            }
            if let Some(err) = &o.report.error {
                eprintln!("numerical failure: {err}");
            }
            eprintln!("report written to {}", o.report_path.display());
            ExitCode::from(o.exit_code)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
