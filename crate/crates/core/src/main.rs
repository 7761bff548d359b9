use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vfe::cli_io::{self, generate_initial, ExperimentConfig, Params};
use vfe::verify;
use vfe::{SpaceForm, SpaceKind, VfeError};

/// Vortex filaments in constant-curvature space forms.
#[derive(Parser)]
#[command(name = "vfe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow, transform and certify the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an invariant suite: geometry, frenet, dynamics, hasimoto, frames or all.
    Verify { suite: String },
    /// Write an initial filament as CSV (arclength and ambient coordinates).
    Generate {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "euclidean")]
        kind: SpaceKind,
        /// Sectional curvature; defaults to 0, 1 or -1 by kind.
        #[arg(long)]
        k0: Option<f64>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Generator parameter as key=value; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn threads() -> Result<usize, VfeError> {
    match std::env::var("VFE_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(VfeError::Usage(format!("VFE_THREADS must be a positive integer, got '{v}'"))),
        },
    }
}

fn fail(e: &VfeError) -> ExitCode {
    eprintln!("vfe: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(cmd: Command) -> Result<ExitCode, VfeError> {
    match cmd {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = cli_io::run(&cfg)?;
            print!("{}", out.summary);
            Ok(ExitCode::from(if out.passed() { 0 } else { 2 }))
        }
        Command::Verify { suite } => {
            let Some(results) = verify::run_suite(&suite) else {
                return Err(VfeError::Usage(format!("unknown suite '{suite}'; valid suites: {}", verify::SUITES.join(", "))));
            };
            for c in &results {
                println!("{c}");
            }
            Ok(ExitCode::from(if results.iter().all(|c| c.pass) { 0 } else { 2 }))
        }
        Command::Generate { name, out, kind, k0, n, params } => {
            let k0 = k0.unwrap_or(match kind {
                SpaceKind::Euclidean => 0.0,
                SpaceKind::Spherical => 1.0,
                SpaceKind::Hyperbolic => -1.0,
            });
            let space = SpaceForm::new(kind, k0)?;
            let params: Params = params.into_iter().collect();
            let f = generate_initial(&name, &params, space, n)?;
            let mut w = csv::Writer::from_path(&out).map_err(|e| VfeError::Io(format!("{}: {e}", out.display())))?;
            let io = |e: csv::Error| VfeError::Io(e.to_string());
            w.write_record(["s", "x0", "x1", "x2", "x3"]).map_err(io)?;
            for (s, p) in f.arclength_grid().iter().zip(f.raw_points()) {
                let row = [*s, p[0], p[1], p[2], p[3]];
                w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(io)?;
            }
            w.flush()?;
            println!("wrote {} samples of {name} (length {:.12e}) to {}", f.len(), f.length(), out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = threads().and_then(|n| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| VfeError::Numerical(e.to_string()))
    });
    if let Err(e) = pool {
        return fail(&e);
    }
    run(cli.command).unwrap_or_else(|e| fail(&e))
}
