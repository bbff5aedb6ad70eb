use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use halfline_drift::harness::{self, ScenarioConfig, TheoremReport};
use halfline_drift::Result;

#[derive(Parser)]
#[command(name = "halfline-drift", version, about = "Half-line drift-diffusion solver and theorem checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Artifact directory (default: runs/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// Run every *.toml in a directory, in parallel.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// Emit a closed-form profile table as CSV with columns x,value.
    Profile {
        /// e.g. "family=selfsimilar mass=0.5 t=1".
        spec: String,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-evaluate the checks on an existing artifact directory.
    Check {
        #[arg(long)]
        out: PathBuf,
    },
}

fn verdict_code(report: &TheoremReport) -> u8 {
    if report.all_pass() {
        0
    } else {
        1
    }
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { config, out, cells, t_end } => {
            let cfg = ScenarioConfig::from_path(&config)?.with_overrides(cells, t_end)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(cfg.label()));
            let outcome = harness::run_scenario(&cfg, Some(&dir))?;
            print!("{}", outcome.report.to_text());
            println!("artifacts in {}", dir.display());
            Ok(verdict_code(&outcome.report))
        }
        Command::Sweep { config, out, cells, t_end } => {
            let files = harness::scenario::config_files(&config)?;
            let mut code = 0;
            for (path, result) in harness::sweep(&files, &out, cells, t_end) {
                match result {
                    Ok(report) => {
                        print!("{}", report.to_text());
                        code = code.max(verdict_code(&report));
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        code = 2;
                    }
                }
            }
            Ok(code)
        }
        Command::Profile { spec, x_max, points, out } => {
            let rows = harness::profile_table(&spec, x_max, points)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| halfline_drift::Error::Io {
                        path: path.clone(),
                        message: e.to_string(),
                    })?;
                    harness::io::write_table(file, &rows)?;
                }
                None => harness::io::write_table(std::io::stdout().lock(), &rows)?,
            }
            Ok(0)
        }
        Command::Check { out } => {
            let report = harness::check_artifacts(&out)?;
            print!("{}", report.to_text());
            Ok(verdict_code(&report))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
