use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffspin::commands;
use ffspin::config::RunConfig;
use ffspin::CliError;
use ffspin_core::cdsolver::Selection;
use ffspin_core::models::ModelKind;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "ffspin", version, about = "Fast-forward driving of few-spin models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the driven state and write trajectory, coefficients and summary.
    Run(Common),
    /// Solve the regularization term for one selection across an R grid.
    SolveCd(Common),
    /// Enumerate every candidate selection across an R grid.
    Enumerate(Common),
    /// Check the closed-form annealing solutions across an R grid.
    VerifyTable(Common),
    /// Run the invariant suite.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (repeatable; jobs run concurrently).
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Integrator step, overriding the configuration.
    #[arg(long)]
    dt: Option<f64>,
    /// Comma-separated coefficient names, e.g. `By,W2,Bz`.
    #[arg(long)]
    selection: Option<String>,
    /// Number of R grid points.
    #[arg(long)]
    grid: Option<usize>,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Config(format!("--dt must be positive, got {dt}")));
            }
            cfg.evolve.dt = Some(dt);
        }
        if let Some(s) = &self.selection {
            cfg.selection = Some(Selection::parse(s)?);
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(CliError::Config("--grid must be at least 1".into()));
            }
            cfg.grid_points = g;
        }
        Ok(())
    }

    /// Output directory of one job; jobs get their own subdirectory when
    /// several configurations are given.
    fn out_dir(&self, cfg: &RunConfig) -> PathBuf {
        let base = self.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        if self.configs.len() > 1 {
            base.join(&cfg.name)
        } else {
            base
        }
    }
}

fn report(prefix: &str, e: &CliError) -> u8 {
    eprintln!("{prefix}: {e}");
    e.exit_code()
}

fn job(cmd: &Command, common: &Common, path: &Path) -> u8 {
    let name = path.display().to_string();
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return report(&name, &e),
    };
    if let Err(e) = common.apply(&mut cfg) {
        return report(&name, &e);
    }
    let dir = common.out_dir(&cfg);
    let result = match cmd {
        Command::Run(_) => commands::run(&cfg, &dir).map(|pass| {
            if !pass {
                eprintln!("{name}: fidelity fell below {}", cfg.fidelity_min);
            }
            u8::from(!pass)
        }),
        Command::SolveCd(_) => commands::solve_cd(&cfg, &dir).map(|rejected| match rejected {
            Some(msg) => {
                eprintln!("{name}: {msg}");
                3
            }
            None => 0,
        }),
        Command::Enumerate(_) => commands::enumerate(&cfg, &dir).map(|s| {
            println!(
                "{name}: {} points, accepted {}..{}, groups {}..{}",
                s["grid_points"], s["accepted_min"], s["accepted_max"], s["groups_min"], s["groups_max"]
            );
            0
        }),
        Command::VerifyTable(_) => commands::verify_table(&cfg, &dir).map(|pass| {
            if !pass {
                eprintln!("{name}: table verification failed, see {}", dir.join("table.csv").display());
            }
            u8::from(!pass)
        }),
        Command::Verify(_) => verify(&cfg.verify_models, cfg.grid_points, &dir),
    };
    result.unwrap_or_else(|e| report(&name, &e))
}

fn verify(models: &[ModelKind], grid: usize, dir: &Path) -> Result<u8, CliError> {
    let checks = commands::verify(models, grid, dir)?;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {} {}: {:e} (threshold {:e}) {}", c.model, c.name, c.value, c.threshold, c.detail);
    }
    Ok(u8::from(checks.iter().any(|c| !c.pass)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Run(c)
        | Command::SolveCd(c)
        | Command::Enumerate(c)
        | Command::VerifyTable(c)
        | Command::Verify(c) => c,
    };
    let code = if common.configs.is_empty() {
        match &cli.command {
            Command::Verify(_) => {
                let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
                verify(&ModelKind::ALL, common.grid.unwrap_or(20), &dir).unwrap_or_else(|e| report("verify", &e))
            }
            _ => report("ffspin", &CliError::Config("at least one --config is required".into())),
        }
    } else {
        common.configs.par_iter().map(|p| job(&cli.command, common, p)).max().unwrap_or(0)
    };
    ExitCode::from(code)
}
