use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use tourney_core::tournament::solve_tournament;
use tourney_core::verify::{existence_gate, verify};
use tourney_core::{Error, SimConfig, SimMode};

use crate::error::CliError;
use crate::output;
use crate::parallel::Rayon;
use crate::replicate::{replicate, replication_table};
use crate::scenario::{parse_scenario, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "tourney",
    version,
    about = "Solve, audit and simulate four-player elimination tournaments with sabotage"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the result as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Also write the per-player table as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Monte Carlo trials (overrides the scenario).
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// RNG seed (overrides the scenario).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sampling mode (overrides the scenario).
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the subgame-perfect candidate and print efforts and probabilities.
    Solve { scenario: PathBuf },
    /// Solve, then run the FOC/SOC/corner/grid-oracle audit. Exits 1 if it fails.
    Verify { scenario: PathBuf },
    /// Solve, then replay the tournament by Monte Carlo.
    Simulate { scenario: PathBuf },
    /// Compare a bundled example against its published numbers.
    Replicate {
        #[arg(value_parser = ["example1", "example2"])]
        example: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Direct,
    Structural,
}

impl From<ModeArg> for SimMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Direct => SimMode::DirectProbability,
            ModeArg::Structural => SimMode::StructuralNoise,
        }
    }
}

fn sim_config(cli: &Cli, base: SimConfig) -> SimConfig {
    SimConfig {
        trials: cli.trials.unwrap_or(base.trials),
        seed: cli.seed.unwrap_or(base.seed),
        mode: cli.mode.map(SimMode::from).unwrap_or(base.mode),
    }
}

fn solve(s: &Scenario) -> Result<tourney_core::SpeSolution, CliError> {
    solve_tournament(&s.spec).map_err(|e| match e {
        Error::Domain(m) => CliError::Parse(m),
        other => CliError::Solver(format!("existence gate failed: {other}")),
    })
}

fn sim_error(e: Error) -> CliError {
    CliError::Parse(e.to_string())
}

/// Run a parsed command line and return its process exit status.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve { scenario } => {
            let s = parse_scenario(scenario)?;
            let sol = solve(&s)?;
            print!("{}", output::solution_table(&s.spec, &sol));
            if let Some(p) = &cli.json {
                output::write_json(p, &sol)?;
            }
            if let Some(p) = &cli.csv {
                output::write_text(p, &output::players_csv(&sol))?;
            }
            Ok(())
        }
        Command::Verify { scenario } => {
            let s = parse_scenario(scenario)?;
            let sol = solve(&s)?;
            let report = verify(&Rayon, &s.spec, &sol);
            print!("{}", output::report_table(&report));
            if let Some(p) = &cli.json {
                output::write_json(p, &report)?;
            }
            if let Some(p) = &cli.csv {
                output::write_text(p, &output::players_csv(&sol))?;
            }
            if report.interior_ok {
                Ok(())
            } else {
                let gate = existence_gate(&Rayon, &s.spec);
                match gate.minimal_v_estimate {
                    Some(v) => println!(
                        "smallest admissible prize found above {}: ~{v:.4}",
                        s.spec.prize
                    ),
                    None => println!("no admissible prize found above {}", s.spec.prize),
                }
                Err(CliError::Verification(
                    report.first_failure.unwrap_or_default(),
                ))
            }
        }
        Command::Simulate { scenario } => {
            let s = parse_scenario(scenario)?;
            let sol = solve(&s)?;
            let config = sim_config(cli, s.sim);
            let res = tourney_core::sim::simulate_tournament(&Rayon, &sol, &s.spec.csf, &config)
                .map_err(sim_error)?;
            print!("{}", output::sim_table(&sol, &res));
            if let Some(p) = &cli.json {
                output::write_json(p, &res)?;
            }
            if let Some(p) = &cli.csv {
                output::write_text(p, &output::sim_csv(&sol, &res))?;
            }
            Ok(())
        }
        Command::Replicate { example } => {
            let base = crate::replicate::example_scenario(example)?.sim;
            let rep = replicate(&Rayon, example, sim_config(cli, base))?;
            print!("{}", replication_table(&rep));
            if let Some(p) = &cli.json {
                output::write_json(p, &rep)?;
            }
            if let Some(p) = &cli.csv {
                output::write_text(p, &output::players_csv(&rep.solution))?;
            }
            if rep.all_hard_rows_match() {
                Ok(())
            } else {
                Err(CliError::Verification(
                    "published values not reproduced".into(),
                ))
            }
        }
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tourney: {e}");
            e.exit_code()
        }
    }
}
