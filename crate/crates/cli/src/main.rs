use clap::{Parser, Subcommand};
use otis_cli::commands;
use otis_cli::config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

/// Identified sets for moment models under data combination, via optimal
/// transport.
#[derive(Parser)]
#[command(name = "otis", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Model file (JSON); see the README for the accepted layouts.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Seed for every sampled ingredient.
    #[arg(long, global = true, default_value_t = 17)]
    seed: u64,

    /// Number of support-function directions N_p.
    #[arg(long, global = true)]
    directions: Option<usize>,

    /// Number of candidate points N_δ (the simulations grid ⌊√N_δ⌋ per
    /// axis); for `verify`, the instance count per suite.
    #[arg(long, global = true)]
    candidates: Option<usize>,

    /// Covariate grid size N_x for the built-in designs.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Halfspace acceptance tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Use the restricted direction family (at most one nonzero coordinate
    /// in the shared-regressor block).
    #[arg(long, global = true)]
    restricted: bool,

    /// Also write SVG scatter plots.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the support function on sampled directions.
    Support,
    /// Approximate the identified set by halfspace filtering.
    Set,
    /// Linear projection panels across correlation levels.
    Sim1,
    /// Linear projection panels across noise scales (Monte-Carlo ingested).
    Sim2,
    /// Solve one 2×J partial transport instance from JSON.
    DreamSolve,
    /// Run the oracle-equivalence verification suites.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        model: cli.model,
        seed: cli.seed,
        directions: cli.directions.unwrap_or(2000),
        candidates: cli.candidates.unwrap_or(match cli.command {
            Command::Verify => 200,
            _ => 20_000,
        }),
        grid: cli.grid.unwrap_or(101),
        tol: cli.tol,
        out: cli.out,
        restricted: cli.restricted,
        svg: cli.svg,
    };
    let result = match cli.command {
        Command::Support => commands::cmd_support(&config),
        Command::Set => commands::cmd_set(&config),
        Command::Sim1 => commands::cmd_sim1(&config),
        Command::Sim2 => commands::cmd_sim2(&config),
        Command::DreamSolve => commands::cmd_dream_solve(&config),
        Command::Verify => commands::cmd_verify(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
