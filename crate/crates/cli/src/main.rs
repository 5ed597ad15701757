use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use susmap::sim::BackendKind;
use susmap_cli::{run, Command, Options};

#[derive(Parser)]
#[command(name = "susmap", version, about = "Reverse-anneal h-gain susceptibility experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; overrides `backend.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the sweep.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    backend: Option<Backend>,
    /// Report exact probabilities instead of sampled reads.
    #[arg(long, global = true)]
    exact: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Run every (initial, target, h) reverse anneal.
    Sweep,
    /// Compute susceptibility records, averages and correlations.
    Analyze,
    /// Spectral clustering of response curves.
    Cluster,
    /// Build and export state-transition networks.
    Network,
    /// Tile the problem graph onto a Pegasus graph.
    Tile,
    /// Render SVG figures and a text summary.
    Report,
}

#[derive(ValueEnum, Clone, Copy)]
enum Backend {
    Schrodinger,
    Svmc,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Sweep => Command::Sweep,
        Cmd::Analyze => Command::Analyze,
        Cmd::Cluster => Command::Cluster,
        Cmd::Network => Command::Network,
        Cmd::Tile => Command::Tile,
        Cmd::Report => Command::Report,
    };
    let opts = Options {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs,
        backend: cli.backend.map(|b| match b {
            Backend::Schrodinger => BackendKind::Schrodinger,
            Backend::Svmc => BackendKind::Svmc,
        }),
        exact: cli.exact,
    };
    match run(command, &opts) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
