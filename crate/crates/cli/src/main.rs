use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdepol_cli::config::{parse_config, ExperimentKind};
use qdepol_cli::runner::run_experiment;
use qdepol_cli::table::emit_table;
use qdepol_cli::CliError;

#[derive(Parser)]
#[command(name = "qdepol", version, about = "Run depolarizing-projection and noisy-VQE experiments, writing CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of the single-insertion twirl average versus circuit length.
    TwirlEntropy(Common),
    /// Final noisy and mitigated VQE energies over a coupling or depth grid.
    VqeSweep(Common),
    /// Per-iteration energies and ground-state overlap of one VQE run.
    VqeDescent(Common),
    /// Layers needed for a target accuracy and confidence.
    LayerBudget(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (overrides the config file); stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "QDEPOL_THREADS", default_value_t = 0)]
    threads: usize,
}

fn run(kind: ExperimentKind, args: Common) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text, kind).map_err(CliError::from_config_errors)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    let table = run_experiment(&cfg, args.threads)?;
    match &cfg.out {
        Some(path) => emit_table(&table, path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(table.render().as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::TwirlEntropy(a) => (ExperimentKind::TwirlEntropy, a),
        Command::VqeSweep(a) => (ExperimentKind::VqeSweep, a),
        Command::VqeDescent(a) => (ExperimentKind::VqeDescent, a),
        Command::LayerBudget(a) => (ExperimentKind::LayerBudget, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdepol {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
