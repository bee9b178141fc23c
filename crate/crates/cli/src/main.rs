use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tflab_cli::{run, CliError, Command, ExperimentConfig};

/// Reproducible time-frequency concentration experiments.
#[derive(Debug, Parser)]
#[command(name = "tflab", version)]
struct Args {
    /// Command to run; must match `command` in the config.
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(args: &Args) -> Result<String, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.command != args.command {
        return Err(CliError::Config(format!(
            "key `command`: config says `{}` but `{}` was requested",
            cfg.command.name(),
            args.command.name()
        )));
    }
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    cfg.resolve_paths(&base);
    let out_dir = args.out.clone().unwrap_or_else(|| base.join(&cfg.output));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let output = pool.install(|| run(&cfg))?;
    let files = output.write_to(&out_dir)?;
    Ok(format!("{}; wrote {} files to {}", output.summary, files.len(), out_dir.display()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(msg) => {
            println!("[{}] {msg}", args.command.name());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tflab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
