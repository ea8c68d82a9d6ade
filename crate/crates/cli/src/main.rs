use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nslab::campaign::{run, ExperimentConfig, ExperimentKind};

/// Damped Navier-Stokes laboratory.
#[derive(Parser, Debug)]
#[command(name = "nslab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory of this run.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Root under which runs without `--out` or `output` are placed.
    #[arg(long, global = true, env = "NSLAB_OUT", default_value = "nslab-out")]
    out_root: PathBuf,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment.
    Run { config: PathBuf },
    /// Run a parameter sweep and consolidate its table.
    Sweep { config: PathBuf },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn output_dir(cli: &Cli, cfg: &ExperimentConfig, path: &Path) -> PathBuf {
    if let Some(out) = &cli.out {
        return out.clone();
    }
    if let Some(out) = &cfg.output {
        return out.clone();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| "run".into());
    cli.out_root.join(stem)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let (path, want_sweep) = match &cli.command {
        Command::Run { config } => (config, false),
        Command::Sweep { config } => (config, true),
    };
    let cfg = match ExperimentConfig::load(path).and_then(|mut c| {
        if let Some(seed) = cli.seed {
            c.seed = seed;
        }
        c.resolve()
    }) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if want_sweep && cfg.kind != ExperimentKind::Sweep {
        eprintln!("error: `sweep` needs a configuration with kind = \"sweep\"");
        return ExitCode::from(EXIT_CONFIG);
    }

    let out = output_dir(&cli, &cfg, path);
    match run(&cfg, &out) {
        Ok(outcome) => {
            println!("{:?}: artifacts in {}", outcome.status, outcome.out_dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
