use std::path::PathBuf;
use std::process::ExitCode;

use adff::experiment::{
    cmd_ablate, cmd_cv, cmd_extract, cmd_sweep, cmd_synth, parse_config, RunConfig, SweepAxis,
};
use adff::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "adff",
    version,
    about = "Music emotion recognition with attention-based deep feature fusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the channel-width multiplier.
    #[arg(long)]
    width: Option<f64>,
    /// Overrides the dataset root.
    #[arg(long)]
    root: Option<PathBuf>,
    /// Adds published reference values as `paper_*` columns.
    #[arg(long)]
    paper_reference: bool,
    /// Leaves wall-clock columns empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and cache log-Mel features for every chorus.
    Extract(Common),
    /// Cross-validate the configured setting.
    Cv(Common),
    /// Cross-validate every value of a grid.
    Sweep {
        #[arg(long, value_parser = ["seg_num", "seg_len"])]
        axis: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-validate the full model and both ablated variants.
    Ablate(Common),
    /// Write a synthetic annotated corpus.
    Synth {
        /// Number of clips.
        #[arg(long)]
        n: usize,
        /// Clip length in seconds.
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corpus directory.
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let mut config = match &common.config {
        Some(path) if common.root.is_some() => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml_str(&text)?
        }
        Some(path) => parse_config(path).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output.out_dir = out.clone();
    }
    if let Some(width) = common.width {
        config.model.width = width;
    }
    if let Some(root) = &common.root {
        config.data.root = Some(root.clone());
    }
    config.output.paper_reference |= common.paper_reference;
    if common.no_timing {
        config.output.timing = false;
    }
    config.validate()?;
    config.root()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Extract(common) => {
            let summary = cmd_extract(&load(&common)?)?;
            println!(
                "extracted {}, up to date {}, failed {}",
                summary.computed,
                summary.skipped,
                summary.failures.len()
            );
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for f in &summary.failures {
                eprintln!("failed: {}: {}", f.path.display(), f.error);
            }
            if !summary.failures.is_empty() {
                return Err(Failure {
                    code: 2,
                    message: format!(
                        "{} file(s) failed; see extract_errors.json",
                        summary.failures.len()
                    ),
                });
            }
        }
        Command::Cv(common) => {
            let run = cmd_cv(&load(&common)?)?;
            println!("wrote {}", run.dir.join("results.csv").display());
        }
        Command::Sweep { axis, common } => {
            let axis = SweepAxis::parse(&axis)?;
            let run = cmd_sweep(&load(&common)?, axis)?;
            println!("wrote {}", run.dir.join("summary.csv").display());
            if !run.failures.is_empty() {
                return Err(Failure {
                    code: 2,
                    message: format!(
                        "{} grid point(s) failed; see {}",
                        run.failures.len(),
                        run.dir.join("failures.json").display()
                    ),
                });
            }
        }
        Command::Ablate(common) => {
            let run = cmd_ablate(&load(&common)?)?;
            println!("wrote {}", run.dir.join("summary.csv").display());
        }
        Command::Synth {
            n,
            duration,
            seed,
            out,
        } => {
            let records = cmd_synth(&out, n, seed, duration)?;
            println!("wrote {} clips to {}", records.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
