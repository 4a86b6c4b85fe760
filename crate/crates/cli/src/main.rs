use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use neuromod_core::env::BehaviorCue;
use neuromod_core::harness::{
    curve_files_in, load_policy, replay, run_experiment, summarize, write_summary, Progress,
    RunConfig,
};
use neuromod_core::specialization::specialization_report;
use neuromod_core::Error;

#[derive(Parser)]
#[command(
    name = "neuromod",
    version,
    about = "Two-behavior neuroevolution experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every replication of a configuration.
    Train {
        #[command(flatten)]
        overrides: Overrides,
        /// Suppress per-generation progress on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Summarize final combined fitness across curve files.
    Summarize {
        #[command(flatten)]
        overrides: Overrides,
        /// Curve files; defaults to every fitness_gen_r*.csv in the output directory.
        files: Vec<PathBuf>,
        /// Value of the `config` column; defaults to the configuration label.
        #[arg(long)]
        label: Option<String>,
        /// Where to write the summary; defaults to <out>/summary.csv.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Replay a saved policy and dump its trajectory.
    Replay {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value = "b1")]
        behavior: BehaviorCue,
        /// Trajectory CSV path; defaults to <out>/trajectory_<behavior>.csv.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Gate-usage specialization report of a saved gated policy.
    Specialization {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        params: PathBuf,
        /// Episodes per behavior.
        #[arg(long, default_value_t = 1)]
        episodes: u64,
        /// Report CSV path; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct Overrides {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    /// naive, episodes or paired.
    #[arg(long)]
    strategy: Option<String>,
    /// on or off.
    #[arg(long)]
    gating: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    weight_decay: Option<String>,
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    replications: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Run replications concurrently.
    #[arg(long)]
    parallel: bool,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("env", &self.env),
            ("strategy", &self.strategy),
            ("gating", &self.gating),
            ("seed", &self.seed),
            ("generations", &self.generations),
            ("pairs", &self.pairs),
            ("sigma", &self.sigma),
            ("lr", &self.lr),
            ("weight_decay", &self.weight_decay),
            ("hidden", &self.hidden),
            ("max_steps", &self.max_steps),
            ("replications", &self.replications),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        if self.parallel {
            config.parallel_replications = true;
        }
        config.validate()?;
        Ok(config)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Usage(_) | Error::Dimension { .. } => 1,
        Error::Io { .. } | Error::Parse { .. } => 2,
        Error::Numerical(_) => 3,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Train { overrides, quiet } => {
            let config = overrides.resolve()?;
            let report_progress = |p: Progress| {
                if !quiet {
                    eprintln!(
                        "r{} gen {:>5}  combined {:>12.4}  gap {:.3}",
                        p.replication, p.row.generation, p.row.combined, p.behavior_gap
                    );
                }
            };
            let report = run_experiment(&config, &report_progress)?;
            for path in &report.curve_files {
                println!("{}", path.display());
            }
            if let Some((r, e)) = report.failed.into_iter().next() {
                eprintln!("replication {r} failed: {e}");
                return Err(e);
            }
            Ok(())
        }
        Command::Summarize {
            overrides,
            files,
            label,
            summary,
        } => {
            let config = overrides.resolve()?;
            let files = if files.is_empty() {
                curve_files_in(&config.out_dir)?
            } else {
                files
            };
            let stats = summarize(&files, &label.unwrap_or_else(|| config.label()))?;
            let path = match summary {
                Some(p) => p,
                None => {
                    ensure_dir(&config.out_dir)?;
                    config.out_dir.join("summary.csv")
                }
            };
            write_summary(&path, &stats)?;
            print!("{}", stats.to_csv());
            Ok(())
        }
        Command::Replay {
            overrides,
            params,
            behavior,
            trajectory,
        } => {
            let config = overrides.resolve()?;
            let topology = config.topology()?;
            let result = replay(&params, &topology, config.env, behavior, config.max_steps)?;
            let path = match trajectory {
                Some(p) => p,
                None => {
                    ensure_dir(&config.out_dir)?;
                    config.out_dir.join(format!("trajectory_{behavior}.csv"))
                }
            };
            write_file(&path, &result.trajectory_csv)?;
            println!("fitness {}", result.fitness);
            println!("steps {}", result.steps_used);
            Ok(())
        }
        Command::Specialization {
            overrides,
            params,
            episodes,
            report,
        } => {
            let config = overrides.resolve()?;
            let topology = config.topology()?;
            let genome = load_policy(&params, &topology)?;
            let seeds: Vec<u64> = (0..episodes.max(1)).collect();
            let rep = specialization_report(
                genome.as_slice(),
                &topology,
                config.env,
                &seeds,
                config.max_steps,
            )?;
            match report {
                Some(path) => {
                    write_file(&path, &rep.to_csv())?;
                    println!("aggregate {}", rep.aggregate);
                }
                None => print!("{}", rep.to_csv()),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
