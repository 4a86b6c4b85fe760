use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::RunConfig;
use super::curve::{CurveRow, FitnessCurve};
use crate::env::BehaviorCue;
use crate::error::{Error, Result};
use crate::es::{apply_update, centered_ranks, estimate_update, sample_pairs, EsState};
use crate::eval::{build_plan, evaluate_generation, gap_from_fitness, rollout};
use crate::params_file::write_params;
use crate::policy::{init_params, ParameterVector};

/// Episode seed used for the per-generation centroid evaluation.
pub const CENTROID_EPISODE_SEED: u64 = 0;

/// Progress of one generation, as reported to a progress callback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub replication: u64,
    pub row: CurveRow,
    pub behavior_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedReplication {
    pub curve: FitnessCurve,
    pub params: ParameterVector,
}

/// Trains replication `r` of `config` and returns its curve and final centroid.
pub fn train_replication(
    config: &RunConfig,
    r: u64,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<TrainedReplication> {
    config.validate()?;
    let seed = config.replication_seed(r);
    let topology = config.topology()?;
    let es = config.es_config(seed);
    let mut state = EsState::new(init_params(&topology, seed)?);
    let mut curve = FitnessCurve::default();
    let mut eval_steps = 0u64;

    for generation in 0..config.generations {
        let batch = sample_pairs(&state, &es);
        let plan = build_plan(config.strategy, generation, seed, config.n_pairs);
        let candidates = batch.candidates(state.centroid.as_slice());
        let scored =
            evaluate_generation(&candidates, &plan, config.env, &topology, config.max_steps)?;
        eval_steps += scored.total_steps();
        let utilities = centered_ranks(&scored.fitness)?;
        let g = estimate_update(&batch, &utilities)?;
        apply_update(&mut state, &g, &es)?;

        let centroid = state.centroid.as_slice();
        let [f1, f2] = BehaviorCue::ALL.map(|b| {
            rollout(
                centroid,
                &topology,
                config.env,
                b,
                CENTROID_EPISODE_SEED,
                config.max_steps,
                false,
            )
            .map(|r| r.fitness)
        });
        let (f1, f2) = (f1?, f2?);
        let best_sample = scored.fitness.iter().copied().fold(f64::MIN, f64::max);
        let row = CurveRow {
            generation: generation + 1,
            eval_steps,
            fitness_b1: f1,
            fitness_b2: f2,
            combined: f1 + f2,
            best_sample,
        };
        curve.rows.push(row);
        progress(Progress {
            replication: r,
            row,
            behavior_gap: gap_from_fitness(f1, f2),
        });
    }
    Ok(TrainedReplication {
        curve,
        params: state.centroid,
    })
}

pub fn curve_path(out_dir: &Path, r: u64) -> PathBuf {
    out_dir.join(format!("fitness_gen_r{r}.csv"))
}

pub fn params_path(out_dir: &Path, r: u64) -> PathBuf {
    out_dir.join(format!("params_final_r{r}.txt"))
}

pub fn errors_path(out_dir: &Path) -> PathBuf {
    out_dir.join("errors.csv")
}

/// Outcome of [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentReport {
    pub completed: Vec<u64>,
    pub failed: Vec<(u64, Error)>,
    pub curve_files: Vec<PathBuf>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config(_) | Error::Usage(_) | Error::Dimension { .. } => "config",
        Error::Io { .. } | Error::Parse { .. } => "io",
        Error::Numerical(_) => "numerical",
    }
}

fn run_one(config: &RunConfig, r: u64, progress: &(dyn Fn(Progress) + Sync)) -> Result<PathBuf> {
    let trained = train_replication(config, r, progress)?;
    let curve_file = curve_path(&config.out_dir, r);
    trained.curve.write(&curve_file)?;
    write_params(&params_path(&config.out_dir, r), &trained.params)?;
    Ok(curve_file)
}

/// Runs every replication and writes its curve and final parameters to
/// `config.out_dir`. A failing replication is logged to `errors.csv` and
/// does not stop the others.
pub fn run_experiment(
    config: &RunConfig,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<ExperimentReport> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;

    let reps: Vec<u64> = (0..config.replications).collect();
    let results: Vec<(u64, Result<PathBuf>)> = if config.parallel_replications {
        reps.par_iter()
            .map(|&r| (r, run_one(config, r, progress)))
            .collect()
    } else {
        reps.iter()
            .map(|&r| (r, run_one(config, r, progress)))
            .collect()
    };

    let mut report = ExperimentReport {
        completed: Vec::new(),
        failed: Vec::new(),
        curve_files: Vec::new(),
    };
    for (r, res) in results {
        match res {
            Ok(path) => {
                report.completed.push(r);
                report.curve_files.push(path);
            }
            Err(e) => report.failed.push((r, e)),
        }
    }
    let errors_file = errors_path(&config.out_dir);
    if report.failed.is_empty() {
        if errors_file.exists() {
            std::fs::remove_file(&errors_file).map_err(|e| Error::io(&errors_file, e))?;
        }
    } else {
        let mut text = String::from("replication,kind,message\n");
        for (r, e) in &report.failed {
            let msg = e.to_string().replace([',', '\n'], ";");
            writeln!(text, "{r},{},{msg}", error_kind(e)).expect("writing to a String");
        }
        std::fs::write(&errors_file, text).map_err(|e| Error::io(&errors_file, e))?;
    }
    Ok(report)
}
