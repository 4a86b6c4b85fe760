//! Experiment driver: replicated training runs, summaries and replays.

mod config;
mod curve;
mod replay;
mod summary;
mod train;

pub use config::RunConfig;
pub use curve::{CurveRow, FitnessCurve, CURVE_HEADER};
pub use replay::{load_policy, replay, replay_params, trajectory_header, Replay};
pub use summary::{
    curve_files_in, final_fitness, summarize, write_summary, SummaryStats, SUMMARY_HEADER,
};
pub use train::{
    curve_path, errors_path, params_path, run_experiment, train_replication, ExperimentReport,
    Progress, TrainedReplication, CENTROID_EPISODE_SEED,
};
