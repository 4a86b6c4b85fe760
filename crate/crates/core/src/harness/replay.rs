//! Deterministic replay of a saved policy with a trajectory dump.

use std::fmt::Write as _;
use std::path::Path;

use crate::env::{BehaviorCue, EnvKind, Environment, HopperState, WalkerState};
use crate::error::{Error, Result};
use crate::eval::rollout_observed;
use crate::params_file::read_params;
use crate::policy::{param_count, NetworkTopology, ParameterVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub fitness: f64,
    pub steps_used: u64,
    /// Trajectory CSV: `step,x,<y|h>,<yaw|vh>,reward,done`.
    pub trajectory_csv: String,
}

pub fn trajectory_header(env: EnvKind) -> String {
    let [a, b] = match env {
        EnvKind::Hopper => HopperState::TRACE_COLUMNS,
        EnvKind::Walker => WalkerState::TRACE_COLUMNS,
    };
    format!("step,x,{a},{b},reward,done")
}

/// Loads a genome and checks it fits `topology`; a mismatch is a
/// configuration error.
pub fn load_policy(path: &Path, topology: &NetworkTopology) -> Result<ParameterVector> {
    let params = read_params(path)?;
    let expected = param_count(topology)?;
    if params.len() != expected {
        return Err(Error::Config(format!(
            "{} holds {} parameters but the {}-{}-{} {} topology needs {expected}",
            path.display(),
            params.len(),
            topology.n_inputs,
            topology.n_hidden,
            topology.n_outputs,
            if topology.gating { "gated" } else { "standard" },
        )));
    }
    Ok(params)
}

pub fn replay_params(
    params: &ParameterVector,
    topology: &NetworkTopology,
    env: EnvKind,
    behavior: BehaviorCue,
    max_steps: u64,
) -> Result<Replay> {
    let mut csv = trajectory_header(env);
    csv.push('\n');
    let r = rollout_observed(
        params.as_slice(),
        topology,
        env,
        behavior,
        0,
        max_steps,
        false,
        &mut |rec| {
            let [x, a, b] = rec.state;
            writeln!(
                csv,
                "{},{x},{a},{b},{},{}",
                rec.step,
                rec.reward,
                u8::from(rec.done)
            )
            .expect("writing to a String");
        },
    )?;
    Ok(Replay {
        fitness: r.fitness,
        steps_used: r.steps_used,
        trajectory_csv: csv,
    })
}

pub fn replay(
    params_file: &Path,
    topology: &NetworkTopology,
    env: EnvKind,
    behavior: BehaviorCue,
    max_steps: u64,
) -> Result<Replay> {
    let params = load_policy(params_file, topology)?;
    replay_params(&params, topology, env, behavior, max_steps)
}
