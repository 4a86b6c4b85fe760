//! Episode rollouts and the three ways of assigning behaviors to the
//! candidates of a generation.
//!
//! * `Naive`: every candidate draws its own behavior, so the two members of
//!   a mirrored pair are often scored on different tasks.
//! * `TwoEpisode`: every candidate runs one B1 episode and one B2 episode
//!   and is scored on their sum.
//! * `PairedBehavior`: one behavior is drawn per mirrored pair and shared
//!   by both members.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::env::{BehaviorCue, EnvKind, Environment, HopperState, WalkerState};
use crate::error::{Error, Result};
use crate::policy::{act, param_count, GateTrace, NetworkTopology};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvaluationStrategy {
    Naive,
    TwoEpisode,
    PairedBehavior,
}

impl EvaluationStrategy {
    pub fn episodes_per_candidate(self) -> usize {
        match self {
            EvaluationStrategy::TwoEpisode => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvaluationStrategy::Naive => "naive",
            EvaluationStrategy::TwoEpisode => "episodes",
            EvaluationStrategy::PairedBehavior => "paired",
        }
    }
}

impl fmt::Display for EvaluationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvaluationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(EvaluationStrategy::Naive),
            "episodes" | "two-episode" | "two_episode" => Ok(EvaluationStrategy::TwoEpisode),
            "paired" | "paired-behavior" | "paired_behavior" => {
                Ok(EvaluationStrategy::PairedBehavior)
            }
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

/// One episode a candidate has to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub episode_seed: u64,
    pub behavior: BehaviorCue,
}

/// Episode assignments for every candidate of one generation, in candidate
/// order (pair `i` owns candidates `2i` and `2i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPlan {
    pub strategy: EvaluationStrategy,
    pub entries: Vec<Vec<Assignment>>,
}

impl EvaluationPlan {
    pub fn n_candidates(&self) -> usize {
        self.entries.len()
    }

    pub fn total_episodes(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }
}

fn draw_behavior<R: Rng>(rng: &mut R) -> BehaviorCue {
    if rng.random_bool(0.5) {
        BehaviorCue::B1
    } else {
        BehaviorCue::B2
    }
}

pub fn build_plan(
    strategy: EvaluationStrategy,
    generation: u64,
    run_seed: u64,
    n_pairs: usize,
) -> EvaluationPlan {
    let mut rng = stream_rng(run_seed, Stream::Plan, generation, 0);
    let mut entries = Vec::with_capacity(2 * n_pairs);
    match strategy {
        EvaluationStrategy::Naive => {
            for _ in 0..2 * n_pairs {
                let episode_seed = rng.random();
                let behavior = draw_behavior(&mut rng);
                entries.push(vec![Assignment {
                    episode_seed,
                    behavior,
                }]);
            }
        }
        EvaluationStrategy::TwoEpisode => {
            for _ in 0..n_pairs {
                let episodes = vec![
                    Assignment {
                        episode_seed: rng.random(),
                        behavior: BehaviorCue::B1,
                    },
                    Assignment {
                        episode_seed: rng.random(),
                        behavior: BehaviorCue::B2,
                    },
                ];
                entries.push(episodes.clone());
                entries.push(episodes);
            }
        }
        EvaluationStrategy::PairedBehavior => {
            for _ in 0..n_pairs {
                let episode_seed = rng.random();
                let behavior = draw_behavior(&mut rng);
                let shared = vec![Assignment {
                    episode_seed,
                    behavior,
                }];
                entries.push(shared.clone());
                entries.push(shared);
            }
        }
    }
    EvaluationPlan { strategy, entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub fitness: f64,
    pub steps_used: u64,
    pub trace: Option<GateTrace>,
}

/// Per-step record passed to rollout observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub state: [f64; 3],
    pub reward: f64,
    pub done: bool,
}

fn check_topology(topology: &NetworkTopology, env: EnvKind) -> Result<()> {
    if topology.n_inputs != env.obs_dim() {
        return Err(Error::Dimension {
            context: "network inputs vs observation",
            expected: env.obs_dim(),
            got: topology.n_inputs,
        });
    }
    if topology.n_outputs != env.action_dim() {
        return Err(Error::Dimension {
            context: "network outputs vs action",
            expected: env.action_dim(),
            got: topology.n_outputs,
        });
    }
    Ok(())
}

fn run_episode<E: Environment>(
    params: &[f64],
    topology: &NetworkTopology,
    behavior: BehaviorCue,
    episode_seed: u64,
    max_steps: u64,
    mut trace: Option<&mut GateTrace>,
    observer: &mut dyn FnMut(StepRecord),
) -> Result<(f64, u64)> {
    let mut env = E::reset(episode_seed);
    let mut obs = env.observe(behavior);
    let mut total = 0.0;
    let mut steps = 0;
    while steps < max_steps {
        let action = act(params, topology, &obs, trace.as_deref_mut())?;
        let out = env.step(&action, behavior)?;
        steps += 1;
        total += out.reward;
        if !total.is_finite() {
            return Err(Error::Numerical(format!(
                "episode return became non-finite at step {steps}"
            )));
        }
        let done = out.done || steps == max_steps;
        observer(StepRecord {
            step: steps,
            state: env.trace_state(),
            reward: out.reward,
            done,
        });
        if out.done {
            break;
        }
        obs = out.observation;
    }
    Ok((total, steps))
}

/// Runs one episode and reports every step to `observer`.
#[allow(clippy::too_many_arguments)]
pub fn rollout_observed(
    params: &[f64],
    topology: &NetworkTopology,
    env: EnvKind,
    behavior: BehaviorCue,
    episode_seed: u64,
    max_steps: u64,
    trace: bool,
    observer: &mut dyn FnMut(StepRecord),
) -> Result<Rollout> {
    if max_steps < 1 {
        return Err(Error::Config("max_steps must be >= 1".into()));
    }
    check_topology(topology, env)?;
    let expected = param_count(topology)?;
    if params.len() != expected {
        return Err(Error::Dimension {
            context: "parameter vector",
            expected,
            got: params.len(),
        });
    }
    let mut gate_trace = (trace && topology.gating).then(GateTrace::new);
    let (fitness, steps_used) = match env {
        EnvKind::Hopper => run_episode::<HopperState>(
            params,
            topology,
            behavior,
            episode_seed,
            max_steps,
            gate_trace.as_mut(),
            observer,
        )?,
        EnvKind::Walker => run_episode::<WalkerState>(
            params,
            topology,
            behavior,
            episode_seed,
            max_steps,
            gate_trace.as_mut(),
            observer,
        )?,
    };
    Ok(Rollout {
        fitness,
        steps_used,
        trace: gate_trace,
    })
}

/// Total reward of one episode, stopped by termination or `max_steps`.
pub fn rollout(
    params: &[f64],
    topology: &NetworkTopology,
    env: EnvKind,
    behavior: BehaviorCue,
    episode_seed: u64,
    max_steps: u64,
    trace: bool,
) -> Result<Rollout> {
    rollout_observed(
        params,
        topology,
        env,
        behavior,
        episode_seed,
        max_steps,
        trace,
        &mut |_| {},
    )
}

/// Fitness of every candidate of one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationFitness {
    pub fitness: Vec<f64>,
    /// Environment steps consumed per candidate.
    pub steps: Vec<u64>,
    /// Candidates whose evaluation hit a numerical failure.
    pub failed: Vec<usize>,
}

impl GenerationFitness {
    pub fn total_steps(&self) -> u64 {
        self.steps.iter().sum()
    }
}

fn evaluate_candidate(
    params: &[f64],
    assignments: &[Assignment],
    env: EnvKind,
    topology: &NetworkTopology,
    max_steps: u64,
) -> Result<(f64, u64)> {
    let mut fitness = 0.0;
    let mut steps = 0;
    for a in assignments {
        let r = rollout(
            params,
            topology,
            env,
            a.behavior,
            a.episode_seed,
            max_steps,
            false,
        )?;
        fitness += r.fitness;
        steps += r.steps_used;
    }
    Ok((fitness, steps))
}

/// Scores all candidates in parallel. A candidate that fails numerically
/// gets the lowest finite fitness of the generation; any other error
/// aborts the evaluation.
pub fn evaluate_generation(
    candidates: &[Vec<f64>],
    plan: &EvaluationPlan,
    env: EnvKind,
    topology: &NetworkTopology,
    max_steps: u64,
) -> Result<GenerationFitness> {
    if candidates.len() != plan.n_candidates() {
        return Err(Error::Dimension {
            context: "evaluation plan",
            expected: candidates.len(),
            got: plan.n_candidates(),
        });
    }
    let results: Vec<Result<(f64, u64)>> = candidates
        .par_iter()
        .zip(plan.entries.par_iter())
        .map(|(params, assignments)| {
            evaluate_candidate(params, assignments, env, topology, max_steps)
        })
        .collect();

    let mut fitness = Vec::with_capacity(results.len());
    let mut steps = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for (j, r) in results.into_iter().enumerate() {
        match r {
            Ok((f, s)) => {
                fitness.push(f);
                steps.push(s);
            }
            Err(Error::Numerical(_)) => {
                failed.push(j);
                fitness.push(f64::NAN);
                steps.push(0);
            }
            Err(e) => return Err(e),
        }
    }
    if !failed.is_empty() {
        let floor = fitness
            .iter()
            .copied()
            .filter(|f| f.is_finite())
            .reduce(f64::min)
            .ok_or_else(|| Error::Numerical("every candidate of the generation failed".into()))?;
        for &j in &failed {
            fitness[j] = floor;
        }
    }
    Ok(GenerationFitness {
        fitness,
        steps,
        failed,
    })
}

/// `|f1 − f2| / max(|f1|, |f2|, 1e-9)`, clamped to `[0, 1]`.
pub fn gap_from_fitness(f1: f64, f2: f64) -> f64 {
    let scale = f1.abs().max(f2.abs()).max(1e-9);
    ((f1 - f2).abs() / scale).clamp(0.0, 1.0)
}

/// How unevenly a policy masters the two behaviors: 0 for equal returns,
/// 1 when one behavior has collapsed.
pub fn behavior_gap(
    params: &[f64],
    topology: &NetworkTopology,
    env: EnvKind,
    episode_seed: u64,
    max_steps: u64,
) -> Result<f64> {
    let f1 = rollout(
        params,
        topology,
        env,
        BehaviorCue::B1,
        episode_seed,
        max_steps,
        false,
    )?;
    let f2 = rollout(
        params,
        topology,
        env,
        BehaviorCue::B2,
        episode_seed,
        max_steps,
        false,
    )?;
    Ok(gap_from_fitness(f1.fitness, f2.fitness))
}
