//! Per-neuron gate usage under the two behavior cues.
//!
//! For gate `j`, `ḡ_j(b)` is its mean activation over all steps of the
//! episodes run under cue `b`. The specialization index of the neuron is
//! `|ḡ_j(B1) − ḡ_j(B2)|` and the aggregate index is the mean over neurons.

use std::fmt::Write as _;

use crate::env::{BehaviorCue, EnvKind};
use crate::error::{Error, Result};
use crate::eval::rollout;
use crate::policy::{GateTrace, NetworkTopology};

#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationReport {
    pub mean_gate_b1: Vec<f64>,
    pub mean_gate_b2: Vec<f64>,
    pub index: Vec<f64>,
    pub aggregate: f64,
}

fn mean_gates<'a>(traces: impl IntoIterator<Item = &'a GateTrace>, n_gates: usize) -> Vec<f64> {
    let mut sum = vec![0.0; n_gates];
    let mut count = 0usize;
    for trace in traces {
        for step in trace.steps() {
            for (s, g) in sum.iter_mut().zip(step) {
                *s += g;
            }
            count += 1;
        }
    }
    if count > 0 {
        sum.iter_mut().for_each(|s| *s /= count as f64);
    }
    sum
}

impl SpecializationReport {
    /// Builds a report from gate traces recorded under each cue.
    pub fn from_traces(b1: &[GateTrace], b2: &[GateTrace], n_gates: usize) -> Self {
        let mean_gate_b1 = mean_gates(b1, n_gates);
        let mean_gate_b2 = mean_gates(b2, n_gates);
        let index: Vec<f64> = mean_gate_b1
            .iter()
            .zip(&mean_gate_b2)
            .map(|(a, b)| (a - b).abs().min(1.0))
            .collect();
        let aggregate = if index.is_empty() {
            0.0
        } else {
            index.iter().sum::<f64>() / index.len() as f64
        };
        SpecializationReport {
            mean_gate_b1,
            mean_gate_b2,
            index,
            aggregate,
        }
    }

    /// `neuron_index,mean_gate_b1,mean_gate_b2,index` rows followed by an
    /// `aggregate` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("neuron_index,mean_gate_b1,mean_gate_b2,index\n");
        for (j, ((a, b), s)) in self
            .mean_gate_b1
            .iter()
            .zip(&self.mean_gate_b2)
            .zip(&self.index)
            .enumerate()
        {
            writeln!(out, "{j},{a},{b},{s}").expect("writing to a String");
        }
        writeln!(out, "aggregate,,,{}", self.aggregate).expect("writing to a String");
        out
    }
}

pub fn specialization_report(
    params: &[f64],
    topology: &NetworkTopology,
    env: EnvKind,
    episode_seeds: &[u64],
    max_steps: u64,
) -> Result<SpecializationReport> {
    if !topology.gating {
        return Err(Error::Usage(
            "specialization report needs a gated topology".into(),
        ));
    }
    if episode_seeds.is_empty() {
        return Err(Error::Usage("at least one episode seed is required".into()));
    }
    let mut traces: [Vec<GateTrace>; 2] = [Vec::new(), Vec::new()];
    for behavior in BehaviorCue::ALL {
        for &seed in episode_seeds {
            let r = rollout(params, topology, env, behavior, seed, max_steps, true)?;
            traces[behavior.index()].push(r.trace.unwrap_or_default());
        }
    }
    Ok(SpecializationReport::from_traces(
        &traces[0],
        &traces[1],
        topology.n_gates(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::param_count;

    fn trace(steps: &[&[f64]]) -> GateTrace {
        let mut t = GateTrace::new();
        for s in steps {
            t.push(s.to_vec());
        }
        t
    }

    #[test]
    fn identical_traces_have_zero_index() {
        let t = trace(&[&[0.2, 0.9], &[0.4, 0.1]]);
        let r = SpecializationReport::from_traces(
            std::slice::from_ref(&t),
            std::slice::from_ref(&t),
            2,
        );
        assert_eq!(r.index, vec![0.0, 0.0]);
        assert_eq!(r.aggregate, 0.0);
    }

    #[test]
    fn extreme_specialization() {
        let b1 = trace(&[&[1.0, 0.5], &[1.0, 0.5]]);
        let b2 = trace(&[&[0.0, 0.5]]);
        let r = SpecializationReport::from_traces(&[b1], &[b2], 2);
        assert_eq!(r.index, vec![1.0, 0.0]);
        assert_eq!(r.aggregate, 0.5);
    }

    #[test]
    fn csv_layout() {
        let r = SpecializationReport {
            mean_gate_b1: vec![1.0, 0.25],
            mean_gate_b2: vec![0.0, 0.5],
            index: vec![1.0, 0.25],
            aggregate: 0.625,
        };
        assert_eq!(
            r.to_csv(),
            "neuron_index,mean_gate_b1,mean_gate_b2,index\n0,1,0,1\n1,0.25,0.5,0.25\naggregate,,,0.625\n"
        );
    }

    #[test]
    fn needs_gating() {
        let t = NetworkTopology::new(17, 4, 3, false).unwrap();
        let p = vec![0.0; param_count(&t).unwrap()];
        assert!(matches!(
            specialization_report(&p, &t, EnvKind::Hopper, &[0], 10),
            Err(Error::Usage(_))
        ));
    }
}
