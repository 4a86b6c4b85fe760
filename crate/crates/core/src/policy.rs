//! Feedforward policies with one hidden layer and optional neuro-regulation.
//!
//! With gating on, the hidden layer of `H` units is split in two halves of
//! `K = H / 2`. The first half is a tanh layer, the second half is a logistic
//! layer whose outputs multiply the first half elementwise. The effective
//! activation of the second half is then forced to exactly `0.0`, so the
//! hidden→output weights leaving it are part of the genome but never reach
//! the motors.
//!
//! Genome layout (all row-major):
//!
//! | block              | length                |
//! |--------------------|-----------------------|
//! | input→hidden       | `n_hidden * n_inputs` |
//! | hidden biases      | `n_hidden`            |
//! | hidden→output      | `n_outputs * n_hidden`|
//! | output biases      | `n_outputs`           |

use std::ops::Range;

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkTopology {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    pub gating: bool,
}

impl NetworkTopology {
    pub fn new(n_inputs: usize, n_hidden: usize, n_outputs: usize, gating: bool) -> Result<Self> {
        let topology = NetworkTopology {
            n_inputs,
            n_hidden,
            n_outputs,
            gating,
        };
        topology.validate()?;
        Ok(topology)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs < 1 || self.n_outputs < 1 {
            return Err(Error::Config(format!(
                "network needs at least one input and one output, got {} and {}",
                self.n_inputs, self.n_outputs
            )));
        }
        if self.n_hidden < 2 {
            return Err(Error::Config(format!(
                "hidden layer needs at least 2 units, got {}",
                self.n_hidden
            )));
        }
        if self.gating && !self.n_hidden.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "gated hidden layer must have an even size, got {}",
                self.n_hidden
            )));
        }
        Ok(())
    }

    /// Number of gating units (zero when gating is off).
    pub fn n_gates(&self) -> usize {
        if self.gating {
            self.n_hidden / 2
        } else {
            0
        }
    }

    pub fn input_weights(&self) -> Range<usize> {
        0..self.n_hidden * self.n_inputs
    }

    pub fn hidden_biases(&self) -> Range<usize> {
        let start = self.input_weights().end;
        start..start + self.n_hidden
    }

    pub fn output_weights(&self) -> Range<usize> {
        let start = self.hidden_biases().end;
        start..start + self.n_outputs * self.n_hidden
    }

    pub fn output_biases(&self) -> Range<usize> {
        let start = self.output_weights().end;
        start..start + self.n_outputs
    }
}

/// Genome length for a topology.
///
/// The gating-half hidden→output weights are counted even though they never
/// influence the action.
pub fn param_count(topology: &NetworkTopology) -> Result<usize> {
    topology.validate()?;
    let NetworkTopology {
        n_inputs: i,
        n_hidden: h,
        n_outputs: o,
        ..
    } = *topology;
    Ok(h * i + h + o * h + o)
}

/// Flat genome of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "parameter {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(ParameterVector(values))
    }

    pub fn zeros(len: usize) -> Self {
        ParameterVector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Checks that the genome length matches `topology`.
    pub fn check(&self, topology: &NetworkTopology) -> Result<()> {
        let expected = param_count(topology)?;
        if self.0.len() != expected {
            return Err(Error::Dimension {
                context: "parameter vector",
                expected,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl AsRef<[f64]> for ParameterVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Gaussian weights with standard deviation `1/sqrt(fan_in)` per layer,
/// zero biases. Deterministic for a given seed.
pub fn init_params(topology: &NetworkTopology, seed: u64) -> Result<ParameterVector> {
    let mut values = vec![0.0; param_count(topology)?];
    let mut rng = stream_rng(seed, Stream::Init, 0, 0);
    let hidden_std = 1.0 / (topology.n_inputs as f64).sqrt();
    let output_std = 1.0 / (topology.n_hidden as f64).sqrt();
    let hidden = Normal::new(0.0, hidden_std).expect("positive std");
    let output = Normal::new(0.0, output_std).expect("positive std");
    for w in &mut values[topology.input_weights()] {
        *w = hidden.sample(&mut rng);
    }
    for w in &mut values[topology.output_weights()] {
        *w = output.sample(&mut rng);
    }
    Ok(ParameterVector(values))
}

/// Per-step gate activations of a gated policy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateTrace {
    steps: Vec<Vec<f64>>,
}

impl GateTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, gates: Vec<f64>) {
        self.steps.push(gates);
    }

    pub fn steps(&self) -> &[Vec<f64>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn check_inputs(params: &[f64], topology: &NetworkTopology, obs: &[f64]) -> Result<()> {
    let expected = param_count(topology)?;
    if params.len() != expected {
        return Err(Error::Dimension {
            context: "parameter vector",
            expected,
            got: params.len(),
        });
    }
    if obs.len() != topology.n_inputs {
        return Err(Error::Dimension {
            context: "observation",
            expected: topology.n_inputs,
            got: obs.len(),
        });
    }
    Ok(())
}

fn hidden_preactivation(params: &[f64], topology: &NetworkTopology, obs: &[f64]) -> Vec<f64> {
    let w = &params[topology.input_weights()];
    let b = &params[topology.hidden_biases()];
    w.chunks_exact(topology.n_inputs)
        .zip(b)
        .map(|(row, bias)| bias + dot(row, obs))
        .collect()
}

fn output_layer(params: &[f64], topology: &NetworkTopology, hidden: &[f64]) -> Vec<f64> {
    let w = &params[topology.output_weights()];
    let b = &params[topology.output_biases()];
    w.chunks_exact(topology.n_hidden)
        .zip(b)
        .map(|(row, bias)| (bias + dot(row, hidden)).tanh())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain tanh network: `tanh(W_out · tanh(W_in · obs + b_h) + b_out)`.
pub fn forward_standard(
    params: &[f64],
    topology: &NetworkTopology,
    obs: &[f64],
) -> Result<Vec<f64>> {
    if topology.gating {
        return Err(Error::Usage(
            "forward_standard called on a gated topology".into(),
        ));
    }
    check_inputs(params, topology, obs)?;
    let mut hidden = hidden_preactivation(params, topology, obs);
    hidden.iter_mut().for_each(|z| *z = z.tanh());
    Ok(output_layer(params, topology, &hidden))
}

/// Gated network. The first half of the hidden layer is modulated by the
/// logistic second half, which is then silenced. When `trace` is given the
/// gate values of this step are appended to it.
pub fn forward_gated(
    params: &[f64],
    topology: &NetworkTopology,
    obs: &[f64],
    trace: Option<&mut GateTrace>,
) -> Result<Vec<f64>> {
    if !topology.gating {
        return Err(Error::Usage(
            "forward_gated called on a topology without gating".into(),
        ));
    }
    check_inputs(params, topology, obs)?;
    let k = topology.n_gates();
    let z = hidden_preactivation(params, topology, obs);
    let gates: Vec<f64> = z[k..].iter().map(|&v| logistic(v)).collect();
    let mut effective = vec![0.0; topology.n_hidden];
    for ((e, &zt), &g) in effective[..k].iter_mut().zip(&z[..k]).zip(&gates) {
        *e = zt.tanh() * g;
    }
    let action = output_layer(params, topology, &effective);
    if let Some(trace) = trace {
        trace.push(gates);
    }
    Ok(action)
}

/// Dispatches to the standard or gated forward pass.
pub fn act(
    params: &[f64],
    topology: &NetworkTopology,
    obs: &[f64],
    trace: Option<&mut GateTrace>,
) -> Result<Vec<f64>> {
    if topology.gating {
        forward_gated(params, topology, obs, trace)
    } else {
        forward_standard(params, topology, obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn topo(i: usize, h: usize, o: usize, gating: bool) -> NetworkTopology {
        NetworkTopology::new(i, h, o, gating).unwrap()
    }

    #[test]
    fn param_counts() {
        assert_eq!(param_count(&topo(17, 50, 3, true)).unwrap(), 1053);
        assert_eq!(param_count(&topo(30, 100, 8, true)).unwrap(), 3908);
        assert_eq!(param_count(&topo(1, 2, 1, true)).unwrap(), 7);
    }

    #[test]
    fn rejects_bad_topologies() {
        assert!(matches!(
            NetworkTopology::new(4, 5, 2, true),
            Err(Error::Config(_))
        ));
        assert!(NetworkTopology::new(4, 5, 2, false).is_ok());
        assert!(NetworkTopology::new(0, 4, 2, false).is_err());
        assert!(NetworkTopology::new(4, 1, 2, false).is_err());
        assert!(NetworkTopology::new(4, 4, 0, false).is_err());
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let t = topo(17, 16, 3, true);
        let a = init_params(&t, 42).unwrap();
        let b = init_params(&t, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, init_params(&t, 43).unwrap());
        assert!(a.as_slice()[t.hidden_biases()].iter().all(|&v| v == 0.0));
        assert!(a.as_slice()[t.output_biases()].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn init_input_weight_std() {
        let t = topo(100, 1000, 1, false);
        let p = init_params(&t, 9).unwrap();
        let w = &p.as_slice()[t.input_weights()];
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 0.1).abs() <= 0.01, "std = {}", var.sqrt());
    }

    #[test]
    fn zero_params_give_zero_action() {
        let t = topo(5, 4, 3, false);
        let p = vec![0.0; param_count(&t).unwrap()];
        let a = forward_standard(&p, &t, &[1.0, -2.0, 3.0, 0.5, 9.0]).unwrap();
        assert_eq!(a, vec![0.0; 3]);
    }

    #[test]
    fn symmetric_hand_built_net() {
        let t = topo(1, 2, 1, false);
        // w_in = [[1], [-1]], b_h = 0, w_out = [[1, 1]], b_out = 0
        let p = [1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let a = forward_standard(&p, &t, &[1.0]).unwrap();
        assert_eq!(a, vec![0.0]);
    }

    #[test]
    fn forward_is_pure() {
        let t = topo(6, 8, 2, true);
        let p = init_params(&t, 1).unwrap();
        let obs = [0.3, -0.2, 1.0, 5.0, 0.0, 2.0];
        let a = forward_gated(p.as_slice(), &t, &obs, None).unwrap();
        let b = forward_gated(p.as_slice(), &t, &obs, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_forward_for_topology_is_usage_error() {
        let gated = topo(2, 4, 1, true);
        let plain = topo(2, 4, 1, false);
        let p = vec![0.0; param_count(&gated).unwrap()];
        assert!(matches!(
            forward_standard(&p, &gated, &[0.0, 0.0]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            forward_gated(&p, &plain, &[0.0, 0.0], None),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            forward_standard(&p, &plain, &[0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn gated_zero_params() {
        let t = topo(3, 4, 2, true);
        let p = vec![0.0; param_count(&t).unwrap()];
        let mut trace = GateTrace::new();
        let a = forward_gated(&p, &t, &[1.0, 2.0, 3.0], Some(&mut trace)).unwrap();
        assert_eq!(a, vec![0.0, 0.0]);
        assert_eq!(trace.steps(), &[vec![0.5, 0.5]]);
    }

    #[test]
    fn gate_closed_limit() {
        let t = topo(4, 6, 3, true);
        let mut p = init_params(&t, 5).unwrap().into_vec();
        let b = t.hidden_biases();
        for v in &mut p[b.start + 3..b.end] {
            *v = -1000.0;
        }
        for (j, v) in p[t.output_biases()].iter_mut().enumerate() {
            *v = 0.1 * j as f64 - 0.2;
        }
        let expected: Vec<f64> = p[t.output_biases()].iter().map(|b| b.tanh()).collect();
        for obs in [[0.0; 4], [1.0, -3.0, 5.0, 0.0], [5.0, 5.0, -5.0, 2.0]] {
            let a = forward_gated(&p, &t, &obs, None).unwrap();
            for (x, y) in a.iter().zip(&expected) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn gate_values_in_unit_interval(
            seed in any::<u64>(),
            obs in prop::collection::vec(-10.0f64..10.0, 5),
            scale in 0.1f64..50.0,
        ) {
            let t = topo(5, 8, 2, true);
            let mut p = init_params(&t, seed).unwrap().into_vec();
            p.iter_mut().for_each(|v| *v *= scale);
            let mut trace = GateTrace::new();
            forward_gated(&p, &t, &obs, Some(&mut trace)).unwrap();
            prop_assert_eq!(trace.len(), 1);
            prop_assert!(trace.steps()[0].iter().all(|g| (0.0..=1.0).contains(g)));
        }

        #[test]
        fn gating_half_output_weights_are_dead(
            seed in any::<u64>(),
            obs in prop::collection::vec(-5.0f64..5.0, 5),
            noise in prop::collection::vec(-100.0f64..100.0, 2 * 4),
        ) {
            let t = topo(5, 8, 2, true);
            let p = init_params(&t, seed).unwrap().into_vec();
            let mut q = p.clone();
            let w = t.output_weights();
            for (row, chunk) in q[w].chunks_exact_mut(8).enumerate() {
                for (c, v) in chunk[4..].iter_mut().enumerate() {
                    *v += noise[row * 4 + c];
                }
            }
            let a = forward_gated(&p, &t, &obs, None).unwrap();
            let b = forward_gated(&q, &t, &obs, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
