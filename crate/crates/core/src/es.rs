//! Evolution strategy with mirrored sampling, centered-rank fitness shaping
//! and an Adam centroid update.
//!
//! One generation is:
//!
//! 1. [`sample_pairs`] draws `n_pairs` standard-normal directions `ε_i`;
//!    candidate `2i` is `θ + σ ε_i` and candidate `2i + 1` is `θ − σ ε_i`.
//! 2. The caller evaluates all `2 n_pairs` candidates.
//! 3. [`centered_ranks`] maps fitnesses to utilities in `[−0.5, 0.5]`.
//! 4. [`estimate_update`] forms `g = Σ (u⁺_i − u⁻_i) ε_i / (n_pairs σ)`, so
//!    the centroid is pulled toward the better member of every pair.
//! 5. [`apply_update`] takes an Adam ascent step with decoupled weight decay.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::policy::ParameterVector;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct EsConfig {
    pub sigma: f64,
    pub learning_rate: f64,
    pub n_pairs: usize,
    pub weight_decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
}

impl Default for EsConfig {
    fn default() -> Self {
        EsConfig {
            sigma: 0.05,
            learning_rate: 0.01,
            n_pairs: 20,
            weight_decay: 0.005,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return fail(format!("sigma must be > 0, got {}", self.sigma));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            ));
        }
        if self.n_pairs < 1 {
            return fail("n_pairs must be >= 1".into());
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return fail(format!(
                "weight_decay must be >= 0, got {}",
                self.weight_decay
            ));
        }
        for (name, beta) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(0.0..1.0).contains(&beta) {
                return fail(format!("{name} must lie in [0, 1), got {beta}"));
            }
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return fail(format!(
                "adam_epsilon must be > 0, got {}",
                self.adam_epsilon
            ));
        }
        Ok(())
    }
}

/// Centroid plus Adam moments.
#[derive(Debug, Clone, PartialEq)]
pub struct EsState {
    pub centroid: ParameterVector,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub generation: u64,
}

impl EsState {
    pub fn new(centroid: ParameterVector) -> Self {
        let n = centroid.len();
        EsState {
            centroid,
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
            step_count: 0,
            generation: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.centroid.len()
    }
}

/// Mirrored perturbations of one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationBatch {
    pub sigma: f64,
    pub epsilons: Vec<Vec<f64>>,
}

impl PerturbationBatch {
    pub fn n_pairs(&self) -> usize {
        self.epsilons.len()
    }

    pub fn n_candidates(&self) -> usize {
        2 * self.epsilons.len()
    }

    /// Candidate `j`: pair `j / 2`, plus sign for even `j`, minus for odd.
    pub fn candidate(&self, centroid: &[f64], j: usize) -> Vec<f64> {
        let eps = &self.epsilons[j / 2];
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        centroid
            .iter()
            .zip(eps)
            .map(|(c, e)| c + sign * self.sigma * e)
            .collect()
    }

    pub fn candidates(&self, centroid: &[f64]) -> Vec<Vec<f64>> {
        (0..self.n_candidates())
            .map(|j| self.candidate(centroid, j))
            .collect()
    }
}

/// Draws the generation's directions from a ChaCha8 stream keyed on
/// `(config.seed, state.generation)`.
pub fn sample_pairs(state: &EsState, config: &EsConfig) -> PerturbationBatch {
    let mut rng = stream_rng(config.seed, Stream::Perturbation, state.generation, 0);
    let dim = state.dim();
    let epsilons = (0..config.n_pairs)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    PerturbationBatch {
        sigma: config.sigma,
        epsilons,
    }
}

/// Centered-rank utilities: the `k`-th smallest value (ties by index) gets
/// `k / (m − 1) − 0.5`. Output is in input order.
pub fn centered_ranks(fitnesses: &[f64]) -> Result<Vec<f64>> {
    let m = fitnesses.len();
    if m < 2 {
        return Err(Error::Usage(format!(
            "centered ranks need at least 2 fitness values, got {m}"
        )));
    }
    if let Some(i) = fitnesses.iter().position(|f| !f.is_finite()) {
        return Err(Error::Numerical(format!(
            "fitness {i} is not finite ({})",
            fitnesses[i]
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    // stable sort keeps equal values in index order
    order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]));
    let denom = (m - 1) as f64;
    let mut utilities = vec![0.0; m];
    for (rank, &idx) in order.iter().enumerate() {
        utilities[idx] = rank as f64 / denom - 0.5;
    }
    Ok(utilities)
}

/// Mirrored-difference gradient estimate `Σ (u⁺_i − u⁻_i) ε_i / (n_pairs σ)`.
pub fn estimate_update(batch: &PerturbationBatch, utilities: &[f64]) -> Result<Vec<f64>> {
    if utilities.len() != batch.n_candidates() {
        return Err(Error::Dimension {
            context: "utilities",
            expected: batch.n_candidates(),
            got: utilities.len(),
        });
    }
    let dim = batch.epsilons.first().map_or(0, Vec::len);
    let mut g = vec![0.0; dim];
    for (eps, u) in batch.epsilons.iter().zip(utilities.chunks_exact(2)) {
        let w = u[0] - u[1];
        if w != 0.0 {
            for (gi, e) in g.iter_mut().zip(eps) {
                *gi += w * e;
            }
        }
    }
    let scale = 1.0 / (batch.n_pairs() as f64 * batch.sigma);
    g.iter_mut().for_each(|gi| *gi *= scale);
    Ok(g)
}

/// Adam ascent step on the centroid with decoupled weight decay.
pub fn apply_update(state: &mut EsState, g: &[f64], config: &EsConfig) -> Result<()> {
    if g.len() != state.dim() {
        return Err(Error::Dimension {
            context: "gradient estimate",
            expected: state.dim(),
            got: g.len(),
        });
    }
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "gradient component {i} is not finite at generation {}",
            state.generation
        )));
    }
    let b1 = config.adam_beta1;
    let b2 = config.adam_beta2;
    let t = (state.step_count + 1) as i32;
    let correction1 = 1.0 - b1.powi(t);
    let correction2 = 1.0 - b2.powi(t);
    let decay = 1.0 - config.learning_rate * config.weight_decay;

    let mut next = state.centroid.as_slice().to_vec();
    let mut m = state.first_moment.clone();
    let mut v = state.second_moment.clone();
    for (((c, gi), mi), vi) in next.iter_mut().zip(g).zip(&mut m).zip(&mut v) {
        *mi = b1 * *mi + (1.0 - b1) * gi;
        *vi = b2 * *vi + (1.0 - b2) * gi * gi;
        let m_hat = *mi / correction1;
        let v_hat = *vi / correction2;
        *c = *c * decay + config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_epsilon);
    }
    let centroid = ParameterVector::new(next).map_err(|_| {
        Error::Numerical(format!(
            "centroid became non-finite at generation {}",
            state.generation
        ))
    })?;
    state.centroid = centroid;
    state.first_moment = m;
    state.second_moment = v;
    state.step_count += 1;
    state.generation += 1;
    Ok(())
}

/// Runs one full generation with a caller-supplied batch evaluator, which
/// receives the candidates in order and returns their fitnesses.
pub fn generation<F>(state: &mut EsState, config: &EsConfig, evaluate: F) -> Result<Vec<f64>>
where
    F: FnOnce(&PerturbationBatch, &[Vec<f64>]) -> Result<Vec<f64>>,
{
    let batch = sample_pairs(state, config);
    let candidates = batch.candidates(state.centroid.as_slice());
    let fitness = evaluate(&batch, &candidates)?;
    let utilities = centered_ranks(&fitness)?;
    let g = estimate_update(&batch, &utilities)?;
    apply_update(state, &g, config)?;
    Ok(fitness)
}
