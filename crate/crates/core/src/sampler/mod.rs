//! Metropolis-Hastings posterior sampling.
//!
//! The chain proposes on log-parameters: each step picks one component
//! uniformly at random and perturbs its logarithm with a Gaussian. Because the
//! walk is in log space every proposal stays positive, and the acceptance
//! ratio carries the Jacobian `theta' / theta` of the transform. Step sizes can
//! adapt during burn-in (Robbins-Monro toward 0.44 acceptance per component)
//! and are frozen afterwards.

mod ess;
mod io;
mod query;
mod summary;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::career::Career;
use crate::error::{Error, Result};
use crate::model::{log_prior_values, CareerStats, ModelKind, Params};
use crate::rng;

pub use ess::effective_sample_size;
pub use io::SampleMetadata;
pub use query::{probability_query, NamedQuery, Pairing, Predicate, QueryResult};
pub use summary::{summarize, PosteriorSummary};

/// Per-component acceptance rate targeted by burn-in adaptation.
pub const TARGET_ACCEPTANCE: f64 = 0.44;

const MIN_LOG_STEP: f64 = -9.2; // ~1e-4
const MAX_LOG_STEP: f64 = 2.3; // ~10

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    iterations: u64,
    burn_in: u64,
    thin: u64,
    seed: u64,
    step_sizes: [f64; 4],
    adapt_during_burn_in: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            iterations: 200_000,
            burn_in: 20_000,
            thin: 10,
            seed: 0,
            step_sizes: [0.5; 4],
            adapt_during_burn_in: true,
        }
    }
}

impl ChainConfig {
    pub fn new(iterations: u64, burn_in: u64, thin: u64, seed: u64) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be positive".into()));
        }
        if burn_in >= iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in ({burn_in}) must be smaller than iterations ({iterations})"
            )));
        }
        if thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        Ok(ChainConfig {
            iterations,
            burn_in,
            thin,
            seed,
            ..ChainConfig::default()
        })
    }

    /// Log-space proposal scales, one per component. The constant model uses
    /// the first.
    pub fn with_step_sizes(mut self, step_sizes: [f64; 4]) -> Result<Self> {
        if let Some(bad) = step_sizes.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "step sizes must be positive, got {bad}"
            )));
        }
        self.step_sizes = step_sizes;
        Ok(self)
    }

    pub fn with_adaptation(mut self, adapt: bool) -> Self {
        self.adapt_during_burn_in = adapt;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn burn_in(&self) -> u64 {
        self.burn_in
    }

    pub fn thin(&self) -> u64 {
        self.thin
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_sizes(&self) -> [f64; 4] {
        self.step_sizes
    }

    pub fn adapt_during_burn_in(&self) -> bool {
        self.adapt_during_burn_in
    }

    /// Draws kept after burn-in and thinning.
    pub fn retained_draws(&self) -> u64 {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

/// Retained draws of one chain, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    kind: ModelKind,
    values: Vec<f64>,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub metadata: SampleMetadata,
}

impl PosteriorSamples {
    /// Wraps precomputed draws. Every component must be positive.
    pub fn from_draws(kind: ModelKind, draws: &[Vec<f64>], seed: u64) -> Result<Self> {
        let mut values = Vec::with_capacity(draws.len() * kind.dim());
        for d in draws {
            Params::from_values(kind, d)?;
            values.extend_from_slice(d);
        }
        Ok(PosteriorSamples {
            kind,
            values,
            acceptance_rate: f64::NAN,
            seed,
            metadata: SampleMetadata::default(),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim())
    }

    pub fn draw(&self, i: usize) -> Params {
        let d = self.dim();
        Params::from_values_unchecked(self.kind, &self.values[i * d..(i + 1) * d])
    }

    pub fn params(&self) -> impl ExactSizeIterator<Item = Params> + '_ {
        self.rows().map(move |r| Params::from_values_unchecked(self.kind, r))
    }

    pub fn column(&self, component: usize) -> Vec<f64> {
        self.rows().map(|r| r[component]).collect()
    }
}

/// Current point of a chain together with its cached log densities.
#[derive(Debug, Clone)]
pub(crate) struct ChainState {
    pub values: [f64; 4],
    pub log_prior: f64,
    pub log_lik: f64,
}

impl ChainState {
    pub fn new(kind: ModelKind, values: &[f64], stats: &CareerStats) -> Self {
        let mut v = [0.0; 4];
        v[..values.len()].copy_from_slice(values);
        let log_prior = log_prior_values(kind, values);
        let log_lik = stats.log_likelihood(&Params::from_values_unchecked(kind, values));
        ChainState {
            values: v,
            log_prior,
            log_lik,
        }
    }
}

/// One component-wise log-space random-walk update targeting
/// `prior * likelihood^beta`. Returns the updated component and whether the
/// move was accepted.
pub(crate) fn mh_step<R: Rng + ?Sized>(
    state: &mut ChainState,
    kind: ModelKind,
    stats: &CareerStats,
    beta: f64,
    step_sizes: &[f64],
    rng: &mut R,
) -> (usize, bool) {
    let dim = kind.dim();
    let j = if dim == 1 { 0 } else { rng.gen_range(0..dim) };
    let z: f64 = rng.sample(StandardNormal);
    let old = state.values[j];
    let log_new = old.ln() + step_sizes[j] * z;
    let new = log_new.exp();
    if !(new > 0.0 && new.is_finite()) {
        return (j, false);
    }
    let mut proposal = state.values;
    proposal[j] = new;
    let log_prior = log_prior_values(kind, &proposal[..dim]);
    if log_prior == f64::NEG_INFINITY {
        return (j, false);
    }
    let log_lik = stats.log_likelihood(&Params::from_values_unchecked(kind, &proposal[..dim]));
    let log_ratio = (log_prior + beta * log_lik) - (state.log_prior + beta * state.log_lik)
        + (log_new - old.ln());
    let accept = log_ratio >= 0.0 || rng.gen::<f64>().ln() < log_ratio;
    if accept {
        state.values = proposal;
        state.log_prior = log_prior;
        state.log_lik = log_lik;
    }
    (j, accept)
}

/// Runs one chain and returns its retained draws. Output is a pure function
/// of `(career, kind, config)`.
pub fn run_chain(career: &Career, kind: ModelKind, config: &ChainConfig) -> PosteriorSamples {
    let stats = CareerStats::new(career);
    let dim = kind.dim();
    let mut rng = rng::stream(config.seed);
    let mut state = ChainState::new(kind, kind.initial_values(), &stats);
    let mut log_steps: Vec<f64> = config.step_sizes[..dim].iter().map(|s| s.ln()).collect();
    let mut steps: Vec<f64> = config.step_sizes[..dim].to_vec();
    let mut proposals_per_component = vec![0u64; dim];

    let mut values = Vec::with_capacity(config.retained_draws() as usize * dim);
    let mut accepted = 0u64;
    for it in 0..config.iterations {
        let (j, acc) = mh_step(&mut state, kind, &stats, 1.0, &steps, &mut rng);
        if it < config.burn_in {
            if config.adapt_during_burn_in {
                proposals_per_component[j] += 1;
                let gain = (proposals_per_component[j] as f64).powf(-0.6);
                let target = if acc { 1.0 } else { 0.0 } - TARGET_ACCEPTANCE;
                log_steps[j] = (log_steps[j] + gain * target).clamp(MIN_LOG_STEP, MAX_LOG_STEP);
                steps[j] = log_steps[j].exp();
            }
            continue;
        }
        accepted += u64::from(acc);
        if (it - config.burn_in).is_multiple_of(config.thin) {
            values.extend_from_slice(&state.values[..dim]);
        }
    }
    let post = config.iterations - config.burn_in;
    PosteriorSamples {
        kind,
        values,
        acceptance_rate: accepted as f64 / post as f64,
        seed: config.seed,
        metadata: SampleMetadata {
            player: career.player_id.clone(),
            max_observed_score: career.max_runs(),
            config: Some(config.clone()),
            final_step_sizes: Some(steps),
        },
    }
}
