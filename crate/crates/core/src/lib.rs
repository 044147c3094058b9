//! Bayesian survival analysis of batting scores.
//!
//! A batsman's score in one innings is modelled as a discrete-time survival
//! process: on each run `x` the batsman is dismissed with probability `H(x)`.
//! The hazard moves smoothly from an "arriving at the crease" level to a
//! "set" level, written in terms of effective batting averages
//! `mu(x) = 1 / H(x) - 1`:
//!
//! ```text
//! mu(x) = mu1 + (mu2 - mu1) / (1 + exp(-(x - tau) / ell))
//! ```
//!
//! The crate provides
//!
//! * [`career`]: parsing and validating score files (`42`, `7*` for not-outs),
//! * [`hazard`]: the deterministic hazard, survival, and pmf math,
//! * [`model`]: normalized priors, the censored likelihood, and posteriors for
//!   the varying-hazard and constant-hazard models,
//! * [`sampler`]: a seedable Metropolis-Hastings sampler with summaries,
//!   cross-player probability queries, and effective sample sizes,
//! * [`evidence`]: annealed importance sampling for the marginal likelihood,
//!   a quadrature oracle for the constant model, and Bayes factors,
//! * [`predictive`]: posterior-predictive score distributions and hazards.

pub mod career;
pub mod cli;
pub mod digest;
mod error;
pub mod evidence;
pub mod hazard;
pub mod model;
pub mod predictive;
pub mod quadrature;
pub mod rng;
pub mod sampler;

pub use career::{Career, Innings};
pub use error::{Error, Result};
pub use evidence::{AisConfig, BayesFactor, EvidenceEstimate};
pub use hazard::{ConstantParams, HazardModel, HazardParams};
pub use model::{CareerStats, ModelKind, Params};
pub use predictive::PredictiveDistribution;
pub use sampler::{ChainConfig, PosteriorSamples, PosteriorSummary};
