//! Marginal likelihood (evidence) estimates and Bayes factors.
//!
//! The varying-hazard evidence `Z` is estimated by annealed importance
//! sampling: each run draws from the prior, then walks through tempered
//! targets `prior * likelihood^beta` with `beta` rising from 0 to 1, summing
//! `(beta_t - beta_{t-1}) * log L` along the way. The mean of the run weights
//! is an unbiased estimate of `Z`.
//!
//! The constant-hazard evidence `Z0` is a one-dimensional integral and is
//! computed by quadrature unless AIS is requested explicitly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use rayon::prelude::*;

use crate::career::Career;
use crate::digest::config_digest;
use crate::error::{Error, Result};
use crate::hazard::ConstantParams;
use crate::model::{log_prior_constant, sample_prior, CareerStats, ModelKind, Params};
use crate::quadrature::{adaptive_simpson, gauss_kronrod};
use crate::rng;
use crate::sampler::{mh_step, ChainState};

/// Log-space proposal scales at `beta = 0`, tuned by sweeping the
/// run-to-run variance of AIS weights on synthetic careers.
pub const PRIOR_STEP_SIZES: [f64; 4] = [1.5, 1.5, 2.5, 2.5];

/// Default `I` in the step schedule `base / sqrt(1 + beta * I)`.
pub const DEFAULT_INFORMATION_FACTOR: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct AisConfig {
    num_runs: usize,
    num_temperatures: usize,
    schedule_exponent: f64,
    mh_steps_per_temperature: usize,
    seed: u64,
    base_step_sizes: [f64; 4],
    information_factor: f64,
}

impl Default for AisConfig {
    fn default() -> Self {
        AisConfig {
            num_runs: 100,
            num_temperatures: 1000,
            schedule_exponent: 4.0,
            mh_steps_per_temperature: 3,
            seed: 0,
            base_step_sizes: PRIOR_STEP_SIZES,
            information_factor: DEFAULT_INFORMATION_FACTOR,
        }
    }
}

impl AisConfig {
    pub fn new(
        num_runs: usize,
        num_temperatures: usize,
        schedule_exponent: f64,
        mh_steps_per_temperature: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_runs < 2 {
            return Err(Error::InvalidConfig(
                "AIS needs at least 2 runs for a standard error".into(),
            ));
        }
        if num_temperatures < 2 {
            return Err(Error::InvalidConfig(
                "AIS needs at least 2 temperatures".into(),
            ));
        }
        if !(schedule_exponent > 0.0 && schedule_exponent.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "schedule exponent must be positive, got {schedule_exponent}"
            )));
        }
        if mh_steps_per_temperature == 0 {
            return Err(Error::InvalidConfig(
                "at least one MH step per temperature is required".into(),
            ));
        }
        Ok(AisConfig {
            num_runs,
            num_temperatures,
            schedule_exponent,
            mh_steps_per_temperature,
            seed,
            ..AisConfig::default()
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Scale `I` in the per-temperature step size `base / sqrt(1 + beta * I)`.
    /// Defaults to [`DEFAULT_INFORMATION_FACTOR`].
    pub fn with_information_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "information factor must be non-negative, got {factor}"
            )));
        }
        self.information_factor = factor;
        Ok(self)
    }

    pub fn with_base_step_sizes(mut self, steps: [f64; 4]) -> Result<Self> {
        if steps.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidConfig("step sizes must be positive".into()));
        }
        self.base_step_sizes = steps;
        Ok(self)
    }

    pub fn num_runs(&self) -> usize {
        self.num_runs
    }

    pub fn num_temperatures(&self) -> usize {
        self.num_temperatures
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Inverse temperature at step `t` of `0..num_temperatures`: 0 at the
    /// first step, exactly 1 at the last.
    pub fn beta(&self, t: usize) -> f64 {
        let last = self.num_temperatures - 1;
        if t >= last {
            1.0
        } else {
            (t as f64 / last as f64).powf(self.schedule_exponent)
        }
    }

    pub fn digest(&self) -> String {
        config_digest(&format!(
            "runs={};temps={};exponent={};steps_per_temp={};seed={};base_steps={:?};information={}",
            self.num_runs,
            self.num_temperatures,
            self.schedule_exponent,
            self.mh_steps_per_temperature,
            self.seed,
            self.base_step_sizes,
            self.information_factor
        ))
    }
}

/// A log marginal likelihood with its Monte-Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceEstimate {
    pub log_z: f64,
    /// Standard error of `log_z`; equal to the relative standard error of
    /// the linear-scale estimate to first order.
    pub standard_error_log: f64,
    /// Independent AIS runs; 0 for quadrature.
    pub num_runs: usize,
    pub log_weights: Vec<f64>,
}

impl EvidenceEstimate {
    fn exact(log_z: f64) -> Self {
        EvidenceEstimate {
            log_z,
            standard_error_log: 0.0,
            num_runs: 0,
            log_weights: Vec::new(),
        }
    }

    fn from_log_weights(log_weights: Vec<f64>) -> Self {
        let n = log_weights.len();
        let log_z = log_mean_exp(&log_weights);
        let standard_error_log = if log_z.is_finite() && n > 1 {
            let w: Vec<f64> = log_weights.iter().map(|lw| (lw - log_z).exp()).collect();
            let var = w.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        EvidenceEstimate {
            log_z,
            standard_error_log,
            num_runs: n,
            log_weights,
        }
    }
}

/// `log(mean(exp(xs)))`, shifted by the maximum so weights hundreds of log
/// units apart stay finite.
pub fn log_mean_exp(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = xs.iter().map(|x| (x - max).exp()).sum();
    max + (sum / xs.len() as f64).ln()
}

fn ais_run(stats: &CareerStats, kind: ModelKind, config: &AisConfig, run: usize) -> f64 {
    let mut rng = rng::substream(config.seed, run as u64);
    let dim = kind.dim();
    let start = sample_prior(kind, &mut rng).values();
    let mut state = ChainState::new(kind, &start, stats);
    let information = config.information_factor;
    let mut steps = vec![0.0; dim];
    let mut log_w = 0.0;
    let mut prev_beta = 0.0;
    for t in 1..config.num_temperatures {
        let beta = config.beta(t);
        log_w += (beta - prev_beta) * state.log_lik;
        prev_beta = beta;
        if t + 1 == config.num_temperatures {
            break;
        }
        let scale = 1.0 / (1.0 + beta * information).sqrt();
        for (s, b) in steps.iter_mut().zip(&config.base_step_sizes) {
            *s = b * scale;
        }
        for _ in 0..config.mh_steps_per_temperature {
            mh_step(&mut state, kind, stats, beta, &steps, &mut rng);
        }
    }
    log_w
}

/// AIS estimate of `log Z` for `kind` on `career`. Runs are independent and
/// execute in parallel; the result does not depend on thread count.
pub fn ais_log_evidence(career: &Career, kind: ModelKind, config: &AisConfig) -> EvidenceEstimate {
    let stats = CareerStats::new(career);
    let log_weights: Vec<f64> = (0..config.num_runs)
        .into_par_iter()
        .map(|r| ais_run(&stats, kind, config, r))
        .collect();
    EvidenceEstimate::from_log_weights(log_weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussKronrod,
    Simpson,
}

/// `log Z0` for the constant model by adaptive Gauss-Kronrod quadrature.
pub fn quadrature_log_evidence_constant(career: &Career) -> f64 {
    quadrature_log_evidence_constant_with(career, QuadratureRule::GaussKronrod)
}

pub fn quadrature_log_evidence_constant_with(career: &Career, rule: QuadratureRule) -> f64 {
    let stats = CareerStats::new(career);
    let log_integrand = |mu: f64| -> f64 {
        let mu = mu.max(f64::MIN_POSITIVE);
        log_prior_constant(mu) + stats.log_likelihood(&Params::Constant(ConstantParams { mu }))
    };

    // Locate the mode on a log grid, then refine by golden section.
    let (lo_log, hi_log, n) = (1e-6f64.ln(), 1e5f64.ln(), 800);
    let grid = |i: usize| lo_log + (hi_log - lo_log) * i as f64 / (n - 1) as f64;
    let best = (0..n)
        .map(|i| (i, log_integrand(grid(i).exp())))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
        .0;
    let (mut a, mut b) = (grid(best.saturating_sub(1)), grid((best + 1).min(n - 1)));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if log_integrand(c.exp()) > log_integrand(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    let peak = (0.5 * (a + b)).exp();
    let log_max = log_integrand(peak);

    // Bracket everything within 75 log units of the mode.
    let drop = log_max - 75.0;
    let mut hi = peak;
    let mut step = (0.01 * peak).max(1e-6);
    while log_integrand(hi) > drop {
        hi += step;
        step *= 1.5;
    }
    let mut lo = peak;
    let mut step = 0.01 * peak;
    while lo > 0.0 && log_integrand(lo) > drop {
        lo -= step;
        step *= 1.5;
    }
    let lo = lo.max(0.0);

    let f = |mu: f64| (log_integrand(mu) - log_max).exp();
    // The integrand peaks at 1, so this is a relative tolerance near 1e-13.
    let tol = 1e-13 * (hi - lo);
    let integral = match rule {
        QuadratureRule::GaussKronrod => {
            gauss_kronrod(f, lo, peak, tol) + gauss_kronrod(f, peak, hi, tol)
        }
        QuadratureRule::Simpson => {
            adaptive_simpson(f, lo, peak, tol) + adaptive_simpson(f, peak, hi, tol)
        }
    };
    log_max + integral.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantEvidenceMethod {
    Quadrature,
    Ais,
}

impl fmt::Display for ConstantEvidenceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantEvidenceMethod::Quadrature => "quadrature",
            ConstantEvidenceMethod::Ais => "ais",
        })
    }
}

/// Evidence ratio of the varying-hazard model over the constant model.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesFactor {
    pub log_bf: f64,
    /// Combined standard error; also the relative error of `exp(log_bf)`.
    pub se: f64,
    pub varying: EvidenceEstimate,
    pub constant: EvidenceEstimate,
    pub constant_method: ConstantEvidenceMethod,
}

pub fn log_bayes_factor(career: &Career, config: &AisConfig) -> BayesFactor {
    log_bayes_factor_with(career, config, ConstantEvidenceMethod::Quadrature)
}

pub fn log_bayes_factor_with(
    career: &Career,
    config: &AisConfig,
    method: ConstantEvidenceMethod,
) -> BayesFactor {
    let varying = ais_log_evidence(career, ModelKind::Varying, config);
    let constant = match method {
        ConstantEvidenceMethod::Quadrature => {
            EvidenceEstimate::exact(quadrature_log_evidence_constant(career))
        }
        ConstantEvidenceMethod::Ais => ais_log_evidence(
            career,
            ModelKind::Constant,
            // separate streams from the varying-model runs
            &config.clone().with_seed(config.seed ^ 0x5bd1_e995_0000_0001),
        ),
    };
    BayesFactor {
        log_bf: varying.log_z - constant.log_z,
        se: varying.standard_error_log.hypot(constant.standard_error_log),
        varying,
        constant,
        constant_method: method,
    }
}

/// Key-value block written by the `evidence` command.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceReport {
    pub player: String,
    pub config_digest: String,
    pub log_z: f64,
    pub log_z_se: f64,
    pub num_runs: usize,
    pub log_z0: f64,
    pub log_z0_se: f64,
    pub z0_method: ConstantEvidenceMethod,
    pub log_bf: f64,
    pub log_bf_se: f64,
}

impl EvidenceReport {
    pub fn new(player: impl Into<String>, config: &AisConfig, bf: &BayesFactor) -> Self {
        EvidenceReport {
            player: player.into(),
            config_digest: config.digest(),
            log_z: bf.varying.log_z,
            log_z_se: bf.varying.standard_error_log,
            num_runs: bf.varying.num_runs,
            log_z0: bf.constant.log_z,
            log_z0_se: bf.constant.standard_error_log,
            z0_method: bf.constant_method,
            log_bf: bf.log_bf,
            log_bf_se: bf.se,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# cricket-hazard evidence\n");
        let _ = writeln!(out, "player = {}", self.player);
        let _ = writeln!(out, "config_digest = {}", self.config_digest);
        let _ = writeln!(out, "varying.method = ais");
        let _ = writeln!(out, "varying.log_z = {}", self.log_z);
        let _ = writeln!(out, "varying.se = {}", self.log_z_se);
        let _ = writeln!(out, "varying.num_runs = {}", self.num_runs);
        let _ = writeln!(out, "constant.method = {}", self.z0_method);
        let _ = writeln!(out, "constant.log_z = {}", self.log_z0);
        let _ = writeln!(out, "constant.se = {}", self.log_z0_se);
        let _ = writeln!(out, "log_bayes_factor = {}", self.log_bf);
        let _ = writeln!(out, "log_bayes_factor.se = {}", self.log_bf_se);
        out
    }

    pub fn parse(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let err = |line: usize, message: String| Error::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut kv = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(idx + 1, format!("expected `key = value`, found `{line}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| err(0, format!("missing key `{k}`")));
        let num = |k: &str| -> Result<f64> {
            get(k)?.parse::<f64>().map_err(|e| err(0, format!("{k}: {e}")))
        };
        let z0_method = match get("constant.method")?.as_str() {
            "quadrature" => ConstantEvidenceMethod::Quadrature,
            "ais" => ConstantEvidenceMethod::Ais,
            other => return Err(err(0, format!("unknown constant.method `{other}`"))),
        };
        Ok(EvidenceReport {
            player: get("player")?.clone(),
            config_digest: get("config_digest")?.clone(),
            log_z: num("varying.log_z")?,
            log_z_se: num("varying.se")?,
            num_runs: get("varying.num_runs")?
                .parse()
                .map_err(|e| err(0, format!("varying.num_runs: {e}")))?,
            log_z0: num("constant.log_z")?,
            log_z0_se: num("constant.se")?,
            z0_method,
            log_bf: num("log_bayes_factor")?,
            log_bf_se: num("log_bayes_factor.se")?,
        })
    }
}
