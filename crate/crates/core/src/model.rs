//! Priors, likelihood, and unnormalized posterior for the two hazard models.
//!
//! Priors are fully normalized because evidence estimates compare them across
//! models:
//!
//! * `mu1`, `mu2`, and the constant model's `mu`: Normal(30, 20^2) truncated
//!   to `(0, inf)`,
//! * `tau`: Exponential with mean 20,
//! * `ell`: Exponential with mean 3.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, Open01};
use libm::erfc;

use crate::career::Career;
use crate::error::{Error, Result};
use crate::hazard::{ConstantParams, HazardModel, HazardParams};

pub const PRIOR_MU_MEAN: f64 = 30.0;
pub const PRIOR_MU_SD: f64 = 20.0;
pub const PRIOR_TAU_MEAN: f64 = 20.0;
pub const PRIOR_ELL_MEAN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Four-parameter change-point hazard.
    Varying,
    /// Single effective average, geometric scores.
    Constant,
}

impl ModelKind {
    pub fn dim(self) -> usize {
        match self {
            ModelKind::Varying => 4,
            ModelKind::Constant => 1,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Varying => &["mu1", "mu2", "tau", "ell"],
            ModelKind::Constant => &["mu"],
        }
    }

    /// Prior means: the default chain starting point.
    pub fn initial_values(self) -> &'static [f64] {
        match self {
            ModelKind::Varying => &[PRIOR_MU_MEAN, PRIOR_MU_MEAN, PRIOR_TAU_MEAN, PRIOR_ELL_MEAN],
            ModelKind::Constant => &[PRIOR_MU_MEAN],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Varying => "varying",
            ModelKind::Constant => "constant",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "varying" => Ok(ModelKind::Varying),
            "constant" => Ok(ModelKind::Constant),
            other => Err(Error::Usage(format!(
                "unknown model `{other}` (expected `varying` or `constant`)"
            ))),
        }
    }
}

/// A parameter vector of either model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Varying(HazardParams),
    Constant(ConstantParams),
}

impl Params {
    pub fn kind(&self) -> ModelKind {
        match self {
            Params::Varying(_) => ModelKind::Varying,
            Params::Constant(_) => ModelKind::Constant,
        }
    }

    /// Builds parameters from raw components, in [`ModelKind::param_names`] order.
    pub fn from_values(kind: ModelKind, values: &[f64]) -> Result<Self> {
        if values.len() != kind.dim() {
            return Err(Error::Usage(format!(
                "{kind} model takes {} parameters, got {}",
                kind.dim(),
                values.len()
            )));
        }
        Ok(match kind {
            ModelKind::Varying => Params::Varying(HazardParams::new(
                values[0], values[1], values[2], values[3],
            )?),
            ModelKind::Constant => Params::Constant(ConstantParams::new(values[0])?),
        })
    }

    /// Like [`Params::from_values`] without validation, for values already
    /// known to be positive.
    pub(crate) fn from_values_unchecked(kind: ModelKind, values: &[f64]) -> Self {
        match kind {
            ModelKind::Varying => Params::Varying(HazardParams {
                mu1: values[0],
                mu2: values[1],
                tau: values[2],
                ell: values[3],
            }),
            ModelKind::Constant => Params::Constant(ConstantParams { mu: values[0] }),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Params::Varying(p) => p.to_array().to_vec(),
            Params::Constant(p) => vec![p.mu],
        }
    }

    pub fn log_prior(&self) -> f64 {
        match self {
            Params::Varying(p) => log_prior_varying(p),
            Params::Constant(p) => log_prior_constant(p.mu),
        }
    }
}

impl HazardModel for Params {
    fn effective_average(&self, x: u32) -> f64 {
        match self {
            Params::Varying(p) => p.effective_average(x),
            Params::Constant(p) => p.effective_average(x),
        }
    }

    fn log_survival(&self, x: u32) -> f64 {
        match self {
            Params::Varying(p) => p.log_survival(x),
            Params::Constant(p) => p.log_survival(x),
        }
    }
}

/// Sufficient statistics of a career for any hazard model.
///
/// With `d[x]` dismissals on score `x` and `s[x]` innings (of either kind)
/// that got past score `x`, the censored log-likelihood is
/// `sum_x d[x] log H(x) + s[x] log(1 - H(x))`, one pass over the scores.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CareerStats {
    dismissed_at: Vec<u32>,
    survived_past: Vec<u32>,
    innings: usize,
    dismissals: usize,
    total_runs: u64,
}

impl CareerStats {
    pub fn new(career: &Career) -> Self {
        let len = career.max_runs().map_or(0, |m| m as usize + 1);
        let mut dismissed_at = vec![0u32; len];
        let mut reached = vec![0u32; len + 1];
        let mut dismissals = 0;
        let mut total_runs = 0u64;
        for inn in &career.innings {
            let r = inn.runs as usize;
            if !inn.not_out {
                dismissed_at[r] += 1;
                dismissals += 1;
            }
            reached[r] += 1;
            total_runs += u64::from(inn.runs);
        }
        // survived_past[x] = #innings with runs > x
        let mut survived_past = vec![0u32; len];
        let mut above = 0u32;
        for x in (0..len).rev() {
            survived_past[x] = above;
            above += reached[x];
        }
        CareerStats {
            dismissed_at,
            survived_past,
            innings: career.innings.len(),
            dismissals,
            total_runs,
        }
    }

    pub fn innings(&self) -> usize {
        self.innings
    }

    pub fn dismissals(&self) -> usize {
        self.dismissals
    }

    pub fn total_runs(&self) -> u64 {
        self.total_runs
    }

    pub fn log_likelihood(&self, params: &Params) -> f64 {
        match params {
            // Closed form: (I - N) log h + (total runs) log(1 - h).
            Params::Constant(p) => {
                let mut ll = 0.0;
                if self.dismissals > 0 {
                    ll += self.dismissals as f64 * p.log_hazard(0);
                }
                if self.total_runs > 0 {
                    ll += self.total_runs as f64 * p.log_complement(0);
                }
                ll
            }
            Params::Varying(p) => self.log_likelihood_generic(p),
        }
    }

    fn log_likelihood_generic<M: HazardModel>(&self, model: &M) -> f64 {
        let mut ll = 0.0;
        for (x, (&d, &s)) in self.dismissed_at.iter().zip(&self.survived_past).enumerate() {
            if d == 0 && s == 0 {
                continue;
            }
            let mu = model.effective_average(x as u32);
            let log1p_mu = mu.ln_1p();
            if d > 0 {
                ll -= f64::from(d) * log1p_mu;
            }
            if s > 0 {
                ll += f64::from(s) * (mu.ln() - log1p_mu);
            }
        }
        ll
    }
}

/// Censored log-likelihood of a career: log-hazard at each dismissal score
/// plus log-survival to every recorded score.
pub fn log_likelihood(params: &Params, career: &Career) -> f64 {
    CareerStats::new(career).log_likelihood(params)
}

/// `Phi(x)` for the standard normal.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Negated comparisons send NaN to the zero-density branch.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn log_truncated_normal(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    let z = (x - PRIOR_MU_MEAN) / PRIOR_MU_SD;
    let log_norm = (PRIOR_MU_SD * (2.0 * std::f64::consts::PI).sqrt()).ln()
        + standard_normal_cdf(PRIOR_MU_MEAN / PRIOR_MU_SD).ln();
    -0.5 * z * z - log_norm
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn log_exponential(x: f64, mean: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    -mean.ln() - x / mean
}

pub fn log_prior_varying(p: &HazardParams) -> f64 {
    log_prior_varying_values(&p.to_array())
}

pub(crate) fn log_prior_varying_values(v: &[f64]) -> f64 {
    let lp = log_truncated_normal(v[0])
        + log_truncated_normal(v[1])
        + log_exponential(v[2], PRIOR_TAU_MEAN)
        + log_exponential(v[3], PRIOR_ELL_MEAN);
    if lp.is_nan() {
        f64::NEG_INFINITY
    } else {
        lp
    }
}

pub fn log_prior_constant(mu: f64) -> f64 {
    log_truncated_normal(mu)
}

/// Log prior of raw components, `-inf` outside the support.
pub fn log_prior_values(kind: ModelKind, values: &[f64]) -> f64 {
    match kind {
        ModelKind::Varying => log_prior_varying_values(values),
        ModelKind::Constant => log_prior_constant(values[0]),
    }
}

/// `log prior + log likelihood`. `kind` must match the shape of `params`.
pub fn log_posterior_unnorm(params: &Params, stats: &CareerStats, kind: ModelKind) -> Result<f64> {
    if params.kind() != kind {
        return Err(Error::Usage(format!(
            "{} parameters passed for the {kind} model",
            params.kind()
        )));
    }
    let lp = params.log_prior();
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    Ok(lp + stats.log_likelihood(params))
}

fn sample_truncated_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let normal = Normal::new(PRIOR_MU_MEAN, PRIOR_MU_SD).expect("valid normal");
    loop {
        let x = normal.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
}

fn sample_exponential<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    -mean * u.ln()
}

/// One exact draw from the prior of `kind`.
pub fn sample_prior<R: Rng + ?Sized>(kind: ModelKind, rng: &mut R) -> Params {
    match kind {
        ModelKind::Varying => Params::Varying(HazardParams {
            mu1: sample_truncated_normal(rng),
            mu2: sample_truncated_normal(rng),
            tau: sample_exponential(PRIOR_TAU_MEAN, rng),
            ell: sample_exponential(PRIOR_ELL_MEAN, rng),
        }),
        ModelKind::Constant => Params::Constant(ConstantParams {
            mu: sample_truncated_normal(rng),
        }),
    }
}

/// Analytic mean and standard deviation of each prior marginal.
pub fn prior_moments(kind: ModelKind) -> Vec<(f64, f64)> {
    let alpha = -PRIOR_MU_MEAN / PRIOR_MU_SD;
    let pdf = (-0.5 * alpha * alpha).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let lambda = pdf / (1.0 - standard_normal_cdf(alpha));
    let tn_mean = PRIOR_MU_MEAN + PRIOR_MU_SD * lambda;
    let tn_sd = PRIOR_MU_SD * (1.0 + alpha * lambda - lambda * lambda).sqrt();
    match kind {
        ModelKind::Varying => vec![
            (tn_mean, tn_sd),
            (tn_mean, tn_sd),
            (PRIOR_TAU_MEAN, PRIOR_TAU_MEAN),
            (PRIOR_ELL_MEAN, PRIOR_ELL_MEAN),
        ],
        ModelKind::Constant => vec![(tn_mean, tn_sd)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::career::Innings;
    use crate::rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn constant(mu: f64) -> Params {
        Params::Constant(ConstantParams::new(mu).unwrap())
    }

    fn career(innings: &[(u32, bool)]) -> Career {
        Career::new(
            "t",
            innings
                .iter()
                .map(|&(runs, not_out)| Innings { runs, not_out })
                .collect(),
        )
    }

    /// Log of the product of pmf / survival probabilities, built by direct
    /// multiplication of per-run factors.
    fn brute_force_log_likelihood(p: &Params, c: &Career) -> f64 {
        let mut prob = 1.0f64;
        for inn in &c.innings {
            for a in 0..inn.runs {
                prob *= 1.0 - p.hazard(a);
            }
            if !inn.not_out {
                prob *= p.hazard(inn.runs);
            }
        }
        prob.ln()
    }

    #[test]
    fn likelihood_examples() {
        assert_eq!(log_likelihood(&constant(30.0), &Career::default()), 0.0);
        assert_relative_eq!(
            log_likelihood(&constant(30.0), &career(&[(0, false)])),
            (1.0f64 / 31.0).ln(),
            epsilon = 1e-15
        );
        assert_eq!(log_likelihood(&constant(30.0), &career(&[(0, true)])), 0.0);
    }

    #[test]
    fn constant_likelihood_collapses() {
        let c = career(&[(12, false), (0, false), (33, true), (4, false), (1, true)]);
        let mu: f64 = 17.5;
        let h = 1.0 / (mu + 1.0);
        let closed = 3.0 * h.ln() + 50.0 * (1.0 - h).ln();
        assert_relative_eq!(log_likelihood(&constant(mu), &c), closed, epsilon = 1e-12);
        // the varying model with mu1 == mu2 goes through the per-score path
        let flat = Params::Varying(HazardParams::new(mu, mu, 3.0, 1.0).unwrap());
        assert_relative_eq!(log_likelihood(&flat, &c), closed, epsilon = 1e-12);
        assert_relative_eq!(brute_force_log_likelihood(&flat, &c), closed, epsilon = 1e-12);
    }

    #[test]
    fn prior_examples() {
        let p = HazardParams::new(30.0, 30.0, 20.0, 3.0).unwrap();
        assert_relative_eq!(log_prior_varying(&p), -13.78539926451496, epsilon = 1e-10);
        assert_relative_eq!(log_prior_constant(30.0), -3.8455273511464294, epsilon = 1e-10);
        assert_relative_eq!(log_prior_constant(50.0), -4.34552735114643, epsilon = 1e-10);
        assert_eq!(log_prior_constant(-1.0), f64::NEG_INFINITY);
        assert_eq!(log_prior_constant(0.0), f64::NEG_INFINITY);
        for bad in [[0.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, 1.0], [1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 1.0, -2.0]] {
            assert_eq!(log_prior_varying_values(&bad), f64::NEG_INFINITY);
        }
        assert_eq!(log_prior_varying_values(&[f64::NAN, 1.0, 1.0, 1.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn normal_cdf_accuracy() {
        // Phi(1.5) from a 50-digit reference.
        let err = (standard_normal_cdf(1.5) - 0.933_192_798_731_141_9).abs();
        assert!(err < 4e-15, "err {err:e}");
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn posterior_is_prior_plus_likelihood() {
        let stats = CareerStats::new(&Career::default());
        let p = Params::Varying(HazardParams::new(12.0, 45.0, 4.0, 2.0).unwrap());
        assert_eq!(
            log_posterior_unnorm(&p, &stats, ModelKind::Varying).unwrap(),
            p.log_prior()
        );
        let c = career(&[(5, false), (77, true), (0, false)]);
        let stats = CareerStats::new(&c);
        let mut r = rng::stream(3);
        for _ in 0..20 {
            let p = sample_prior(ModelKind::Varying, &mut r);
            let v = log_posterior_unnorm(&p, &stats, ModelKind::Varying).unwrap();
            assert_eq!(v, p.log_prior() + log_likelihood(&p, &c));
        }
        let bad = Params::Varying(HazardParams { mu1: 1.0, mu2: 1.0, tau: -1.0, ell: 1.0 });
        assert_eq!(
            log_posterior_unnorm(&bad, &stats, ModelKind::Varying).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(matches!(
            log_posterior_unnorm(&constant(3.0), &stats, ModelKind::Varying),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn prior_draws_are_positive_with_prior_moments() {
        let mut r = rng::stream(99);
        let n = 200_000;
        let mut sums = [0.0f64; 4];
        for _ in 0..n {
            let v = sample_prior(ModelKind::Varying, &mut r).values();
            assert!(v.iter().all(|&x| x > 0.0));
            for (s, x) in sums.iter_mut().zip(&v) {
                *s += x;
            }
        }
        for (j, (mean, sd)) in prior_moments(ModelKind::Varying).into_iter().enumerate() {
            let m = sums[j] / n as f64;
            assert!((m - mean).abs() < 4.0 * sd / (n as f64).sqrt(), "component {j}: {m} vs {mean}");
        }
    }

    #[test]
    fn analytic_prior_moments() {
        let m = prior_moments(ModelKind::Varying);
        assert!((m[0].0 - 32.8).abs() < 0.05);
        assert!((m[0].1 - 17.6).abs() < 0.05);
    }

    /// Importance-sampling check that each prior integrates to one: sample
    /// from a wide proposal q and average exp(log_prior) / q.
    #[test]
    fn priors_integrate_to_one() {
        let mut r = rng::stream(17);
        let n = 400_000;
        // Independent exponential proposals with generous means.
        let means = [40.0, 40.0, 30.0, 5.0];
        let mut acc_v = 0.0;
        let mut acc_c = 0.0;
        for _ in 0..n {
            let mut v = [0.0; 4];
            let mut log_q = 0.0;
            for (x, &m) in v.iter_mut().zip(&means) {
                *x = sample_exponential(m, &mut r);
                log_q += log_exponential(*x, m);
            }
            acc_v += (log_prior_varying_values(&v) - log_q).exp();
            acc_c += (log_prior_constant(v[0]) - log_exponential(v[0], means[0])).exp();
        }
        let (zv, zc) = (acc_v / n as f64, acc_c / n as f64);
        assert!((zv - 1.0).abs() < 0.01, "varying prior mass {zv}");
        assert!((zc - 1.0).abs() < 0.01, "constant prior mass {zc}");
    }

    fn arb_tiny_career() -> impl Strategy<Value = Career> {
        prop::collection::vec((0u32..=6, any::<bool>()), 0..12).prop_map(|v| {
            Career::new("t", v.into_iter().map(|(runs, not_out)| Innings { runs, not_out }).collect())
        })
    }

    fn arb_params() -> impl Strategy<Value = Params> {
        (0.1f64..100.0, 0.1f64..100.0, 0.01f64..40.0, 0.01f64..10.0)
            .prop_map(|(a, b, t, l)| Params::Varying(HazardParams::new(a, b, t, l).unwrap()))
    }

    proptest! {
        #[test]
        fn likelihood_matches_brute_force(c in arb_tiny_career(), p in arb_params(), mu in 0.1f64..100.0) {
            prop_assert!((log_likelihood(&p, &c) - brute_force_log_likelihood(&p, &c)).abs() < 1e-12);
            let q = constant(mu);
            prop_assert!((log_likelihood(&q, &c) - brute_force_log_likelihood(&q, &c)).abs() < 1e-12);
        }

        #[test]
        fn likelihood_factorizes(c in arb_tiny_career(), p in arb_params()) {
            let whole = log_likelihood(&p, &c);
            let parts: f64 = c.innings.iter()
                .map(|&i| log_likelihood(&p, &Career::new("t", vec![i])))
                .sum();
            prop_assert!((whole - parts).abs() < 1e-10);
        }

        #[test]
        fn censoring_never_lowers_contribution(r in 0u32..400, p in arb_params()) {
            let out = log_likelihood(&p, &Career::new("t", vec![Innings::dismissed(r)]));
            let not_out = log_likelihood(&p, &Career::new("t", vec![Innings::not_out(r)]));
            prop_assert!(not_out >= out);
        }
    }
}
