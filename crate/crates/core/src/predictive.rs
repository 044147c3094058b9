//! Posterior-predictive score distribution for a further innings, and the
//! hazard and effective-average curves derived from it.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hazard::HazardModel;
use crate::sampler::PosteriorSamples;

/// Curves stop once less than this much predictive mass survives.
pub const SURVIVOR_FLOOR: f64 = 1e-6;

/// Smallest default range for predictive tables.
pub const MIN_DEFAULT_X_MAX: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveDistribution {
    /// `P(X = x)` for `x` in `0..=x_max`.
    pub pmf: Vec<f64>,
    /// `P(X > x_max)`.
    pub tail_mass: f64,
}

/// `max(200, 3 * largest observed score)`.
pub fn default_x_max(max_observed_score: Option<u32>) -> u32 {
    max_observed_score
        .map_or(MIN_DEFAULT_X_MAX, |m| m.saturating_mul(3))
        .max(MIN_DEFAULT_X_MAX)
}

impl PredictiveDistribution {
    pub fn x_max(&self) -> u32 {
        self.pmf.len() as u32 - 1
    }

    /// `P(X >= x)` for each `x` in `0..=x_max`, summed from the tail so small
    /// survivor masses keep their relative precision.
    pub fn survivor(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.pmf.len()];
        let mut acc = self.tail_mass;
        for (x, p) in self.pmf.iter().enumerate().rev() {
            acc += p;
            out[x] = acc;
        }
        out
    }

    /// `H(x) = P(X = x) / P(X >= x)`, reported while the survivor mass is at
    /// least [`SURVIVOR_FLOOR`].
    pub fn hazard(&self) -> Vec<f64> {
        self.survivor()
            .iter()
            .zip(&self.pmf)
            .take_while(|(s, _)| **s >= SURVIVOR_FLOOR)
            .map(|(s, p)| (p / s).min(1.0))
            .collect()
    }

    /// `1 / H(x) - 1` over the same range as [`PredictiveDistribution::hazard`].
    pub fn effective_average(&self) -> Vec<f64> {
        self.hazard().iter().map(|h| 1.0 / h - 1.0).collect()
    }
}

/// Averages each draw's score distribution over `0..=x_max`.
pub fn predictive_pmf(samples: &PosteriorSamples, x_max: u32) -> Result<PredictiveDistribution> {
    if samples.is_empty() {
        return Err(Error::Usage("predictive distribution needs at least one draw".into()));
    }
    let len = x_max as usize + 1;
    let mut pmf = vec![0.0; len];
    let mut tail = 0.0;
    for p in samples.params() {
        let mut log_g = 0.0;
        for (x, slot) in pmf.iter_mut().enumerate() {
            let x = x as u32;
            *slot += (p.log_hazard(x) + log_g).exp();
            log_g += p.log_complement(x);
        }
        tail += log_g.exp();
    }
    let n = samples.len() as f64;
    pmf.iter_mut().for_each(|v| *v /= n);
    Ok(PredictiveDistribution {
        pmf,
        tail_mass: tail / n,
    })
}

pub fn predictive_hazard(dist: &PredictiveDistribution) -> Vec<f64> {
    dist.hazard()
}

pub fn predictive_effective_average(dist: &PredictiveDistribution) -> Vec<f64> {
    dist.effective_average()
}

/// Plot-ready table: `x,predictive_pmf,predictive_hazard,effective_average`.
pub fn render_table(samples: &PosteriorSamples, dist: &PredictiveDistribution, x_max_note: &str) -> String {
    let hazard = dist.hazard();
    let mut out = String::from("# cricket-hazard predictive\n");
    let _ = writeln!(out, "# player: {}", samples.metadata.player);
    let _ = writeln!(out, "# model: {}", samples.kind());
    let _ = writeln!(out, "# seed: {}", samples.seed);
    let _ = writeln!(out, "# config_digest: {}", samples.config_digest());
    let _ = writeln!(out, "# draws: {}", samples.len());
    let _ = writeln!(out, "# x_max: {} ({x_max_note})", dist.x_max());
    let _ = writeln!(out, "# tail_mass: {}", dist.tail_mass);
    let _ = writeln!(
        out,
        "# rows stop where P(X >= x) < {SURVIVOR_FLOOR}; {} of {} scores reported",
        hazard.len(),
        dist.pmf.len()
    );
    out.push_str("x,predictive_pmf,predictive_hazard,effective_average\n");
    for (x, h) in hazard.iter().enumerate() {
        let _ = writeln!(out, "{x},{},{h},{}", dist.pmf[x], 1.0 / h - 1.0);
    }
    out
}
