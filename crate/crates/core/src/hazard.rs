//! Hazard, survival, and score distributions for a single innings.
//!
//! All probabilities are handled in log space; careers contain scores in the
//! hundreds and products of that many survival factors underflow quickly.

use rand::Rng;

use crate::error::{Error, Result};

/// Smallest transition length used in evaluation. Below this the sigmoid is a
/// step function for every integer score anyway.
pub const ELL_FLOOR: f64 = 1e-6;

/// Upper bound on [`HazardModel::truncation_point`].
pub const HARD_CAP: u32 = 100_000;

/// Change-point hazard parameters, all in runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardParams {
    /// Effective average on arrival at the crease.
    pub mu1: f64,
    /// Effective average once set.
    pub mu2: f64,
    /// Score at the midpoint of the transition.
    pub tau: f64,
    /// Length scale of the transition.
    pub ell: f64,
}

/// Constant-hazard model: a geometric score distribution with mean `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantParams {
    pub mu: f64,
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl HazardParams {
    pub fn new(mu1: f64, mu2: f64, tau: f64, ell: f64) -> Result<Self> {
        check_positive("mu1", mu1)?;
        check_positive("mu2", mu2)?;
        check_positive("tau", tau)?;
        check_positive("ell", ell)?;
        Ok(HazardParams { mu1, mu2, tau, ell })
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.mu1, self.mu2, self.tau, self.ell]
    }

    /// Logistic weight of `mu2` at score `x`, in `[0, 1]`.
    fn transition(&self, x: f64) -> f64 {
        let z = (x - self.tau) / self.ell.max(ELL_FLOOR);
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }
}

impl ConstantParams {
    pub fn new(mu: f64) -> Result<Self> {
        check_positive("mu", mu)?;
        Ok(ConstantParams { mu })
    }

    /// The constant model whose per-run dismissal probability is `h`.
    pub fn from_hazard(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidParams(format!(
                "hazard must lie in (0, 1), got {h}"
            )));
        }
        ConstantParams::new(1.0 / h - 1.0)
    }
}

/// A discrete-time hazard over scores `0, 1, 2, ...`.
///
/// Implementors only supply the effective average; everything else follows
/// from `H(x) = 1 / (mu(x) + 1)`.
pub trait HazardModel {
    /// Batting average the player would have if the hazard stayed at `H(x)`.
    fn effective_average(&self, x: u32) -> f64;

    fn hazard(&self, x: u32) -> f64 {
        1.0 / (self.effective_average(x) + 1.0)
    }

    /// `log H(x)`.
    fn log_hazard(&self, x: u32) -> f64 {
        -self.effective_average(x).ln_1p()
    }

    /// `log(1 - H(x))`, computed from `mu(x)` to avoid cancellation.
    fn log_complement(&self, x: u32) -> f64 {
        let mu = self.effective_average(x);
        mu.ln() - mu.ln_1p()
    }

    /// `log G(x) = log P(X >= x)`.
    fn log_survival(&self, x: u32) -> f64 {
        (0..x).map(|a| self.log_complement(a)).sum()
    }

    /// `log P(X = x)`.
    fn log_pmf(&self, x: u32) -> f64 {
        self.log_hazard(x) + self.log_survival(x)
    }

    /// Smallest `x` with `G(x) < eps`, capped at [`HARD_CAP`].
    fn truncation_point(&self, eps: f64) -> u32 {
        debug_assert!(eps > 0.0 && eps < 1.0);
        let log_eps = eps.ln();
        let mut log_g = 0.0;
        for x in 0..HARD_CAP {
            if log_g < log_eps {
                return x;
            }
            log_g += self.log_complement(x);
        }
        HARD_CAP
    }

    /// One innings: a Bernoulli(`H(a)`) dismissal trial on each score `a`
    /// from zero upward.
    fn sample_score<R: Rng + ?Sized>(&self, rng: &mut R) -> u32
    where
        Self: Sized,
    {
        let mut x = 0;
        while rng.gen::<f64>() >= self.hazard(x) {
            x += 1;
        }
        x
    }
}

impl HazardModel for HazardParams {
    fn effective_average(&self, x: u32) -> f64 {
        self.mu1 + (self.mu2 - self.mu1) * self.transition(f64::from(x))
    }
}

impl HazardModel for ConstantParams {
    fn effective_average(&self, _x: u32) -> f64 {
        self.mu
    }

    fn log_survival(&self, x: u32) -> f64 {
        if x == 0 {
            0.0
        } else {
            f64::from(x) * self.log_complement(0)
        }
    }
}
