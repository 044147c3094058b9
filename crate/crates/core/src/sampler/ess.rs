use crate::error::{Error, Result};

use super::PosteriorSamples;

/// Effective sample size of one component, using Geyer's initial monotone
/// positive sequence to truncate the autocorrelation sum.
///
/// A zero-variance component reports the draw count. The estimate is capped
/// at the number of draws.
pub fn effective_sample_size(samples: &PosteriorSamples, component: usize) -> Result<f64> {
    if component >= samples.dim() {
        return Err(Error::Usage(format!(
            "component {component} out of range for the {} model",
            samples.kind()
        )));
    }
    ess_of_series(&samples.column(component))
}

pub(crate) fn ess_of_series(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 10 {
        return Err(Error::Usage(format!(
            "effective sample size needs at least 10 draws, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let var = autocov(0);
    // A constant series has nothing to correlate.
    if var.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Ok(nf);
    }

    // Sum of paired autocorrelations Gamma_m = rho_{2m} + rho_{2m+1}, stopping
    // at the first non-positive pair and forcing the sequence to be monotone.
    let mut sum = 0.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / var;
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        sum += pair;
        prev_pair = pair;
        lag += 2;
    }
    let tau = (2.0 * sum - 1.0).max(1.0 / nf);
    Ok((nf / tau).min(nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;
    use crate::rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn white_noise_is_nearly_independent() {
        let mut r = rng::stream(1);
        let xs: Vec<f64> = (0..20_000).map(|_| r.sample(StandardNormal)).collect();
        let ess = ess_of_series(&xs).unwrap();
        assert!((ess / 20_000.0 - 1.0).abs() < 0.1, "ess {ess}");
    }

    #[test]
    fn ar1_matches_analytic_value() {
        let rho = 0.5;
        let n = 50_000;
        let mut r = rng::stream(2);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let e: f64 = r.sample(StandardNormal);
                x = rho * x + e;
                x
            })
            .collect();
        let expected = n as f64 * (1.0 - rho) / (1.0 + rho);
        let ess = ess_of_series(&xs).unwrap();
        assert!((ess / expected - 1.0).abs() < 0.15, "ess {ess} vs {expected}");
    }

    #[test]
    fn constant_series_reports_draw_count() {
        let s = PosteriorSamples::from_draws(ModelKind::Constant, &vec![vec![3.0]; 25], 0).unwrap();
        assert_eq!(effective_sample_size(&s, 0).unwrap(), 25.0);
    }

    #[test]
    fn rejects_short_series_and_bad_component() {
        assert!(matches!(ess_of_series(&[1.0; 9]), Err(Error::Usage(_))));
        let s = PosteriorSamples::from_draws(ModelKind::Constant, &vec![vec![3.0]; 25], 0).unwrap();
        assert!(effective_sample_size(&s, 1).is_err());
    }

    #[test]
    fn never_exceeds_draw_count() {
        // Alternating series has negative lag-1 autocorrelation.
        let xs: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(ess_of_series(&xs).unwrap() <= 100.0);
    }
}
