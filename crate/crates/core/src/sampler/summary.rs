use crate::error::{Error, Result};
use crate::model::ModelKind;

use super::PosteriorSamples;

/// Posterior means, standard deviations, and correlations of the draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub kind: ModelKind,
    pub draws: usize,
    pub means: Vec<f64>,
    /// Population standard deviations (divisor `n`).
    pub sds: Vec<f64>,
    /// Unit diagonal; off-diagonal entries involving a zero-variance
    /// component are reported as 0.
    pub correlation: Vec<Vec<f64>>,
}

impl PosteriorSummary {
    /// Largest off-diagonal absolute correlation, 0 for one component.
    pub fn max_abs_correlation(&self) -> f64 {
        let d = self.means.len();
        let mut max = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                max = max.max(self.correlation[i][j].abs());
            }
        }
        max
    }
}

pub fn summarize(samples: &PosteriorSamples) -> Result<PosteriorSummary> {
    if samples.is_empty() {
        return Err(Error::Usage("cannot summarize an empty sample set".into()));
    }
    let d = samples.dim();
    let n = samples.len() as f64;
    let mut means = vec![0.0; d];
    for row in samples.rows() {
        for (m, x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);

    let mut cov = vec![vec![0.0; d]; d];
    for row in samples.rows() {
        for i in 0..d {
            let di = row[i] - means[i];
            for j in 0..=i {
                cov[i][j] += di * (row[j] - means[j]);
            }
        }
    }
    let sds: Vec<f64> = (0..d).map(|i| (cov[i][i] / n).max(0.0).sqrt()).collect();
    let mut correlation = vec![vec![0.0; d]; d];
    for i in 0..d {
        correlation[i][i] = 1.0;
        for j in 0..i {
            let denom = (cov[i][i] * cov[j][j]).sqrt();
            let r = if denom > 0.0 {
                (cov[i][j] / denom).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            correlation[i][j] = r;
            correlation[j][i] = r;
        }
    }
    Ok(PosteriorSummary {
        kind: samples.kind(),
        draws: samples.len(),
        means,
        sds,
        correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_draw_means() {
        let s = PosteriorSamples::from_draws(
            ModelKind::Varying,
            &[vec![1.0, 2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0, 6.0]],
            0,
        )
        .unwrap();
        let sum = summarize(&s).unwrap();
        assert_eq!(sum.means, vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(sum.sds, vec![1.0; 4]);
        assert!(sum.correlation.iter().flatten().all(|&r| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn identical_draws_have_zero_correlation() {
        let draws = vec![vec![5.0, 6.0, 7.0, 8.0]; 10];
        let sum = summarize(&PosteriorSamples::from_draws(ModelKind::Varying, &draws, 0).unwrap()).unwrap();
        assert_eq!(sum.sds, vec![0.0; 4]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(sum.correlation[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(sum.max_abs_correlation(), 0.0);
    }

    #[test]
    fn empty_is_usage_error() {
        let s = PosteriorSamples::from_draws(ModelKind::Constant, &[], 0).unwrap();
        assert!(matches!(summarize(&s), Err(Error::Usage(_))));
    }

    proptest! {
        #[test]
        fn correlation_matrix_is_well_formed(
            draws in prop::collection::vec(prop::collection::vec(0.01f64..100.0, 4), 1..40)
        ) {
            let s = PosteriorSamples::from_draws(ModelKind::Varying, &draws, 0).unwrap();
            let sum = summarize(&s).unwrap();
            for i in 0..4 {
                prop_assert_eq!(sum.correlation[i][i], 1.0);
                for j in 0..4 {
                    prop_assert_eq!(sum.correlation[i][j], sum.correlation[j][i]);
                    prop_assert!(sum.correlation[i][j].abs() <= 1.0);
                }
            }
        }
    }
}
