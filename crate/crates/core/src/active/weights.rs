use crate::error::{AgeError, Result};
use crate::numerics::{sample_beta_1_n, SeededRng};

/// Mixing weights for the entropy, density and centrality percentiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl TimeWeights {
    pub const ENTROPY: TimeWeights = TimeWeights { alpha: 1.0, beta: 0.0, gamma: 0.0 };
    pub const DENSITY: TimeWeights = TimeWeights { alpha: 0.0, beta: 1.0, gamma: 0.0 };
    pub const CENTRALITY: TimeWeights = TimeWeights { alpha: 0.0, beta: 0.0, gamma: 1.0 };
    pub const NONE: TimeWeights = TimeWeights { alpha: 0.0, beta: 0.0, gamma: 0.0 };

    /// Fixed γ with `α = β = (1 − γ)/2`.
    pub fn fixed(gamma: f64) -> TimeWeights {
        let alpha = 0.5 * (1.0 - gamma);
        TimeWeights { alpha, beta: alpha, gamma }
    }

    /// Scales three non-negative draws to sum to one. γ takes the remainder,
    /// which makes `(α + β) + γ` exactly 1 in floating point.
    pub fn normalized(alpha: f64, beta: f64, gamma: f64) -> Result<TimeWeights> {
        let total = alpha + beta + gamma;
        if !(total > 0.0) || alpha < 0.0 || beta < 0.0 || gamma < 0.0 {
            return Err(AgeError::Parameter(format!(
                "cannot normalize weights ({alpha}, {beta}, {gamma})"
            )));
        }
        let alpha = alpha / total;
        let beta = beta / total;
        let gamma = 1.0 - (alpha + beta);
        if gamma < 0.0 {
            // α + β rounded above 1; β takes the remainder instead.
            return Ok(TimeWeights {
                alpha,
                beta: 1.0 - alpha,
                gamma: 0.0,
            });
        }
        Ok(TimeWeights { alpha, beta, gamma })
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma
    }
}

/// Weights for query `t` of `budget`:
/// `γ ~ Beta(1, t)`, `α, β ~ Beta(1, max(1, B − t + 1))`, then normalized.
///
/// Beta(1, n) has mean 1/(1+n), so centrality dominates the first queries and
/// entropy/density dominate the last ones.
pub fn sample_time_weights(t: usize, budget: usize, rng: &mut SeededRng) -> Result<TimeWeights> {
    if t == 0 || t > budget {
        return Err(AgeError::Usage(format!("query index {t} outside 1..={budget}")));
    }
    let n_gamma = t as f64;
    let n_embed = (budget - t + 1).max(1) as f64;
    let gamma = sample_beta_1_n(rng, n_gamma)?;
    let alpha = sample_beta_1_n(rng, n_embed)?;
    let beta = sample_beta_1_n(rng, n_embed)?;
    TimeWeights::normalized(alpha, beta, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let mut rng = SeededRng::new(12, 0);
        for t in 1..=50 {
            let w = sample_time_weights(t, 50, &mut rng).unwrap();
            assert_eq!(w.sum(), 1.0);
            assert!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0);
        }
    }

    #[test]
    fn early_queries_favour_centrality() {
        let budget = 100;
        let draws = 20_000;
        let mut rng = SeededRng::new(3, 0);
        let (mut early_gamma, mut late_gamma) = (0.0, 0.0);
        for _ in 0..draws {
            early_gamma += sample_time_weights(1, budget, &mut rng).unwrap().gamma;
            late_gamma += sample_time_weights(budget, budget, &mut rng).unwrap().gamma;
        }
        let (early_gamma, late_gamma) = (early_gamma / draws as f64, late_gamma / draws as f64);
        assert!(early_gamma > 0.8, "{early_gamma}");
        assert!(late_gamma < 0.05, "{late_gamma}");
    }

    #[test]
    fn raw_draw_means_follow_beta() {
        // t = 1: E[γ_raw] = 1/2, E[α_raw] = 1/(B+1); t = B: the reverse.
        let budget = 20;
        let draws = 100_000;
        let mut rng = SeededRng::new(77, 0);
        let mean = |n: f64, rng: &mut SeededRng| {
            (0..draws).map(|_| sample_beta_1_n(rng, n).unwrap()).sum::<f64>() / draws as f64
        };
        assert!((mean(1.0, &mut rng) - 0.5).abs() < 0.01);
        assert!((mean(budget as f64, &mut rng) - 1.0 / 21.0).abs() < 0.005);
    }

    #[test]
    fn out_of_range_t_is_rejected() {
        let mut rng = SeededRng::new(0, 0);
        assert!(sample_time_weights(0, 5, &mut rng).is_err());
        assert!(sample_time_weights(6, 5, &mut rng).is_err());
    }

    #[test]
    fn normalization_is_exact_for_extreme_draws() {
        for (a, b, g) in [
            (0.7, 0.3, 1e-300),
            (1.0, 1.0, f64::MIN_POSITIVE),
            (1e-300, 1e-300, 1.0),
            (0.1, 0.2, 0.3),
            (1.0 / 3.0, 1.0 / 7.0, 1.0 / 11.0),
        ] {
            let w = TimeWeights::normalized(a, b, g).unwrap();
            assert_eq!(w.sum(), 1.0, "{a} {b} {g}");
            assert!(w.gamma >= 0.0 && w.beta >= 0.0);
        }
        assert!(TimeWeights::normalized(0.0, 0.0, 0.0).is_err());
        assert!(TimeWeights::normalized(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fixed_split() {
        let w = TimeWeights::fixed(0.7);
        assert!((w.alpha - 0.15).abs() < 1e-15 && w.alpha == w.beta);
        assert!((w.sum() - 1.0).abs() < 1e-15);
    }
}
