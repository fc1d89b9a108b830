//! Statistics of residual weight distributions.

use serde::{Deserialize, Serialize};

/// Amplitudes at or below this magnitude are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Normalized weights `p_μ = |c_μ|² / Σ|c_ν|²`, stored in descending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    weights: Vec<f64>,
}

impl WeightDistribution {
    /// `None` if no amplitude exceeds [`SUPPORT_CUTOFF`].
    pub fn from_amplitudes<I: IntoIterator<Item = f64>>(amplitudes: I) -> Option<Self> {
        let squares: Vec<f64> = amplitudes
            .into_iter()
            .filter(|a| a.abs() > SUPPORT_CUTOFF)
            .map(|a| a * a)
            .collect();
        Self::normalize(squares)
    }

    /// From nonnegative unnormalized weights; zeros are dropped.
    pub fn from_weights<I: IntoIterator<Item = f64>>(weights: I) -> Option<Self> {
        Self::normalize(weights.into_iter().filter(|w| *w > 0.0).collect())
    }

    fn normalize(mut w: Vec<f64>) -> Option<Self> {
        if w.is_empty() {
            return None;
        }
        let total: f64 = w.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return None;
        }
        w.iter_mut().for_each(|x| *x /= total);
        w.sort_by(|a, b| b.total_cmp(a));
        Some(WeightDistribution { weights: w })
    }

    pub fn support(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `S = −Σ p ln p / ln N`, zero for a single-entry support.
pub fn shannon_entropy(d: &WeightDistribution) -> f64 {
    let n = d.support();
    if n == 1 {
        return 0.0;
    }
    let h: f64 = d
        .weights
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    h / (n as f64).ln()
}

/// `1 / Σ p²`.
pub fn participation_ratio(d: &WeightDistribution) -> f64 {
    1.0 / d.weights.iter().map(|p| p * p).sum::<f64>()
}

/// Mass of the `k` largest weights; exactly 1 once `k` covers the support.
pub fn topk_mass(d: &WeightDistribution, k: usize) -> f64 {
    if k >= d.support() {
        return 1.0;
    }
    d.weights[..k].iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform() {
        let d = WeightDistribution::from_weights(vec![1.0; 8]).unwrap();
        assert!((shannon_entropy(&d) - 1.0).abs() < 1e-12);
        assert!((participation_ratio(&d) - 8.0).abs() < 1e-12);
        assert!((topk_mass(&d, 3) - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn spike() {
        let d = WeightDistribution::from_amplitudes(vec![0.0, 2.0, 1e-13]).unwrap();
        assert_eq!(d.support(), 1);
        assert_eq!(shannon_entropy(&d), 0.0);
        assert_eq!(participation_ratio(&d), 1.0);
        assert_eq!(topk_mass(&d, 1), 1.0);
    }

    #[test]
    fn half_quarter_quarter() {
        let d = WeightDistribution::from_weights(vec![0.25, 0.5, 0.25]).unwrap();
        let expected = 1.5 * 2f64.ln() / 3f64.ln();
        assert!((shannon_entropy(&d) - expected).abs() < 1e-12);
        assert!((shannon_entropy(&d) - 0.9464).abs() < 1e-4);
    }

    #[test]
    fn empty_support() {
        assert!(WeightDistribution::from_amplitudes(vec![1e-13, 0.0]).is_none());
        assert!(WeightDistribution::from_weights(Vec::new()).is_none());
    }
}
