//! Closed-form reference spectra for the synthetic fixtures.
//!
//! The quadrant cascade of [`crate::imaging::gen_binomial_cascade`] and the
//! Sierpiński carpet of [`crate::imaging::gen_sierpinski_carpet`] have
//! analytically known dimensions. This module evaluates them directly from
//! the construction parameters, with no box counting involved, so the
//! estimator pipeline can be validated against an independent source of
//! truth. The CLI also embeds these values in fixture sidecar files.

use crate::{Error, Result};

/// Weights below this are treated as absent from the cascade support:
/// a zero-weight quadrant receives no measure at any depth, so it cannot
/// contribute to any moment sum.
const SUPPORT_EPSILON: f64 = 1e-300;

/// Tolerance on `Σ weights − 1` accepted by cascade constructors.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Closed-form multifractal spectrum of a quadrant multiplicative cascade.
///
/// For weights `p_i` (non-negative, summing to 1) split over four quadrants
/// per refinement step, the exact quantities are
///
/// ```text
/// τ(q) = −log₂ Σ p_i^q          (sum over positive weights)
/// D_q  = τ(q) / (q − 1),  D_1 = −Σ p_i log₂ p_i
/// α(q) = −Σ m_i(q) log₂ p_i,    m_i(q) = p_i^q / Σ p_j^q
/// f(q) = q·α(q) − τ(q)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSpectrum {
    weights: [f64; 4],
}

impl CascadeSpectrum {
    /// Validates the weights and builds the evaluator.
    ///
    /// Accepts zero weights (the support then occupies fewer quadrants);
    /// rejects negative, non-finite, or non-normalized weights.
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let ok = weights.iter().all(|w| w.is_finite() && *w >= 0.0)
            && (weights.iter().sum::<f64>() - 1.0).abs() <= WEIGHT_SUM_TOLERANCE;
        if !ok {
            return Err(Error::BadWeights { weights });
        }
        Ok(Self { weights })
    }

    /// The validated weights.
    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .copied()
            .filter(|w| *w > SUPPORT_EPSILON)
    }

    /// Mass exponent `τ(q) = −log₂ Σ p_i^q`.
    pub fn tau(&self, q: f64) -> f64 {
        let sum: f64 = self.support().map(|p| p.powf(q)).sum();
        -sum.log2()
    }

    /// Generalized dimension `D_q = τ(q)/(q − 1)`, with the entropy limit
    /// `D_1 = −Σ p_i log₂ p_i` at `q = 1`.
    pub fn d_q(&self, q: f64) -> f64 {
        if q == 1.0 {
            self.alpha(1.0)
        } else {
            self.tau(q) / (q - 1.0)
        }
    }

    /// Singularity strength `α(q)`, the moment-weighted mean of
    /// `−log₂ p_i`. Decreases from `α(−∞) = −log₂ p_min` to
    /// `α(+∞) = −log₂ p_max`.
    pub fn alpha(&self, q: f64) -> f64 {
        let norm: f64 = self.support().map(|p| p.powf(q)).sum();
        self.support().map(|p| p.powf(q) / norm * -p.log2()).sum()
    }

    /// Spectrum value `f(q) = q·α(q) − τ(q)`.
    pub fn f_alpha(&self, q: f64) -> f64 {
        q * self.alpha(q) - self.tau(q)
    }

    /// Limit of `α(q)` as `q → +∞`: `−log₂ max(p_i)`.
    pub fn alpha_min(&self) -> f64 {
        let p_max = self.support().fold(f64::NEG_INFINITY, f64::max);
        -p_max.log2()
    }
}

/// Box-counting dimension of the Sierpiński carpet: `ln 8 / ln 3`.
pub fn sierpinski_carpet_dimension() -> f64 {
    8f64.ln() / 3f64.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE_WEIGHTS: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

    #[test]
    fn tau_at_zero_counts_support() {
        let cf = CascadeSpectrum::new(REFERENCE_WEIGHTS).unwrap();
        // Σ p^0 = 4 occupied quadrants, τ(0) = −log₂ 4 = −2.
        assert!((cf.tau(0.0) - -2.0).abs() < 1e-12);
        assert!((cf.d_q(0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tau_at_one_is_zero() {
        let cf = CascadeSpectrum::new(REFERENCE_WEIGHTS).unwrap();
        assert!(cf.tau(1.0).abs() < 1e-12);
    }

    #[test]
    fn d2_matches_hand_computation() {
        let cf = CascadeSpectrum::new(REFERENCE_WEIGHTS).unwrap();
        // Σ p² = 0.16 + 0.09 + 0.04 + 0.01 = 0.30.
        let expected = 0.30f64.ln() / -(2f64.ln());
        assert!((cf.d_q(2.0) - expected).abs() < 1e-12);
        assert!((expected - 1.736_965_594_166_206_3).abs() < 1e-12);
    }

    #[test]
    fn entropy_limit_at_q_one() {
        let cf = CascadeSpectrum::new(REFERENCE_WEIGHTS).unwrap();
        let d1: f64 = REFERENCE_WEIGHTS.iter().map(|p| -p * p.log2()).sum();
        assert!((cf.d_q(1.0) - d1).abs() < 1e-12);
        assert!((d1 - 1.846_439_344_671_015_7).abs() < 1e-12);
        // The q = 1 point is the tangency point: f = α = D₁.
        assert!((cf.f_alpha(1.0) - cf.alpha(1.0)).abs() < 1e-12);
    }

    #[test]
    fn alpha_endpoints() {
        let cf = CascadeSpectrum::new(REFERENCE_WEIGHTS).unwrap();
        // α(0) is the plain average of −log₂ p_i.
        let a0: f64 = REFERENCE_WEIGHTS.iter().map(|p| -p.log2() / 4.0).sum();
        assert!((cf.alpha(0.0) - a0).abs() < 1e-12);
        assert!((a0 - 2.175_687_469_707_073).abs() < 1e-12);
        assert!((cf.alpha(10.0) - 1.344_959_303_379_597_7).abs() < 1e-12);
        assert!((cf.alpha_min() - -0.4f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn uniform_weights_collapse_to_a_point() {
        let cf = CascadeSpectrum::new([0.25; 4]).unwrap();
        for q in [-10.0, -1.0, 0.0, 0.5, 1.0, 2.0, 10.0] {
            assert!((cf.d_q(q) - 2.0).abs() < 1e-12, "D_q at q={q}");
            assert!((cf.alpha(q) - 2.0).abs() < 1e-12, "alpha at q={q}");
            assert!((cf.f_alpha(q) - 2.0).abs() < 1e-12, "f at q={q}");
        }
    }

    #[test]
    fn zero_weight_shrinks_support() {
        let cf = CascadeSpectrum::new([0.5, 0.5, 0.0, 0.0]).unwrap();
        // Two occupied quadrants halving in side: dimension log₂ 2 = 1.
        assert!((cf.d_q(0.0) - 1.0).abs() < 1e-12);
        assert!((cf.alpha(3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(CascadeSpectrum::new([0.5, 0.5, 0.25, -0.25]).is_err());
        assert!(CascadeSpectrum::new([0.4, 0.3, 0.2, 0.2]).is_err());
        assert!(CascadeSpectrum::new([f64::NAN, 0.3, 0.4, 0.3]).is_err());
    }

    #[test]
    fn carpet_dimension_value() {
        assert!((sierpinski_carpet_dimension() - 1.892_789_260_714_372).abs() < 1e-12);
    }
}
