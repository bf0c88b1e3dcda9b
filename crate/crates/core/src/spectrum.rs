//! Partition sums, generalized-dimension regressions, and the direct
//! singularity-spectrum estimator.
//!
//! For each moment order `q`, [`compute_dq`] regresses `ln I(q, ε)` (the
//! log partition sum) against `ln(ε₀/ε)` to obtain the mass exponent
//! `τ(q)` and generalized dimension `D_q = τ(q)/(q − 1)`; `q = 1` uses the
//! entropy-form limit. [`chhabra_spectrum`] estimates `α(q)` and `f(q)`
//! directly from moment-normalized box weights, so the singularity
//! spectrum needs no numerical Legendre transform. [`assemble_spectrum`]
//! averages per-offset curves into the reported spectrum.
//!
//! All regressions use the distributions' *effective* scales (see
//! [`MeasureDistribution::effective_scale`]) on the abscissa, and every
//! reduction runs in a fixed order, so results are reproducible bit for
//! bit regardless of worker count.

use serde::Serialize;

use crate::boxcount::{MeasureDistribution, MIN_REGRESSION_SCALES};
use crate::{Error, Result};

/// Allowed rise in `D_q` or `α(q)` (both non-increasing in theory) before
/// a spectrum is flagged; sampled scans at extreme `|q|` are noisy where a
/// handful of boxes dominate the moments.
pub const MONOTONICITY_TOLERANCE: f64 = 0.02;

/// Values snapped to exact 0 or 1 when building a q grid, as a fraction of
/// the step.
const Q_SNAP: f64 = 1e-9;

/// The moment orders a spectrum is evaluated on.
///
/// Always contains `q = 0` (box counting) and `q = 1` (information
/// dimension) exactly: downstream code relies on matching those points by
/// equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QGrid {
    values: Vec<f64>,
}

impl QGrid {
    /// Builds the grid `q_min, q_min + q_step, …, q_max`, snapping values
    /// within a relative [`Q_SNAP`] of 0 or 1 to exactly 0 or 1.
    pub fn from_range(q_min: f64, q_max: f64, q_step: f64) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && q_step.is_finite() && q_step > 0.0) {
            return Err(Error::InvalidQGrid(format!(
                "range [{q_min}, {q_max}] step {q_step}"
            )));
        }
        let span = q_max - q_min;
        let steps = (span / q_step).round();
        if !(1.0..=1e6).contains(&steps) {
            return Err(Error::InvalidQGrid(format!(
                "range [{q_min}, {q_max}] step {q_step} yields {steps} steps"
            )));
        }
        if (q_min + steps * q_step - q_max).abs() > q_step * 1e-6 {
            return Err(Error::InvalidQGrid(format!(
                "step {q_step} does not divide the range [{q_min}, {q_max}]"
            )));
        }
        let snap = q_step * Q_SNAP;
        let values = (0..=steps as usize)
            .map(|i| {
                let v = q_min + i as f64 * q_step;
                if v.abs() <= snap {
                    0.0
                } else if (v - 1.0).abs() <= snap {
                    1.0
                } else {
                    v
                }
            })
            .collect();
        Self::from_values(values)
    }

    /// Validates an explicit ascending grid containing exact 0 and 1.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidQGrid("non-finite q value".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQGrid(
                "values must be strictly ascending".into(),
            ));
        }
        if !values.contains(&0.0) || !values.contains(&1.0) {
            return Err(Error::InvalidQGrid(
                "grid must contain q = 0 and q = 1 exactly".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for QGrid {
    /// `−10` to `+10` in steps of `0.25` (81 values).
    fn default() -> Self {
        Self::from_range(-10.0, 10.0, 0.25).expect("default grid is valid")
    }
}

/// One spectrum sample: the mass exponent, generalized dimension,
/// singularity strength, and spectrum value at one `q`, with the
/// coefficients of determination of the regressions that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub tau: f64,
    pub d_q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
    pub r2_tau: f64,
    pub r2_alpha: f64,
    pub r2_f: f64,
}

/// Standard deviation across grid offsets, per `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QSpread {
    pub q: f64,
    pub tau: f64,
    pub d_q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
}

/// The spectrum computed at a single grid offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetSpectrum {
    pub offset: (u32, u32),
    pub points: Vec<SpectrumPoint>,
}

/// A full multifractal spectrum: offset-averaged curve, per-q dispersion,
/// the per-offset curves it was assembled from, and the scale range used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultifractalSpectrum {
    /// Mean across offsets, indexed by the q grid.
    pub points: Vec<SpectrumPoint>,
    /// Population standard deviation across offsets, per q.
    pub spread: Vec<QSpread>,
    /// The individual offset curves, sorted by offset.
    pub per_offset: Vec<OffsetSpectrum>,
    /// `(smallest, largest)` box size of the scan.
    pub scale_range: (u32, u32),
    /// Set when the mean `D_q` or `α(q)` rises by more than
    /// [`MONOTONICITY_TOLERANCE`] anywhere — a sign the scaling range or
    /// measure is degraded at extreme moments. Never an error.
    pub monotonicity_warning: bool,
}

impl MultifractalSpectrum {
    /// The q values of the mean curve.
    pub fn q_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.q)
    }

    /// The mean point at exactly `q`, if present.
    pub fn point_at(&self, q: f64) -> Option<&SpectrumPoint> {
        self.points.iter().find(|p| p.q == q)
    }
}

/// The partition sum `I(q, ε) = Σ P_i^q` of one distribution. At `q = 0`
/// this is the occupied box count.
pub fn partition_sum(dist: &MeasureDistribution, q: f64) -> f64 {
    dist.probabilities().iter().map(|p| p.powf(q)).sum()
}

/// `(q, τ, D_q, r²)` for one q — see [`compute_dq`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqPoint {
    pub q: f64,
    pub tau: f64,
    pub d_q: f64,
    pub r2: f64,
}

/// `(q, α, f, r²_α, r²_f)` for one q — see [`chhabra_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChhabraPoint {
    pub q: f64,
    pub alpha: f64,
    pub f_alpha: f64,
    pub r2_alpha: f64,
    pub r2_f: f64,
}

/// Ordinary least squares of `ys` on `xs`; returns `(slope, r²)`.
/// `r² = 1` when the responses are constant (a perfect horizontal fit).
fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::DegenerateRegression(
            "zero variance on the scale axis".into(),
        ));
    }
    let slope = sxy / sxx;
    let r2 = if syy <= 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok((slope, r2))
}

/// `ln Σ exp(w_i)`, stabilized against overflow for extreme moments.
fn log_sum_exp(ws: &[f64]) -> f64 {
    let max = ws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ws.iter().map(|w| (w - max).exp()).sum();
    max + sum.ln()
}

/// Validates a scale series: enough scales, one shared offset.
fn validate_scales(dists: &[MeasureDistribution]) -> Result<()> {
    if dists.len() < MIN_REGRESSION_SCALES {
        return Err(Error::TooFewScales {
            got: dists.len(),
            min: MIN_REGRESSION_SCALES,
        });
    }
    let offset = dists[0].offset();
    if let Some(other) = dists.iter().find(|d| d.offset() != offset) {
        let o = other.offset();
        return Err(Error::MixedOffsets(offset.0, offset.1, o.0, o.1));
    }
    Ok(())
}

/// Per-scale `ln P_i` vectors, shared by both regressions.
fn log_probabilities(dists: &[MeasureDistribution]) -> Vec<Vec<f64>> {
    dists
        .iter()
        .map(|d| d.probabilities().iter().map(|p| p.ln()).collect())
        .collect()
}

/// Generalized dimensions over a q grid from one offset's scale series.
///
/// For `q ≠ 1`, `D_q` is the OLS slope of `ln I(q, ε)` versus
/// `ln(ε₀/ε)`, divided by `1 − q`, and `τ(q) = (q − 1) D_q`. At `q = 1`
/// the entropy form applies: `D_1` is the slope of `Σ P_i ln P_i` versus
/// `ln(ε/ε₀)`, and `τ(1) = 0`. `base` is the reference scale ε₀; it only
/// shifts the regression intercept, never the slope.
pub fn compute_dq(dists: &[MeasureDistribution], qgrid: &QGrid, base: f64) -> Result<Vec<DqPoint>> {
    validate_scales(dists)?;
    if !(base.is_finite() && base > 0.0) {
        return Err(Error::DegenerateRegression(format!(
            "reference scale {base}"
        )));
    }
    let ln_p = log_probabilities(dists);
    let x_shrink: Vec<f64> = dists
        .iter()
        .map(|d| (base / d.effective_scale()).ln())
        .collect();
    let x_grow: Vec<f64> = dists
        .iter()
        .map(|d| (d.effective_scale() / base).ln())
        .collect();

    qgrid
        .values()
        .iter()
        .map(|&q| {
            if q == 1.0 {
                let ys: Vec<f64> = dists
                    .iter()
                    .zip(&ln_p)
                    .map(|(d, lp)| {
                        d.probabilities()
                            .iter()
                            .zip(lp)
                            .map(|(p, l)| p * l)
                            .sum::<f64>()
                    })
                    .collect();
                let (slope, r2) = ols(&x_grow, &ys)?;
                Ok(DqPoint {
                    q,
                    tau: 0.0,
                    d_q: slope,
                    r2,
                })
            } else {
                let ys: Vec<f64> = ln_p
                    .iter()
                    .map(|lp| {
                        let ws: Vec<f64> = lp.iter().map(|l| q * l).collect();
                        log_sum_exp(&ws)
                    })
                    .collect();
                let (slope, r2) = ols(&x_shrink, &ys)?;
                Ok(DqPoint {
                    q,
                    tau: -slope,
                    d_q: slope / (1.0 - q),
                    r2,
                })
            }
        })
        .collect()
}

/// Direct singularity-spectrum estimation over a q grid from one offset's
/// scale series.
///
/// Per scale, box weights are moment-normalized, `m_i(q, ε) = P_i^q / Σ
/// P_j^q`; then `α(q)` is the OLS slope of `Σ m_i ln P_i` versus
/// `ln(ε/ε₀)` and `f(q)` the slope of `Σ m_i ln m_i` versus the same
/// abscissa. Regressing on the shrinking axis keeps both quantities
/// positive for valid measures.
pub fn chhabra_spectrum(
    dists: &[MeasureDistribution],
    qgrid: &QGrid,
    base: f64,
) -> Result<Vec<ChhabraPoint>> {
    validate_scales(dists)?;
    if !(base.is_finite() && base > 0.0) {
        return Err(Error::DegenerateRegression(format!(
            "reference scale {base}"
        )));
    }
    let ln_p = log_probabilities(dists);
    let x_grow: Vec<f64> = dists
        .iter()
        .map(|d| (d.effective_scale() / base).ln())
        .collect();

    qgrid
        .values()
        .iter()
        .map(|&q| {
            let mut alpha_ys = Vec::with_capacity(ln_p.len());
            let mut f_ys = Vec::with_capacity(ln_p.len());
            for lp in &ln_p {
                let ws: Vec<f64> = lp.iter().map(|l| q * l).collect();
                let norm = log_sum_exp(&ws);
                let mut weighted_ln_p = 0.0;
                let mut weighted_ln_m = 0.0;
                for (w, l) in ws.iter().zip(lp) {
                    let m = (w - norm).exp();
                    weighted_ln_p += m * l;
                    weighted_ln_m += m * (w - norm);
                }
                alpha_ys.push(weighted_ln_p);
                f_ys.push(weighted_ln_m);
            }
            let (alpha, r2_alpha) = ols(&x_grow, &alpha_ys)?;
            let (f_alpha, r2_f) = ols(&x_grow, &f_ys)?;
            Ok(ChhabraPoint {
                q,
                alpha,
                f_alpha,
                r2_alpha,
                r2_f,
            })
        })
        .collect()
}

/// Zips matching generalized-dimension and direct-estimator outputs into
/// full spectrum samples. Both inputs must come from the same q grid.
pub fn combine_points(dq: &[DqPoint], ch: &[ChhabraPoint]) -> Result<Vec<SpectrumPoint>> {
    if dq.len() != ch.len() || dq.iter().zip(ch).any(|(d, c)| d.q != c.q) {
        return Err(Error::MismatchedGrids);
    }
    Ok(dq
        .iter()
        .zip(ch)
        .map(|(d, c)| SpectrumPoint {
            q: d.q,
            tau: d.tau,
            d_q: d.d_q,
            alpha: c.alpha,
            f_alpha: c.f_alpha,
            r2_tau: d.r2,
            r2_alpha: c.r2_alpha,
            r2_f: c.r2_f,
        })
        .collect())
}

/// Merges per-offset curves into the reported spectrum: mean and
/// population standard deviation per q across offsets.
///
/// Offsets are sorted before reduction, so any permutation of the input
/// assembles to a bit-identical spectrum.
pub fn assemble_spectrum(
    per_offset: Vec<OffsetSpectrum>,
    scale_range: (u32, u32),
) -> Result<MultifractalSpectrum> {
    if per_offset.is_empty() {
        return Err(Error::InvalidConfig(
            "assemble_spectrum needs at least one offset result".into(),
        ));
    }
    let grid_matches = per_offset.iter().all(|o| {
        o.points.len() == per_offset[0].points.len()
            && o.points
                .iter()
                .zip(&per_offset[0].points)
                .all(|(a, b)| a.q == b.q)
    });
    if !grid_matches {
        return Err(Error::MismatchedGrids);
    }

    let mut per_offset = per_offset;
    per_offset.sort_by_key(|o| o.offset);

    let n = per_offset.len() as f64;
    let num_q = per_offset[0].points.len();
    let mut points = Vec::with_capacity(num_q);
    let mut spread = Vec::with_capacity(num_q);
    for i in 0..num_q {
        let q = per_offset[0].points[i].q;
        let mean = |get: &dyn Fn(&SpectrumPoint) -> f64| -> f64 {
            per_offset.iter().map(|o| get(&o.points[i])).sum::<f64>() / n
        };
        let std = |get: &dyn Fn(&SpectrumPoint) -> f64, mean: f64| -> f64 {
            (per_offset
                .iter()
                .map(|o| {
                    let d = get(&o.points[i]) - mean;
                    d * d
                })
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let tau = mean(&|p| p.tau);
        let d_q = mean(&|p| p.d_q);
        let alpha = mean(&|p| p.alpha);
        let f_alpha = mean(&|p| p.f_alpha);
        points.push(SpectrumPoint {
            q,
            tau,
            d_q,
            alpha,
            f_alpha,
            r2_tau: mean(&|p| p.r2_tau),
            r2_alpha: mean(&|p| p.r2_alpha),
            r2_f: mean(&|p| p.r2_f),
        });
        spread.push(QSpread {
            q,
            tau: std(&|p| p.tau, tau),
            d_q: std(&|p| p.d_q, d_q),
            alpha: std(&|p| p.alpha, alpha),
            f_alpha: std(&|p| p.f_alpha, f_alpha),
        });
    }

    let rises = |get: &dyn Fn(&SpectrumPoint) -> f64| -> bool {
        points
            .windows(2)
            .any(|w| get(&w[1]) > get(&w[0]) + MONOTONICITY_TOLERANCE)
    };
    let monotonicity_warning = rises(&|p| p.d_q) || rises(&|p| p.alpha);

    Ok(MultifractalSpectrum {
        points,
        spread,
        per_offset,
        scale_range,
        monotonicity_warning,
    })
}

/// Internal-consistency check of the two estimators: per q, the absolute
/// Legendre residual `|f(q) − (q·α(q) − τ(q))|` of the mean curve.
pub fn legendre_residuals(spec: &MultifractalSpectrum) -> Vec<(f64, f64)> {
    spec.points
        .iter()
        .map(|p| (p.q, (p.f_alpha - (p.q * p.alpha - p.tau)).abs()))
        .collect()
}

/// The rising branch of the spectrum: mean points with `q ≥ 0`, sorted
/// by ascending `α` (the `q = 0` apex comes last).
pub fn left_side(spec: &MultifractalSpectrum) -> Vec<SpectrumPoint> {
    let mut points: Vec<SpectrumPoint> =
        spec.points.iter().filter(|p| p.q >= 0.0).copied().collect();
    points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxcount::MeasureDistribution;

    fn dist(epsilon: u32, measures: &[f64]) -> MeasureDistribution {
        MeasureDistribution::new(epsilon, (0, 0), measures).unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let grid = QGrid::default();
        assert_eq!(grid.len(), 81);
        assert_eq!(grid.values()[0], -10.0);
        assert_eq!(grid.values()[80], 10.0);
        assert!(grid.values().contains(&0.0));
        assert!(grid.values().contains(&1.0));
    }

    #[test]
    fn grid_rejects_misaligned_step() {
        // 0.3 from −10 never lands on 0 or 1.
        assert!(QGrid::from_range(-10.0, 10.0, 0.3).is_err());
        assert!(QGrid::from_range(10.0, -10.0, 0.25).is_err());
        assert!(QGrid::from_values(vec![-1.0, 0.0, 0.5]).is_err());
        assert!(QGrid::from_values(vec![0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn grid_snaps_near_zero_and_one() {
        // Accumulating 0.1 steps in binary drifts off exact integers; the
        // grid must still contain exact 0 and 1.
        let grid = QGrid::from_range(-2.0, 2.0, 0.1).unwrap();
        assert!(grid.values().contains(&0.0));
        assert!(grid.values().contains(&1.0));
    }

    #[test]
    fn partition_sum_single_box() {
        let d = dist(4, &[5.0]);
        for q in [-3.0, 0.0, 1.0, 2.5] {
            assert_eq!(partition_sum(&d, q), 1.0);
        }
    }

    #[test]
    fn partition_sum_uniform_quarters() {
        let d = dist(4, &[1.0, 1.0, 1.0, 1.0]);
        assert!((partition_sum(&d, 2.0) - 0.25).abs() < 1e-12);
        assert!((partition_sum(&d, 0.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn partition_sum_reference_weights() {
        let d = dist(4, &[0.4, 0.3, 0.2, 0.1]);
        assert!((partition_sum(&d, 2.0) - 0.30).abs() < 1e-12);
    }

    /// Five scales of an exactly self-similar uniform refinement: at scale
    /// ε = 16/2^k there are 4^k equal boxes.
    fn uniform_series() -> Vec<MeasureDistribution> {
        (0..5u32)
            .map(|k| {
                let count = 4usize.pow(k);
                dist(16 >> k, &vec![1.0; count])
            })
            .collect()
    }

    #[test]
    fn uniform_series_gives_dimension_two() {
        let dists = uniform_series();
        let grid = QGrid::default();
        let points = compute_dq(&dists, &grid, 16.0).unwrap();
        for p in &points {
            assert!((p.d_q - 2.0).abs() < 1e-9, "q {}: {}", p.q, p.d_q);
            assert!((p.r2 - 1.0).abs() < 1e-9);
        }
        let ch = chhabra_spectrum(&dists, &grid, 16.0).unwrap();
        for p in &ch {
            assert!((p.alpha - 2.0).abs() < 1e-9);
            assert!((p.f_alpha - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tau_is_q_minus_one_times_dq() {
        let dists = uniform_series();
        let grid = QGrid::default();
        for p in compute_dq(&dists, &grid, 16.0).unwrap() {
            assert!((p.tau - (p.q - 1.0) * p.d_q).abs() < 1e-9, "q {}", p.q);
        }
    }

    #[test]
    fn regression_rejects_short_series() {
        let dists: Vec<_> = uniform_series().into_iter().take(4).collect();
        assert!(matches!(
            compute_dq(&dists, &QGrid::default(), 16.0),
            Err(Error::TooFewScales { got: 4, .. })
        ));
    }

    #[test]
    fn regression_rejects_mixed_offsets() {
        let mut dists = uniform_series();
        dists[2] = MeasureDistribution::new(4, (1, 0), &[1.0; 16]).unwrap();
        assert!(matches!(
            compute_dq(&dists, &QGrid::default(), 16.0),
            Err(Error::MixedOffsets(..))
        ));
    }

    #[test]
    fn assemble_single_offset_has_zero_spread() {
        let dists = uniform_series();
        let grid = QGrid::default();
        let dq = compute_dq(&dists, &grid, 16.0).unwrap();
        let ch = chhabra_spectrum(&dists, &grid, 16.0).unwrap();
        let points = combine_points(&dq, &ch).unwrap();
        let spec = assemble_spectrum(
            vec![OffsetSpectrum {
                offset: (0, 0),
                points,
            }],
            (1, 16),
        )
        .unwrap();
        assert!(spec.spread.iter().all(|s| s.d_q == 0.0 && s.alpha == 0.0));
        assert!(!spec.monotonicity_warning);
    }

    #[test]
    fn assemble_identical_offsets_has_zero_spread() {
        let point = SpectrumPoint {
            q: 0.0,
            tau: -2.0,
            d_q: 2.0,
            alpha: 2.0,
            f_alpha: 2.0,
            r2_tau: 1.0,
            r2_alpha: 1.0,
            r2_f: 1.0,
        };
        let one = SpectrumPoint { q: 1.0, ..point };
        let curve = vec![point, one];
        let spec = assemble_spectrum(
            vec![
                OffsetSpectrum {
                    offset: (0, 0),
                    points: curve.clone(),
                },
                OffsetSpectrum {
                    offset: (2, 2),
                    points: curve,
                },
            ],
            (2, 8),
        )
        .unwrap();
        assert!(spec.spread.iter().all(|s| s.d_q == 0.0));
        assert_eq!(spec.points[0].d_q, 2.0);
    }

    #[test]
    fn assemble_is_permutation_invariant() {
        let curve = |shift: f64| {
            vec![
                SpectrumPoint {
                    q: 0.0,
                    tau: -2.0 - shift,
                    d_q: 2.0 + shift,
                    alpha: 2.0 + shift,
                    f_alpha: 2.0 + shift,
                    r2_tau: 1.0,
                    r2_alpha: 1.0,
                    r2_f: 1.0,
                },
                SpectrumPoint {
                    q: 1.0,
                    tau: 0.0,
                    d_q: 1.9 + shift,
                    alpha: 1.9 + shift,
                    f_alpha: 1.9 + shift,
                    r2_tau: 1.0,
                    r2_alpha: 1.0,
                    r2_f: 1.0,
                },
            ]
        };
        let offsets = vec![
            OffsetSpectrum {
                offset: (0, 0),
                points: curve(0.0),
            },
            OffsetSpectrum {
                offset: (7, 0),
                points: curve(0.013),
            },
            OffsetSpectrum {
                offset: (0, 7),
                points: curve(-0.04),
            },
        ];
        let mut reversed = offsets.clone();
        reversed.reverse();
        let a = assemble_spectrum(offsets, (2, 8)).unwrap();
        let b = assemble_spectrum(reversed, (2, 8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assemble_rejects_mismatched_grids() {
        let p = |q: f64| SpectrumPoint {
            q,
            tau: 0.0,
            d_q: 0.0,
            alpha: 0.0,
            f_alpha: 0.0,
            r2_tau: 1.0,
            r2_alpha: 1.0,
            r2_f: 1.0,
        };
        let a = OffsetSpectrum {
            offset: (0, 0),
            points: vec![p(0.0), p(1.0)],
        };
        let b = OffsetSpectrum {
            offset: (1, 1),
            points: vec![p(0.0), p(2.0)],
        };
        assert!(matches!(
            assemble_spectrum(vec![a, b], (2, 8)),
            Err(Error::MismatchedGrids)
        ));
    }

    #[test]
    fn left_side_counts_default_grid() {
        let dists = uniform_series();
        let grid = QGrid::default();
        let dq = compute_dq(&dists, &grid, 16.0).unwrap();
        let ch = chhabra_spectrum(&dists, &grid, 16.0).unwrap();
        let points = combine_points(&dq, &ch).unwrap();
        let spec = assemble_spectrum(
            vec![OffsetSpectrum {
                offset: (0, 0),
                points,
            }],
            (1, 16),
        )
        .unwrap();
        let left = left_side(&spec);
        // q = 0, 0.25, …, 10 → 41 points.
        assert_eq!(left.len(), 41);
        // Monofractal: every point collapses near (2, 2).
        assert!(left
            .iter()
            .all(|p| (p.alpha - 2.0).abs() < 1e-9 && (p.f_alpha - 2.0).abs() < 1e-9));
        // Legendre residuals vanish on the same fixture.
        for (q, r) in legendre_residuals(&spec) {
            assert!(r < 1e-9, "q {q}: {r}");
        }
    }
}
