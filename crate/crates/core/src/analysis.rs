//! Analyses built on top of computed spectra: peak-dimension extraction,
//! pairwise spectrum comparison, fragment-scaling studies, and
//! year-grouped order reports over a catalog of images.

use serde::{Deserialize, Serialize};

use crate::imaging::{extract_fragment, FragmentRect, GrayscaleImage};
use crate::pipeline::{analyze_image, AnalysisSettings};
use crate::spectrum::MultifractalSpectrum;
use crate::{Error, Result};

/// Dimension at or above which a record is tagged `ordered` rather than
/// `fractal` — near-space-filling structure versus genuinely fractal.
pub const DEFAULT_ORDER_THRESHOLD: f64 = 1.85;

/// Default number of nested windows in a fragment-scaling study.
pub const DEFAULT_FRAGMENT_LEVELS: u32 = 4;

/// Samples on the common α grid two spectra are compared over.
pub const OVERLAY_POINTS: usize = 101;

/// The peak dimension `D_f` of a spectrum: the mean generalized dimension
/// at `q = 0`, which on exact measures equals the maximum of `f(α)`.
pub fn max_dimension(spec: &MultifractalSpectrum) -> Result<f64> {
    spec.point_at(0.0).map(|p| p.d_q).ok_or(Error::MissingQZero)
}

/// One sample of two `f(α)` curves interpolated onto a shared α value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlayPoint {
    pub alpha: f64,
    pub f_a: f64,
    pub f_b: f64,
}

/// How far apart two singularity spectra are.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    /// `|D_f(a) − D_f(b)|`.
    pub delta_df: f64,
    /// Maximum `|Δf|` over the common α grid.
    pub linf_f: f64,
    /// Integrated `|Δf|` over the common α grid (trapezoidal).
    pub area_gap: f64,
    /// `(α_lo, α_hi)` of the grid both curves were sampled on.
    pub shared_alpha_range: (f64, f64),
    /// The sampled curves, for plotting.
    #[serde(skip)]
    pub overlay: Vec<OverlayPoint>,
}

/// A spectrum's `f(α)` curve as strictly-ascending `(α, f)` knots;
/// repeated α values (flat spectra) are merged by averaging their `f`.
fn f_curve(spec: &MultifractalSpectrum) -> Result<Vec<(f64, f64)>> {
    let mut pts: Vec<(f64, f64)> = spec
        .points
        .iter()
        .filter(|p| p.alpha.is_finite() && p.f_alpha.is_finite())
        .map(|p| (p.alpha, p.f_alpha))
        .collect();
    if pts.is_empty() {
        return Err(Error::NoSharedAlphaRange);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    let mut run = 1.0;
    for (alpha, f) in pts {
        match knots.last_mut() {
            Some(last) if last.0 == alpha => {
                run += 1.0;
                last.1 += (f - last.1) / run;
            }
            _ => {
                run = 1.0;
                knots.push((alpha, f));
            }
        }
    }
    Ok(knots)
}

/// Piecewise-linear evaluation with constant extension beyond the knots,
/// so a narrow spectrum still contributes its boundary value across the
/// full comparison range.
fn eval_curve(knots: &[(f64, f64)], x: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Quantifies the difference between two singularity spectra.
///
/// Both `f(α)` curves are linearly interpolated onto one grid of
/// [`OVERLAY_POINTS`] α values spanning the two curves' combined support;
/// outside its own support a curve continues at its boundary value. The
/// metrics are symmetric in the arguments, and comparing a spectrum with
/// itself yields exact zeros.
pub fn compare_spectra(
    a: &MultifractalSpectrum,
    b: &MultifractalSpectrum,
) -> Result<ComparisonResult> {
    let df_a = max_dimension(a)?;
    let df_b = max_dimension(b)?;
    let curve_a = f_curve(a)?;
    let curve_b = f_curve(b)?;
    let lo = curve_a[0].0.min(curve_b[0].0);
    let hi = curve_a[curve_a.len() - 1]
        .0
        .max(curve_b[curve_b.len() - 1].0);

    let overlay: Vec<OverlayPoint> = (0..OVERLAY_POINTS)
        .map(|i| {
            let t = i as f64 / (OVERLAY_POINTS - 1) as f64;
            let alpha = lo + (hi - lo) * t;
            OverlayPoint {
                alpha,
                f_a: eval_curve(&curve_a, alpha),
                f_b: eval_curve(&curve_b, alpha),
            }
        })
        .collect();

    let linf_f = overlay
        .iter()
        .map(|p| (p.f_a - p.f_b).abs())
        .fold(0.0, f64::max);
    let area_gap: f64 = overlay
        .windows(2)
        .map(|w| {
            let g0 = (w[0].f_a - w[0].f_b).abs();
            let g1 = (w[1].f_a - w[1].f_b).abs();
            0.5 * (g0 + g1) * (w[1].alpha - w[0].alpha)
        })
        .sum();

    Ok(ComparisonResult {
        delta_df: (df_a - df_b).abs(),
        linf_f,
        area_gap,
        shared_alpha_range: (lo, hi),
        overlay,
    })
}

/// One window of a fragment-scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FragmentEntry {
    /// Nominal window area as a fraction of the full image, `2^(−k)`.
    pub area_fraction: f64,
    /// Peak dimension measured inside the window.
    pub d_f: f64,
}

/// Peak dimension versus window size, largest window first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentSeries {
    pub entries: Vec<FragmentEntry>,
}

/// The nested centered windows of a fragment study: level `k` covers an
/// area fraction of `2^(−k)`, with the side scaled by `2^(−k/2)` and
/// rounded to whole pixels.
pub fn centered_windows(width: u32, height: u32, levels: u32) -> Result<Vec<(f64, FragmentRect)>> {
    if levels < 2 {
        return Err(Error::InvalidConfig(format!(
            "a fragment study needs at least 2 levels, got {levels}"
        )));
    }
    Ok((0..levels)
        .map(|k| {
            let fraction = 0.5f64.powi(k as i32);
            let scale = fraction.sqrt();
            let w = ((width as f64 * scale).round() as u32).max(1);
            let h = ((height as f64 * scale).round() as u32).max(1);
            let rect = FragmentRect::new((width - w) / 2, (height - h) / 2, w, h);
            (fraction, rect)
        })
        .collect())
}

/// Analyzes each nested centered window of a fragment study and returns
/// the full spectrum per window, largest first, with its area fraction.
pub fn fragment_spectra(
    img: &GrayscaleImage,
    levels: u32,
    settings: &AnalysisSettings,
) -> Result<Vec<(f64, MultifractalSpectrum)>> {
    let windows = centered_windows(img.width(), img.height(), levels)?;
    windows
        .into_iter()
        .map(|(fraction, rect)| {
            let window = extract_fragment(img, rect)?;
            let spec = analyze_image(&window, settings).map_err(|e| match e {
                Error::ImageTooSmall(reason) => Error::FragmentTooSmall(format!(
                    "window {}x{} at area fraction {fraction}: {reason}",
                    rect.w, rect.h
                )),
                other => other,
            })?;
            Ok((fraction, spec))
        })
        .collect()
}

/// Measures how the peak dimension responds to shrinking the analysis
/// window: `levels` nested centered windows of area fractions `1, 1/2,
/// 1/4, …`, each analyzed with a freshly planned scale series.
///
/// On statistically self-similar structure the series is flat; genuine
/// drift with window size indicates scale-dependent composition.
pub fn fragment_scaling(
    img: &GrayscaleImage,
    levels: u32,
    settings: &AnalysisSettings,
) -> Result<FragmentSeries> {
    let entries = fragment_spectra(img, levels, settings)?
        .iter()
        .map(|(fraction, spec)| {
            Ok(FragmentEntry {
                area_fraction: *fraction,
                d_f: max_dimension(spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FragmentSeries { entries })
}

/// One catalog entry: an image with identifying metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaintingRecord {
    pub id: String,
    pub title: String,
    pub year_label: String,
    pub image_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cm: Option<(f64, f64)>,
}

/// A record after analysis: either a peak dimension or the reason it
/// could not be computed. Per-record failures are carried, not thrown,
/// so one bad image never sinks a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredRecord {
    pub record: PaintingRecord,
    pub d_f: Option<f64>,
    pub error: Option<String>,
}

/// Classification of one record against the order threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderTag {
    /// `D_f` at or above the threshold: near-space-filling.
    Ordered,
    /// `D_f` below the threshold: fractal structure.
    Fractal,
    /// Analysis failed; excluded from group statistics.
    Error,
}

impl OrderTag {
    pub fn name(self) -> &'static str {
        match self {
            OrderTag::Ordered => "ordered",
            OrderTag::Fractal => "fractal",
            OrderTag::Error => "error",
        }
    }
}

/// One line of the order report, in catalog order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderRow {
    /// 1-based position in the catalog.
    pub index: usize,
    pub id: String,
    pub year_label: String,
    pub d_f: Option<f64>,
    pub tag: OrderTag,
}

/// Dimension statistics for one year label, over its scored records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearGroup {
    pub year_label: String,
    /// Records under this label, including failed ones.
    pub count: usize,
    pub min_d_f: Option<f64>,
    pub max_d_f: Option<f64>,
    pub mean_d_f: Option<f64>,
}

/// The order-transition report: the tagged sequence for plotting `D_f`
/// against catalog position, plus per-year summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub threshold: f64,
    pub rows: Vec<OrderRow>,
    pub groups: Vec<YearGroup>,
}

/// Tags each scored record as `ordered` (`D_f ≥ threshold`) or `fractal`
/// and summarizes `D_f` per year label. Groups appear in order of first
/// occurrence, so a catalog sorted chronologically yields a chronological
/// report; records that failed analysis are tagged `error` and excluded
/// from the statistics.
pub fn order_report(records: &[ScoredRecord], threshold: f64) -> Result<OrderReport> {
    if records.is_empty() {
        return Err(Error::EmptyManifest);
    }
    if !threshold.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "order threshold {threshold} is not finite"
        )));
    }

    let rows: Vec<OrderRow> = records
        .iter()
        .enumerate()
        .map(|(i, scored)| {
            let tag = match scored.d_f {
                Some(d_f) if d_f >= threshold => OrderTag::Ordered,
                Some(_) => OrderTag::Fractal,
                None => OrderTag::Error,
            };
            OrderRow {
                index: i + 1,
                id: scored.record.id.clone(),
                year_label: scored.record.year_label.clone(),
                d_f: scored.d_f,
                tag,
            }
        })
        .collect();

    let mut groups: Vec<YearGroup> = Vec::new();
    let mut totals: Vec<(f64, usize)> = Vec::new();
    for scored in records {
        let label = &scored.record.year_label;
        let at = match groups.iter().position(|g| &g.year_label == label) {
            Some(at) => at,
            None => {
                groups.push(YearGroup {
                    year_label: label.clone(),
                    count: 0,
                    min_d_f: None,
                    max_d_f: None,
                    mean_d_f: None,
                });
                totals.push((0.0, 0));
                groups.len() - 1
            }
        };
        groups[at].count += 1;
        if let Some(d_f) = scored.d_f {
            let g = &mut groups[at];
            g.min_d_f = Some(g.min_d_f.map_or(d_f, |m| m.min(d_f)));
            g.max_d_f = Some(g.max_d_f.map_or(d_f, |m| m.max(d_f)));
            totals[at].0 += d_f;
            totals[at].1 += 1;
        }
    }
    for (g, (sum, n)) in groups.iter_mut().zip(totals) {
        if n > 0 {
            g.mean_d_f = Some(sum / n as f64);
        }
    }

    Ok(OrderReport {
        threshold,
        rows,
        groups,
    })
}
