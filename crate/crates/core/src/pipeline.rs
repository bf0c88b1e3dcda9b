//! End-to-end spectrum computation: plan scales, scan the image at every
//! (offset, box size) pair, regress per offset, and assemble.
//!
//! Grid scans are the dominant cost and run in parallel; every reduction
//! afterwards is sequential over sorted inputs, so the result is
//! bit-identical for any worker count.

use rayon::prelude::*;

use crate::boxcount::{
    box_measures, field_measures, plan_scales, MeasureDistribution, MeasureMode, ScalePlan,
    DEFAULT_MAX_AREA_FRACTION, DEFAULT_MIN_BOX, DEFAULT_NUM_OFFSETS, DEFAULT_NUM_SCALES,
    MIN_REGRESSION_SCALES,
};
use crate::imaging::{GrayscaleImage, MeasureField};
use crate::spectrum::{
    assemble_spectrum, chhabra_spectrum, combine_points, compute_dq, MultifractalSpectrum,
    OffsetSpectrum, QGrid,
};
use crate::{Error, Result};

/// Everything that parameterizes a spectrum run on an image.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    /// Smallest box side in pixels.
    pub min_box: u32,
    /// Number of box sizes in the geometric scale series.
    pub num_scales: u32,
    /// Number of grid offsets to average over.
    pub num_offsets: u32,
    /// Cap on the largest box as a fraction of the short image side.
    pub max_area_fraction: f64,
    /// Moment orders to evaluate.
    pub qgrid: QGrid,
    /// How a box's measure is read from the pixels.
    pub mode: MeasureMode,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            min_box: DEFAULT_MIN_BOX,
            num_scales: DEFAULT_NUM_SCALES,
            num_offsets: DEFAULT_NUM_OFFSETS,
            max_area_fraction: DEFAULT_MAX_AREA_FRACTION,
            qgrid: QGrid::default(),
            mode: MeasureMode::default(),
        }
    }
}

impl AnalysisSettings {
    /// The scale plan these settings produce for an image of the given
    /// dimensions.
    pub fn plan(&self, width: u32, height: u32) -> Result<ScalePlan> {
        plan_scales(
            width,
            height,
            self.min_box,
            self.num_scales,
            self.num_offsets,
            self.max_area_fraction,
        )
    }
}

/// Computes the multifractal spectrum of an image: plans the scale series
/// from the image dimensions, then runs [`analyze_planned`].
pub fn analyze_image(
    img: &GrayscaleImage,
    settings: &AnalysisSettings,
) -> Result<MultifractalSpectrum> {
    let plan = settings.plan(img.width(), img.height())?;
    analyze_planned(img, &plan, &settings.qgrid, settings.mode)
}

/// Computes the multifractal spectrum of an image over an explicit scale
/// plan.
///
/// Scans all (offset, box size) pairs in parallel, then per offset
/// regresses the generalized dimensions and the direct spectrum against
/// the effective scales, and averages the offsets into the final curve.
/// The reference scale ε₀ is the plan's base size.
pub fn analyze_planned(
    img: &GrayscaleImage,
    plan: &ScalePlan,
    qgrid: &QGrid,
    mode: MeasureMode,
) -> Result<MultifractalSpectrum> {
    let sizes = plan.sizes();
    let tasks: Vec<((u32, u32), u32)> = plan
        .offsets()
        .iter()
        .flat_map(|&offset| sizes.iter().map(move |&size| (offset, size)))
        .collect();
    let scans: Vec<Result<MeasureDistribution>> = tasks
        .par_iter()
        .map(|&(offset, size)| box_measures(img, size, offset, mode))
        .collect();
    let mut dists = Vec::with_capacity(scans.len());
    for scan in scans {
        dists.push(scan?);
    }

    let base = plan.base_size() as f64;
    let per_offset = dists
        .chunks(sizes.len())
        .map(|series| {
            let dq = compute_dq(series, qgrid, base)?;
            let ch = chhabra_spectrum(series, qgrid, base)?;
            Ok(OffsetSpectrum {
                offset: series[0].offset(),
                points: combine_points(&dq, &ch)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    assemble_spectrum(per_offset, (plan.min_size(), plan.base_size()))
}

/// Computes the multifractal spectrum of a synthetic measure field at the
/// given box sizes (in cells).
///
/// Sizes are deduplicated and sorted; each must divide the field side.
/// The field is exact, so no offset averaging is done: the origin-aligned
/// grid already tiles it perfectly.
pub fn analyze_field(
    field: &MeasureField,
    sizes: &[u32],
    qgrid: &QGrid,
) -> Result<MultifractalSpectrum> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < MIN_REGRESSION_SCALES {
        return Err(Error::TooFewScales {
            got: sizes.len(),
            min: MIN_REGRESSION_SCALES,
        });
    }
    let dists: Vec<MeasureDistribution> = sizes
        .iter()
        .map(|&size| field_measures(field, size))
        .collect::<Result<Vec<_>>>()?;
    let base = *sizes.last().expect("checked non-empty") as f64;
    let dq = compute_dq(&dists, qgrid, base)?;
    let ch = chhabra_spectrum(&dists, qgrid, base)?;
    let per_offset = vec![OffsetSpectrum {
        offset: (0, 0),
        points: combine_points(&dq, &ch)?,
    }];
    assemble_spectrum(per_offset, (sizes[0], *sizes.last().unwrap()))
}
