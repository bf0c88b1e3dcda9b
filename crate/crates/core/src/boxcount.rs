//! Scale planning and grid-offset box scanning.
//!
//! A [`ScalePlan`] fixes the geometric series of box sizes and the set of
//! grid origins; [`box_measures`] scans an image at one `(size, offset)`
//! and yields the normalized measure distribution the spectrum regressions
//! consume. Grids are anchored at `(−dx, −dy)`, so boxes clip at all four
//! image borders and partial boxes are kept — non-square inputs need no
//! cropping.
//!
//! Besides the planned box size, every distribution records the *effective*
//! scale `sqrt(W·H / (nx·ny))` of its grid. When boxes tile the image
//! exactly the two coincide; when the grid clips at the borders the
//! effective scale is what the covering actually realized, and regressing
//! against it removes the bias that rounded-up box columns and rows would
//! otherwise inject into the log–log fits.

use crate::imaging::{GrayscaleImage, MeasureField};
use crate::{Error, Result};

/// Default smallest box side, in pixels.
pub const DEFAULT_MIN_BOX: u32 = 30;
/// Default number of entries in the scale series.
pub const DEFAULT_NUM_SCALES: u32 = 10;
/// Default number of grid offsets.
pub const DEFAULT_NUM_OFFSETS: u32 = 4;
/// Default cap on the largest box as a fraction of the short image side.
pub const DEFAULT_MAX_AREA_FRACTION: f64 = 1.0;
/// Default foreground threshold for the binary measure.
pub const DEFAULT_BINARY_THRESHOLD: u8 = 128;
/// Minimum number of scales any regression accepts.
pub const MIN_REGRESSION_SCALES: usize = 5;
/// The largest box must exceed the smallest by this many doublings, so the
/// regression spans a usable range of scales rather than a cluster of
/// nearly equal sizes.
pub const SCALE_SPAN_OCTAVES: u32 = 4;

/// How a box's raw measure is read off its pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureMode {
    /// Grayscale differential: `max − min + 1` over the box. The `+1`
    /// keeps flat boxes occupied, so the whole canvas participates.
    #[default]
    Differential,
    /// Binary occupancy: 1 if any pixel is at or above `threshold`.
    Binary { threshold: u8 },
    /// Mass: sum of intensities.
    Mass,
}

impl MeasureMode {
    /// Binary mode at the default threshold.
    pub fn binary() -> Self {
        Self::Binary {
            threshold: DEFAULT_BINARY_THRESHOLD,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Differential => "differential",
            Self::Binary { .. } => "binary",
            Self::Mass => "mass",
        }
    }
}

/// The box sizes and grid origins one analysis scans.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalePlan {
    sizes: Vec<u32>,
    base_size: u32,
    offsets: Vec<(u32, u32)>,
    max_area_fraction: f64,
}

impl ScalePlan {
    /// Strictly increasing box sides, in pixels.
    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// The reference scale ε₀ — the largest planned size.
    pub fn base_size(&self) -> u32 {
        self.base_size
    }

    /// Smallest planned size.
    pub fn min_size(&self) -> u32 {
        self.sizes[0]
    }

    /// Grid origins `(dx, dy)`; the grid is anchored at `(−dx, −dy)`.
    pub fn offsets(&self) -> &[(u32, u32)] {
        &self.offsets
    }

    pub fn max_area_fraction(&self) -> f64 {
        self.max_area_fraction
    }
}

/// Plans a geometric scale series and offset set for a `width × height`
/// image.
///
/// Sizes run from `min_box` to `floor(min(width, height) ×
/// max_area_fraction)` in `num_scales` geometric steps, deduplicated after
/// rounding. The image must allow the series to span
/// [`SCALE_SPAN_OCTAVES`] doublings of `min_box`; images without that much
/// room are rejected as too small to regress on.
///
/// Offsets are laid out on a `⌈√n⌉ × ⌈√n⌉` sub-grid of quarter shifts of
/// `min_box`: for the default `num_offsets = 4` they are `(0,0)`,
/// `(min_box/2, 0)`, `(0, min_box/2)`, `(min_box/2, min_box/2)`.
pub fn plan_scales(
    width: u32,
    height: u32,
    min_box: u32,
    num_scales: u32,
    num_offsets: u32,
    max_area_fraction: f64,
) -> Result<ScalePlan> {
    if min_box < 2 {
        return Err(Error::InvalidConfig(format!(
            "min_box must be at least 2, got {min_box}"
        )));
    }
    if num_scales < MIN_REGRESSION_SCALES as u32 {
        return Err(Error::InvalidConfig(format!(
            "num_scales must be at least {MIN_REGRESSION_SCALES}, got {num_scales}"
        )));
    }
    if num_offsets == 0 {
        return Err(Error::InvalidConfig("num_offsets must be positive".into()));
    }
    if !(max_area_fraction > 0.0 && max_area_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "max_area_fraction must be in (0, 1], got {max_area_fraction}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::BadImageGeometry {
            width,
            height,
            pixel_count: 0,
        });
    }

    let short_side = width.min(height);
    let limit = (f64::from(short_side) * max_area_fraction).floor() as u32;
    let required = min_box << SCALE_SPAN_OCTAVES;
    if limit < required {
        return Err(Error::ImageTooSmall(format!(
            "largest usable box is {limit}px but a {min_box}px minimum box needs \
             {required}px ({SCALE_SPAN_OCTAVES} doublings) for a usable scale range"
        )));
    }

    let ratio = (f64::from(limit) / f64::from(min_box)).powf(1.0 / f64::from(num_scales - 1));
    let mut sizes = vec![min_box];
    for i in 1..num_scales - 1 {
        sizes.push((f64::from(min_box) * ratio.powi(i as i32)).round() as u32);
    }
    sizes.push(limit);
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < MIN_REGRESSION_SCALES {
        return Err(Error::ImageTooSmall(format!(
            "only {} distinct box sizes fit between {min_box}px and {limit}px; \
             regression needs {MIN_REGRESSION_SCALES}",
            sizes.len()
        )));
    }

    // Quarter-shift offsets on a ⌈√n⌉-per-side sub-grid, row by row.
    let per_side = (f64::from(num_offsets)).sqrt().ceil() as u32;
    let step = min_box / per_side;
    let mut offsets = Vec::with_capacity(num_offsets as usize);
    'grid: for j in 0..per_side {
        for i in 0..per_side {
            if offsets.len() == num_offsets as usize {
                break 'grid;
            }
            let candidate = (i * step, j * step);
            if !offsets.contains(&candidate) {
                offsets.push(candidate);
            }
        }
    }

    Ok(ScalePlan {
        base_size: limit,
        sizes,
        offsets,
        max_area_fraction,
    })
}

/// Normalized box probabilities at one `(size, offset)`.
///
/// Only occupied boxes are kept: every probability is positive and the
/// vector sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDistribution {
    epsilon: u32,
    offset: (u32, u32),
    effective_scale: f64,
    probabilities: Vec<f64>,
    box_count: usize,
}

impl MeasureDistribution {
    /// Normalizes raw real-valued box measures into a distribution,
    /// dropping zero boxes. The effective scale defaults to `epsilon`.
    pub fn new(epsilon: u32, offset: (u32, u32), raw_measures: &[f64]) -> Result<Self> {
        if raw_measures.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidConfig(
                "box measures must be finite and non-negative".into(),
            ));
        }
        let total: f64 = raw_measures.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyMeasure);
        }
        let probabilities: Vec<f64> = raw_measures
            .iter()
            .filter(|m| **m > 0.0)
            .map(|m| m / total)
            .collect();
        Ok(Self {
            epsilon,
            offset,
            effective_scale: f64::from(epsilon),
            probabilities,
            box_count: 0,
        }
        .with_count())
    }

    /// As [`MeasureDistribution::new`] but from exact integer measures
    /// (the image scan paths), normalized by the exact integer total.
    fn from_integer_measures(
        epsilon: u32,
        offset: (u32, u32),
        effective_scale: f64,
        raw_measures: &[u64],
    ) -> Result<Self> {
        let total: u64 = raw_measures.iter().sum();
        if total == 0 {
            return Err(Error::EmptyMeasure);
        }
        let divisor = total as f64;
        let probabilities: Vec<f64> = raw_measures
            .iter()
            .filter(|m| **m > 0)
            .map(|m| *m as f64 / divisor)
            .collect();
        Ok(Self {
            epsilon,
            offset,
            effective_scale,
            probabilities,
            box_count: 0,
        }
        .with_count())
    }

    fn with_count(mut self) -> Self {
        self.box_count = self.probabilities.len();
        self
    }

    fn with_effective_scale(mut self, effective_scale: f64) -> Self {
        self.effective_scale = effective_scale;
        self
    }

    /// The planned box side, in pixels (or cells for field scans).
    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }

    /// The grid origin shift this scan used.
    pub fn offset(&self) -> (u32, u32) {
        self.offset
    }

    /// Geometric mean box side realized by the clipped grid:
    /// `sqrt(W·H / (nx·ny))`. Equals [`Self::epsilon`] whenever the boxes
    /// tile the image exactly.
    pub fn effective_scale(&self) -> f64 {
        self.effective_scale
    }

    /// Probabilities over occupied boxes; positive, summing to 1.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Number of occupied boxes N(ε).
    pub fn box_count(&self) -> usize {
        self.box_count
    }
}

/// Walks the image once in row order, reporting each pixel to `visit`
/// together with its grid box index. The grid is anchored at
/// `(−dx, −dy)` with `nx` box columns.
fn scan_grid(
    img: &GrayscaleImage,
    epsilon: u32,
    (dx, dy): (u32, u32),
    nx: u32,
    mut visit: impl FnMut(usize, u8),
) {
    let width = img.width();
    for y in 0..img.height() {
        let box_row_base = (((y + dy) / epsilon) * nx) as usize;
        let row = img.row(y);
        let mut x = 0u32;
        let mut box_col = 0usize;
        let mut segment_end = epsilon - dx;
        while x < width {
            let end = segment_end.min(width);
            let index = box_row_base + box_col;
            for &value in &row[x as usize..end as usize] {
                visit(index, value);
            }
            x = end;
            box_col += 1;
            segment_end += epsilon;
        }
    }
}

/// Scans `img` with boxes of side `epsilon` on the grid anchored at
/// `(−dx, −dy)` and returns the normalized measure distribution under
/// `mode`. Boxes whose raw measure is zero are dropped.
pub fn box_measures(
    img: &GrayscaleImage,
    epsilon: u32,
    offset: (u32, u32),
    mode: MeasureMode,
) -> Result<MeasureDistribution> {
    let (width, height) = (img.width(), img.height());
    if epsilon == 0 || epsilon > img.min_side() {
        return Err(Error::BadEpsilon {
            epsilon,
            width,
            height,
        });
    }
    let (dx, dy) = offset;
    if dx >= epsilon || dy >= epsilon {
        return Err(Error::BadOffset { dx, dy, epsilon });
    }

    let nx = (width + dx).div_ceil(epsilon);
    let ny = (height + dy).div_ceil(epsilon);
    let boxes = (nx as usize) * (ny as usize);

    let measures: Vec<u64> = match mode {
        MeasureMode::Differential => {
            let mut lo = vec![u8::MAX; boxes];
            let mut hi = vec![u8::MIN; boxes];
            scan_grid(img, epsilon, offset, nx, |i, v| {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            });
            lo.iter()
                .zip(&hi)
                .map(|(l, h)| if h >= l { u64::from(h - l) + 1 } else { 0 })
                .collect()
        }
        MeasureMode::Binary { threshold } => {
            let mut occupied = vec![false; boxes];
            scan_grid(img, epsilon, offset, nx, |i, v| {
                occupied[i] |= v >= threshold;
            });
            occupied.iter().map(|o| u64::from(*o)).collect()
        }
        MeasureMode::Mass => {
            let mut sums = vec![0u64; boxes];
            scan_grid(img, epsilon, offset, nx, |i, v| {
                sums[i] += u64::from(v);
            });
            sums
        }
    };

    let effective_scale =
        ((f64::from(width) * f64::from(height)) / (f64::from(nx) * f64::from(ny))).sqrt();
    MeasureDistribution::from_integer_measures(epsilon, offset, effective_scale, &measures)
}

/// Coarse-grains a measure field into `epsilon_cells × epsilon_cells`
/// blocks and returns the block-sum distribution. The block size must
/// divide the field side, so the partition is exact and the effective
/// scale equals the block size.
pub fn field_measures(field: &MeasureField, epsilon_cells: u32) -> Result<MeasureDistribution> {
    let side = field.side();
    if epsilon_cells == 0 || !side.is_multiple_of(epsilon_cells) {
        return Err(Error::NonDividingEpsilon {
            epsilon_cells,
            side,
        });
    }
    let blocks_per_side = (side / epsilon_cells) as usize;
    let mut sums = vec![0.0f64; blocks_per_side * blocks_per_side];
    let eps = epsilon_cells as usize;
    let side = side as usize;
    for y in 0..side {
        let block_row_base = (y / eps) * blocks_per_side;
        let row = &field.values()[y * side..(y + 1) * side];
        for block_col in 0..blocks_per_side {
            let cell_sum: f64 = row[block_col * eps..(block_col + 1) * eps].iter().sum();
            sums[block_row_base + block_col] += cell_sum;
        }
    }
    Ok(MeasureDistribution::new(epsilon_cells, (0, 0), &sums)?
        .with_effective_scale(f64::from(epsilon_cells)))
}
