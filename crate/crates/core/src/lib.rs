//! Box-counting multifractal analysis for grayscale raster images.
//!
//! The crate estimates generalized box-counting dimensions `D_q` and the
//! singularity spectrum `f(α)` of an image. The pipeline is:
//!
//! 1. [`boxcount::plan_scales`] picks a geometric series of box sizes and a
//!    set of grid offsets.
//! 2. [`boxcount::box_measures`] scans the image at each `(size, offset)`
//!    and produces a normalized box-measure distribution under one of three
//!    measure modes (grayscale differential, binary occupancy, mass).
//! 3. [`spectrum::compute_dq`] and [`spectrum::chhabra_spectrum`] regress
//!    partition sums and direct-estimator moments over `ln` scale to obtain
//!    `τ(q)`, `D_q`, `α(q)`, and `f(q)` with per-regression `r²`.
//! 4. [`spectrum::assemble_spectrum`] averages the per-offset curves.
//!
//! [`analysis`] layers derived studies on top (maximum dimension `D_f`,
//! pairwise spectrum comparison, fragment-scaling series, year-grouped order
//! reports), [`imaging`] provides decoding plus synthetic fixtures with known
//! dimensions, and [`closedform`] evaluates those reference values exactly.
//!
//! ```
//! use multifrac::analysis::max_dimension;
//! use multifrac::boxcount::MeasureMode;
//! use multifrac::imaging::gen_sierpinski_carpet;
//! use multifrac::pipeline::{analyze_image, AnalysisSettings};
//!
//! let carpet = gen_sierpinski_carpet(5)?; // 243×243, dimension ln 8 / ln 3
//! let settings = AnalysisSettings {
//!     min_box: 3,
//!     num_scales: 5,
//!     mode: MeasureMode::binary(),
//!     ..AnalysisSettings::default()
//! };
//! let spectrum = analyze_image(&carpet, &settings)?;
//! let d0 = max_dimension(&spectrum)?;
//! assert!((d0 - 1.8928).abs() < 0.06);
//! # Ok::<(), multifrac::Error>(())
//! ```

use std::path::PathBuf;

pub mod analysis;
pub mod boxcount;
pub mod cli;
pub mod closedform;
pub mod imaging;
pub mod pipeline;
pub mod spectrum;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library and the CLI.
///
/// The CLI maps each variant to a process exit code via
/// [`Error::exit_code`]: `1` for input/parameter errors, `2` for geometry
/// errors (image or fragment too small, bad grid arguments), `3` for
/// comparison domain errors.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    // --- imaging ---
    /// Width/height of zero, or a pixel buffer whose length does not match.
    #[error("invalid image geometry: {width}x{height} with {pixel_count} pixels")]
    BadImageGeometry {
        width: u32,
        height: u32,
        pixel_count: usize,
    },
    /// The byte stream could not be decoded in the stated format.
    #[error("cannot decode {format} data: {reason}")]
    MalformedImage {
        format: &'static str,
        reason: String,
    },
    /// File extension or requested format outside the supported set.
    #[error("unsupported image format: {0} (supported: png, jpeg)")]
    UnsupportedFormat(String),
    /// Image encoding failed (should not happen for valid rasters).
    #[error("cannot encode image: {0}")]
    EncodeFailed(String),
    /// A fragment rectangle reaches outside the source image.
    #[error("fragment at ({x},{y}) size {w}x{h} exceeds {width}x{height} image")]
    OutOfBounds {
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        width: u32,
        height: u32,
    },
    /// Requested carpet level above the supported maximum.
    #[error("carpet level {level} exceeds the maximum of {max}")]
    LevelTooLarge { level: u32, max: u32 },
    /// Requested cascade depth outside the supported range.
    #[error("cascade depth {depth} outside 1..={max}")]
    DepthOutOfRange { depth: u32, max: u32 },
    /// Cascade weights must be non-negative and sum to one.
    #[error("cascade weights {weights:?} must be non-negative and sum to 1")]
    BadWeights { weights: [f64; 4] },
    /// A measure field failed validation (negative cells or sum far from 1).
    #[error("invalid measure field: {0}")]
    InvalidField(String),

    // --- boxcount ---
    /// The image cannot host the requested scale series.
    #[error("image too small: {0}")]
    ImageTooSmall(String),
    /// Box size of zero or larger than the short image side.
    #[error("box size {epsilon} invalid for a {width}x{height} image")]
    BadEpsilon {
        epsilon: u32,
        width: u32,
        height: u32,
    },
    /// Grid offsets must stay below the box size.
    #[error("grid offset ({dx},{dy}) must be smaller than box size {epsilon}")]
    BadOffset { dx: u32, dy: u32, epsilon: u32 },
    /// Field scans require the block size to divide the field side.
    #[error("block size {epsilon_cells} does not divide field side {side}")]
    NonDividingEpsilon { epsilon_cells: u32, side: u32 },
    /// Every box measure came out zero, so no distribution exists.
    #[error("no occupied boxes: the measure is zero everywhere")]
    EmptyMeasure,

    // --- spectrum ---
    /// Regressions need a minimum number of scales.
    #[error("need at least {min} scales for regression, got {got}")]
    TooFewScales { got: usize, min: usize },
    /// Distributions passed to one regression must share a grid offset.
    #[error("distributions mix grid offsets ({0},{1}) and ({2},{3})")]
    MixedOffsets(u32, u32, u32, u32),
    /// Zero variance on the regression abscissa.
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
    /// Per-offset results disagree on the q grid.
    #[error("offset results use different q grids")]
    MismatchedGrids,
    /// The q grid failed validation.
    #[error("invalid q grid: {0}")]
    InvalidQGrid(String),

    // --- analysis ---
    /// The spectrum lacks a q = 0 point.
    #[error("spectrum has no q = 0 point")]
    MissingQZero,
    /// The two spectra span no usable common α interval.
    #[error("spectra share no alpha range")]
    NoSharedAlphaRange,
    /// A fragment window is too small for a valid scale plan.
    #[error("fragment too small: {0}")]
    FragmentTooSmall(String),
    /// The manifest contains no records.
    #[error("manifest contains no records")]
    EmptyManifest,

    // --- configuration and I/O ---
    /// Invalid option value or option combination.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Filesystem failure, tagged with the path involved.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// The manifest file exists but cannot be parsed or validated.
    #[error("malformed manifest {}: {reason}", path.display())]
    MalformedManifest { path: PathBuf, reason: String },
    /// Every record in a batch failed.
    #[error("all {failures} manifest records failed to analyze")]
    BatchFailed { failures: usize },
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            // Geometry: the input image cannot host the requested grid.
            Error::ImageTooSmall(_)
            | Error::FragmentTooSmall(_)
            | Error::BadEpsilon { .. }
            | Error::BadOffset { .. }
            | Error::OutOfBounds { .. }
            | Error::NonDividingEpsilon { .. }
            | Error::EmptyMeasure
            | Error::TooFewScales { .. } => 2,
            // Comparison domain.
            Error::NoSharedAlphaRange => 3,
            // Everything else is an input or parameter error.
            _ => 1,
        }
    }
}
