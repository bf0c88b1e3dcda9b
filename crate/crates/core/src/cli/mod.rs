//! Command-line front end: argument parsing, batch manifests, and
//! serialization of spectra, comparisons, fragment series, and order
//! reports to CSV and JSON.
//!
//! Exit codes: 0 on success, 1 for input and parameter errors, 2 for
//! geometry errors (image or window too small for the requested scale
//! plan), 3 when two spectra cannot be compared.

mod commands;
mod config;
mod output;

pub use commands::run;
pub use config::{load_image, load_manifest, resolve_record_path, RunConfig};
pub use output::fmt_sig;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{DEFAULT_FRAGMENT_LEVELS, DEFAULT_ORDER_THRESHOLD};
use crate::boxcount::{
    DEFAULT_BINARY_THRESHOLD, DEFAULT_MAX_AREA_FRACTION, DEFAULT_MIN_BOX, DEFAULT_NUM_OFFSETS,
    DEFAULT_NUM_SCALES,
};

/// Box-counting dimensions and multifractal spectra of grayscale images.
#[derive(Debug, Parser)]
#[command(name = "multifrac", version, about)]
pub struct Cli {
    /// Worker threads for grid scans (0 = one per core)
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the multifractal spectrum of one image
    Analyze {
        /// PNG or JPEG image
        image: PathBuf,

        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Analyze every record of a JSON manifest and report the order transition
    Batch {
        /// JSON array of {id, title, year_label, image_path, size_cm?} records
        manifest: PathBuf,

        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Compare the singularity spectra of two images
    Compare {
        /// First image
        image_a: PathBuf,
        /// Second image
        image_b: PathBuf,

        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Track the peak dimension over nested centered windows of one image
    Fragments {
        /// PNG or JPEG image
        image: PathBuf,

        /// Number of windows; each level halves the window area
        #[arg(long, default_value_t = DEFAULT_FRAGMENT_LEVELS, value_name = "N")]
        levels: u32,

        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Generate fixture images with known dimensions
    Synth {
        #[command(subcommand)]
        fixture: SynthCommand,
    },
}

/// Analysis options shared by the image-consuming commands.
#[derive(Debug, Args)]
pub struct CommonOpts {
    /// Smallest box side in pixels
    #[arg(long, default_value_t = DEFAULT_MIN_BOX, value_name = "N")]
    pub min_box: u32,

    /// Number of box sizes in the geometric scale series
    #[arg(long = "scales", default_value_t = DEFAULT_NUM_SCALES, value_name = "N")]
    pub num_scales: u32,

    /// Number of grid offsets averaged per scale
    #[arg(long = "offsets", default_value_t = DEFAULT_NUM_OFFSETS, value_name = "N")]
    pub num_offsets: u32,

    /// Largest box as a fraction of the short image side
    #[arg(long = "max-area", default_value_t = DEFAULT_MAX_AREA_FRACTION, value_name = "X")]
    pub max_area_fraction: f64,

    /// Lowest moment order (must be negative)
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true, value_name = "X")]
    pub q_min: f64,

    /// Highest moment order (must exceed 1)
    #[arg(long, default_value_t = 10.0, value_name = "X")]
    pub q_max: f64,

    /// Moment-order step; the grid must land exactly on q = 0 and q = 1
    #[arg(long, default_value_t = 0.25, value_name = "X")]
    pub q_step: f64,

    /// How a box's measure is read from its pixels
    #[arg(long, value_enum, default_value_t = ModeArg::Differential)]
    pub mode: ModeArg,

    /// Foreground cutoff for binary mode (a pixel at or above it counts)
    #[arg(long, default_value_t = DEFAULT_BINARY_THRESHOLD, value_name = "N")]
    pub binary_threshold: u8,

    /// Peak dimension at or above which a record is tagged ordered
    #[arg(long, default_value_t = DEFAULT_ORDER_THRESHOLD, value_name = "X")]
    pub order_threshold: f64,

    /// Directory the output files are written into
    #[arg(long = "out", default_value = "out", value_name = "DIR")]
    pub out: PathBuf,
}

/// Measure mode as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    /// Intensity range per box: max − min + 1
    Differential,
    /// Occupancy against the binary threshold
    Binary,
    /// Sum of intensities per box
    Mass,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Sierpiński carpet: side 3^level, foreground 255 on black
    Carpet {
        /// Recursion depth; side is 3^level
        #[arg(long, default_value_t = 6, value_name = "N")]
        level: u32,

        /// Directory the image and sidecar are written into
        #[arg(long = "out", default_value = "out", value_name = "DIR")]
        out: PathBuf,
    },
    /// Binomial multiplicative cascade rendered to grayscale: side 2^depth
    Cascade {
        /// Recursion depth; side is 2^depth
        #[arg(long, default_value_t = 8, value_name = "N")]
        depth: u32,

        /// Quadrant weights (NW, NE, SW, SE), comma separated, summing to 1
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_values_t = vec![0.4, 0.3, 0.2, 0.1],
            value_name = "W"
        )]
        weights: Vec<f64>,

        /// Sample depth of the rendered PNG
        #[arg(long, value_enum, default_value_t = BitDepthArg::Sixteen)]
        bit_depth: BitDepthArg,

        /// Directory the image and sidecar are written into
        #[arg(long = "out", default_value = "out", value_name = "DIR")]
        out: PathBuf,
    },
    /// Uniform all-255 square
    Square {
        /// Side length in pixels
        #[arg(long, default_value_t = 512, value_name = "N")]
        side: u32,

        /// Directory the image and sidecar are written into
        #[arg(long = "out", default_value = "out", value_name = "DIR")]
        out: PathBuf,
    },
    /// Seeded uniform pixel noise
    Noise {
        /// Side length in pixels
        #[arg(long, default_value_t = 512, value_name = "N")]
        side: u32,

        /// RNG seed; equal seeds reproduce the image exactly
        #[arg(long, default_value_t = 0, value_name = "N")]
        seed: u64,

        /// Directory the image and sidecar are written into
        #[arg(long = "out", default_value = "out", value_name = "DIR")]
        out: PathBuf,
    },
}

/// PNG sample depth as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitDepthArg {
    #[value(name = "8")]
    Eight,
    #[value(name = "16")]
    Sixteen,
}

/// An error and its source chain on one line, for terminal diagnostics.
pub fn error_chain(err: &crate::Error) -> String {
    let mut text = err.to_string();
    let mut source = std::error::Error::source(err);
    while let Some(cause) = source {
        let cause_text = cause.to_string();
        if !text.contains(&cause_text) {
            text.push_str(": ");
            text.push_str(&cause_text);
        }
        source = cause.source();
    }
    text
}
