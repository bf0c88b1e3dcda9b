//! Run configuration and input loading for the CLI commands.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{CommonOpts, ModeArg};
use crate::analysis::PaintingRecord;
use crate::boxcount::MeasureMode;
use crate::imaging::{decode_image, GrayscaleImage, ImageFormat};
use crate::pipeline::AnalysisSettings;
use crate::spectrum::QGrid;
use crate::{Error, Result};

/// The protocol parameters of a run, echoed into every JSON output.
///
/// Delivery details — output directory, worker count — are deliberately
/// absent: they never influence the numbers, and leaving them out keeps
/// outputs byte-identical across output locations and thread counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub min_box: u32,
    pub num_scales: u32,
    pub num_offsets: u32,
    pub max_area_fraction: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub measure_mode: ModeArg,
    pub binary_threshold: u8,
    pub order_threshold: f64,
}

impl RunConfig {
    pub fn from_opts(opts: &CommonOpts) -> Self {
        Self {
            min_box: opts.min_box,
            num_scales: opts.num_scales,
            num_offsets: opts.num_offsets,
            max_area_fraction: opts.max_area_fraction,
            q_min: opts.q_min,
            q_max: opts.q_max,
            q_step: opts.q_step,
            measure_mode: opts.mode,
            binary_threshold: opts.binary_threshold,
            order_threshold: opts.order_threshold,
        }
    }

    pub fn mode(&self) -> MeasureMode {
        match self.measure_mode {
            ModeArg::Differential => MeasureMode::Differential,
            ModeArg::Binary => MeasureMode::Binary {
                threshold: self.binary_threshold,
            },
            ModeArg::Mass => MeasureMode::Mass,
        }
    }

    /// Validates the moment range and assembles pipeline settings.
    pub fn settings(&self) -> Result<AnalysisSettings> {
        if !(self.q_min < 0.0 && self.q_max > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "moment range [{}, {}] must extend below 0 and above 1",
                self.q_min, self.q_max
            )));
        }
        let qgrid = QGrid::from_range(self.q_min, self.q_max, self.q_step)?;
        Ok(AnalysisSettings {
            min_box: self.min_box,
            num_scales: self.num_scales,
            num_offsets: self.num_offsets,
            max_area_fraction: self.max_area_fraction,
            qgrid,
            mode: self.mode(),
        })
    }
}

/// Reads and decodes a PNG or JPEG file into a grayscale raster.
pub fn load_image(path: &Path) -> Result<GrayscaleImage> {
    let format = ImageFormat::from_path(path)?;
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    decode_image(&bytes, format)
}

/// Loads a manifest: a JSON array of records with unique ids that are
/// usable as directory names.
pub fn load_manifest(path: &Path) -> Result<Vec<PaintingRecord>> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let records: Vec<PaintingRecord> =
        serde_json::from_slice(&bytes).map_err(|e| Error::MalformedManifest {
            path: path.to_owned(),
            reason: e.to_string(),
        })?;
    if records.is_empty() {
        return Err(Error::EmptyManifest);
    }
    let mut seen = HashSet::new();
    for record in &records {
        let id = record.id.as_str();
        let path_safe =
            !id.is_empty() && id != "." && id != ".." && !id.contains(['/', '\\', '\0']);
        if !path_safe {
            return Err(Error::MalformedManifest {
                path: path.to_owned(),
                reason: format!("record id {id:?} is not usable as a directory name"),
            });
        }
        if !seen.insert(id) {
            return Err(Error::MalformedManifest {
                path: path.to_owned(),
                reason: format!("duplicate record id {id:?}"),
            });
        }
    }
    Ok(records)
}

/// Resolves a record's image path: absolute paths stand, relative paths
/// are taken relative to the manifest's directory.
pub fn resolve_record_path(manifest_path: &Path, record: &PaintingRecord) -> PathBuf {
    let image_path = Path::new(&record.image_path);
    if image_path.is_absolute() {
        image_path.to_owned()
    } else {
        match manifest_path.parent() {
            Some(dir) => dir.join(image_path),
            None => image_path.to_owned(),
        }
    }
}
