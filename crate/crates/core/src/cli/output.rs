//! Number formatting and the CSV/JSON writers behind the commands.
//!
//! CSV values are printed at six significant digits with trailing zeros
//! stripped; JSON keeps full precision. Row order is fixed by the q grid
//! and input order, so identical runs serialize byte-identically.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use crate::analysis::{max_dimension, ComparisonResult, FragmentSeries, OrderReport};
use crate::boxcount::ScalePlan;
use crate::imaging::GrayscaleImage;
use crate::spectrum::{left_side, MultifractalSpectrum};
use crate::{Error, Result};

/// Significant digits for every number in CSV output.
const CSV_SIG_DIGITS: usize = 6;

/// Formats a float at [`CSV_SIG_DIGITS`] significant digits, dropping
/// trailing zeros; falls back to scientific notation outside a readable
/// magnitude window.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let scientific = format!("{:.*e}", CSV_SIG_DIGITS - 1, x);
    let (mantissa, exponent) = scientific.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    if (-4..CSV_SIG_DIGITS as i32).contains(&exponent) {
        let decimals = (CSV_SIG_DIGITS as i32 - 1 - exponent).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", strip_zeros(mantissa.to_string()))
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// In-memory CSV builder saved in one write, so files are never left
/// half-written and identical content means identical bytes.
struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    fn new() -> Self {
        Self {
            writer: csv::Writer::from_writer(Vec::new()),
        }
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .expect("in-memory CSV writes cannot fail");
    }

    fn save(self, path: &Path) -> Result<()> {
        let bytes = self
            .writer
            .into_inner()
            .expect("in-memory CSV writes cannot fail");
        write_file(path, &bytes)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_owned(),
        source,
    })
}

/// Name and version stamp in every JSON output.
#[derive(Debug, Serialize)]
struct ToolMeta {
    name: &'static str,
    version: &'static str,
}

impl ToolMeta {
    fn current() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The analyzed raster as recorded in JSON outputs.
#[derive(Debug, Clone, Serialize)]
pub struct ImageMeta {
    pub path: String,
    pub width: u32,
    pub height: u32,
}

impl ImageMeta {
    pub fn new(path: &Path, img: &GrayscaleImage) -> Self {
        Self {
            path: path.display().to_string(),
            width: img.width(),
            height: img.height(),
        }
    }
}

/// Fixed methodological conventions, stated in every spectrum document so
/// results remain interpretable away from this repository.
const METHODOLOGY: [&str; 7] = [
    "color input is composited over white, then reduced to luma with Rec. 601 weights (0.299, 0.587, 0.114)",
    "the full raster is analyzed; no foreground masking is applied",
    "box sizes follow a geometric series from min_box up to the short image side capped by max_area_fraction",
    "partially covered edge boxes count; each grid regresses against its effective scale sqrt(W*H/(nx*ny))",
    "ln-ln regressions use the largest planned box size as the reference scale",
    "grid offsets sample a sub-lattice of the smallest box; reported curves average the per-offset spectra",
    "q = 1 uses the entropy-form estimator; every other q uses the moment partition sum",
];

#[derive(Serialize)]
struct SpectrumDocument<'a> {
    tool: ToolMeta,
    config: &'a RunConfig,
    image: &'a ImageMeta,
    methodology: [&'static str; 7],
    box_sizes: &'a [u32],
    offsets: &'a [(u32, u32)],
    d_f: f64,
    spectrum: &'a MultifractalSpectrum,
}

/// Writes one spectrum set: `spectrum.csv`, `leftside.csv`, and
/// `spectrum.json` under `dir`.
pub fn write_spectrum_set(
    dir: &Path,
    image: &ImageMeta,
    config: &RunConfig,
    plan: &ScalePlan,
    spectrum: &MultifractalSpectrum,
) -> Result<()> {
    create_dir(dir)?;

    let mut csv = Csv::new();
    csv.row([
        "q", "tau", "d_q", "alpha", "f_alpha", "r2_tau", "r2_alpha", "r2_f", "d_q_std",
    ]);
    for (point, spread) in spectrum.points.iter().zip(&spectrum.spread) {
        csv.row([
            fmt_sig(point.q),
            fmt_sig(point.tau),
            fmt_sig(point.d_q),
            fmt_sig(point.alpha),
            fmt_sig(point.f_alpha),
            fmt_sig(point.r2_tau),
            fmt_sig(point.r2_alpha),
            fmt_sig(point.r2_f),
            fmt_sig(spread.d_q),
        ]);
    }
    csv.save(&dir.join("spectrum.csv"))?;

    let mut csv = Csv::new();
    csv.row(["alpha", "f_alpha"]);
    for point in left_side(spectrum) {
        csv.row([fmt_sig(point.alpha), fmt_sig(point.f_alpha)]);
    }
    csv.save(&dir.join("leftside.csv"))?;

    let document = SpectrumDocument {
        tool: ToolMeta::current(),
        config,
        image,
        methodology: METHODOLOGY,
        box_sizes: plan.sizes(),
        offsets: plan.offsets(),
        d_f: max_dimension(spectrum)?,
        spectrum,
    };
    save_json(&dir.join("spectrum.json"), &document)
}

#[derive(Serialize)]
struct CompareDocument<'a> {
    tool: ToolMeta,
    config: &'a RunConfig,
    image_a: &'a ImageMeta,
    image_b: &'a ImageMeta,
    d_f_a: f64,
    d_f_b: f64,
    comparison: &'a ComparisonResult,
}

/// Writes `compare.json` and `overlay.csv` under `dir`.
pub fn write_comparison(
    dir: &Path,
    config: &RunConfig,
    image_a: &ImageMeta,
    image_b: &ImageMeta,
    d_f_a: f64,
    d_f_b: f64,
    comparison: &ComparisonResult,
) -> Result<()> {
    create_dir(dir)?;

    let mut csv = Csv::new();
    csv.row(["alpha", "f_a", "f_b"]);
    for point in &comparison.overlay {
        csv.row([fmt_sig(point.alpha), fmt_sig(point.f_a), fmt_sig(point.f_b)]);
    }
    csv.save(&dir.join("overlay.csv"))?;

    let document = CompareDocument {
        tool: ToolMeta::current(),
        config,
        image_a,
        image_b,
        d_f_a,
        d_f_b,
        comparison,
    };
    save_json(&dir.join("compare.json"), &document)
}

/// Writes `fragments.csv` under `dir`.
pub fn write_fragments(dir: &Path, series: &FragmentSeries) -> Result<()> {
    create_dir(dir)?;
    let mut csv = Csv::new();
    csv.row(["area_fraction", "d_f"]);
    for entry in &series.entries {
        csv.row([fmt_sig(entry.area_fraction), fmt_sig(entry.d_f)]);
    }
    csv.save(&dir.join("fragments.csv"))
}

#[derive(Serialize)]
struct OrderDocument<'a> {
    tool: ToolMeta,
    config: &'a RunConfig,
    manifest: String,
    report: &'a OrderReport,
}

/// Writes `order_report.csv` and `order_report.json` under `dir`.
pub fn write_order_report(
    dir: &Path,
    config: &RunConfig,
    manifest: &Path,
    report: &OrderReport,
) -> Result<()> {
    create_dir(dir)?;

    let mut csv = Csv::new();
    csv.row(["index", "id", "year_label", "d_f", "tag"]);
    for row in &report.rows {
        csv.row([
            row.index.to_string(),
            row.id.clone(),
            row.year_label.clone(),
            row.d_f.map(fmt_sig).unwrap_or_default(),
            row.tag.name().to_string(),
        ]);
    }
    csv.save(&dir.join("order_report.csv"))?;

    let document = OrderDocument {
        tool: ToolMeta::current(),
        config,
        manifest: manifest.display().to_string(),
        report,
    };
    save_json(&dir.join("order_report.json"), &document)
}

/// Writes a fixture image plus its JSON sidecar.
pub fn write_fixture<T: Serialize>(dir: &Path, stem: &str, png: &[u8], sidecar: &T) -> Result<()> {
    create_dir(dir)?;
    write_file(&dir.join(format!("{stem}.png")), png)?;
    save_json(&dir.join(format!("{stem}.json")), sidecar)
}
