//! Image decoding, fragment extraction, and synthetic fixture generators.
//!
//! Everything downstream consumes [`GrayscaleImage`], an 8-bit row-major
//! intensity raster. Color inputs are reduced with Rec. 601 luma after
//! compositing any alpha over white. [`MeasureField`] carries exact
//! real-valued measures for the cascade fixture, bypassing 8-bit
//! quantization so estimator tests can demand tight tolerances.

use std::io::Cursor;
use std::path::Path;

use image::ImageEncoder;

use crate::{Error, Result};

/// Largest supported Sierpiński carpet level (side `3^7 = 2187`).
pub const MAX_CARPET_LEVEL: u32 = 7;
/// Largest supported cascade depth (side `2^10 = 1024`).
pub const MAX_CASCADE_DEPTH: u32 = 10;

/// An 8-bit grayscale raster, row-major, the universal analysis input.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayscaleImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for GrayscaleImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrayscaleImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl GrayscaleImage {
    /// Builds an image, enforcing non-zero dimensions and a matching buffer.
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != (width as usize) * (height as usize) {
            return Err(Error::BadImageGeometry {
                width,
                height,
                pixel_count: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A constant-intensity image.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            vec![value; (width as usize) * (height as usize)],
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Length of the shorter side, the bound on usable box sizes.
    pub fn min_side(&self) -> u32 {
        self.width.min(self.height)
    }

    /// The full row-major pixel buffer.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Intensity at `(x, y)`. Panics outside the image (debug-checked
    /// indexing into the backing buffer).
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[(y as usize) * (self.width as usize) + (x as usize)]
    }

    /// One row as a slice.
    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = (y as usize) * w;
        &self.pixels[start..start + w]
    }

    /// Encodes the image as an 8-bit grayscale PNG.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut bytes = Vec::new();
        image::codecs::png::PngEncoder::new(&mut bytes)
            .write_image(
                &self.pixels,
                self.width,
                self.height,
                image::ExtendedColorType::L8,
            )
            .map_err(|e| Error::EncodeFailed(e.to_string()))?;
        Ok(bytes)
    }
}

/// Supported input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Jpeg,
}

impl ImageFormat {
    /// Infers the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        match ext.as_str() {
            "png" => Ok(Self::Png),
            "jpg" | "jpeg" => Ok(Self::Jpeg),
            _ => Err(Error::UnsupportedFormat(path.display().to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Png => "png",
            Self::Jpeg => "jpeg",
        }
    }

    fn to_image_crate(self) -> image::ImageFormat {
        match self {
            Self::Png => image::ImageFormat::Png,
            Self::Jpeg => image::ImageFormat::Jpeg,
        }
    }
}

/// Decodes an encoded image to grayscale.
///
/// Color is reduced with Rec. 601 luma, `Y = round(0.299 R + 0.587 G +
/// 0.114 B)`, after compositing any alpha channel over a white background.
/// Grayscale inputs pass through bit-exact; 16-bit sources are narrowed to
/// 8 bits first.
pub fn decode_image(encoded_bytes: &[u8], format: ImageFormat) -> Result<GrayscaleImage> {
    let decoded = image::load_from_memory_with_format(encoded_bytes, format.to_image_crate())
        .map_err(|e| Error::MalformedImage {
            format: format.name(),
            reason: e.to_string(),
        })?;
    let rgba = decoded.to_rgba8();
    let (width, height) = rgba.dimensions();
    let mut pixels = Vec::with_capacity((width as usize) * (height as usize));
    for px in rgba.pixels() {
        let [r, g, b, a] = px.0;
        let alpha = f64::from(a) / 255.0;
        let over_white = |c: u8| f64::from(c) * alpha + 255.0 * (1.0 - alpha);
        let y = 0.299 * over_white(r) + 0.587 * over_white(g) + 0.114 * over_white(b);
        pixels.push(y.round().min(255.0) as u8);
    }
    GrayscaleImage::new(width, height, pixels)
}

/// A rectangular window into an image, in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl FragmentRect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }
}

/// Copies the window `rect` out of `img` as a standalone image.
pub fn extract_fragment(img: &GrayscaleImage, rect: FragmentRect) -> Result<GrayscaleImage> {
    let fits_x = rect.x.checked_add(rect.w).is_some_and(|e| e <= img.width());
    let fits_y = rect
        .y
        .checked_add(rect.h)
        .is_some_and(|e| e <= img.height());
    if rect.w == 0 || rect.h == 0 || !fits_x || !fits_y {
        return Err(Error::OutOfBounds {
            x: rect.x,
            y: rect.y,
            w: rect.w,
            h: rect.h,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut pixels = Vec::with_capacity((rect.w as usize) * (rect.h as usize));
    for y in rect.y..rect.y + rect.h {
        let row = img.row(y);
        pixels.extend_from_slice(&row[rect.x as usize..(rect.x + rect.w) as usize]);
    }
    GrayscaleImage::new(rect.w, rect.h, pixels)
}

/// Generates a level-`level` Sierpiński carpet: side `3^level`, foreground
/// 255 on the carpet set, background 0.
///
/// A pixel is background exactly when some base-3 digit position has digit
/// 1 in both coordinates (the recursively removed center cells).
pub fn gen_sierpinski_carpet(level: u32) -> Result<GrayscaleImage> {
    if level > MAX_CARPET_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_CARPET_LEVEL,
        });
    }
    let side = 3u32.pow(level);
    let mut pixels = vec![0u8; (side as usize) * (side as usize)];
    for y in 0..side {
        for x in 0..side {
            let (mut cx, mut cy) = (x, y);
            let mut foreground = true;
            while cx > 0 || cy > 0 {
                if cx % 3 == 1 && cy % 3 == 1 {
                    foreground = false;
                    break;
                }
                cx /= 3;
                cy /= 3;
            }
            if foreground {
                pixels[(y as usize) * (side as usize) + (x as usize)] = 255;
            }
        }
    }
    GrayscaleImage::new(side, side, pixels)
}

/// An exact non-negative measure on a square cell grid, summing to one.
///
/// Carries cascade measures to the spectrum pipeline without 8-bit
/// quantization; see [`crate::boxcount::field_measures`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureField {
    side: u32,
    values: Vec<f64>,
}

impl MeasureField {
    /// Builds a field, enforcing non-negative cells summing to 1 within
    /// [`WEIGHT_SUM_TOLERANCE`](crate::closedform::WEIGHT_SUM_TOLERANCE).
    pub fn new(side: u32, values: Vec<f64>) -> Result<Self> {
        if side == 0 || values.len() != (side as usize) * (side as usize) {
            return Err(Error::InvalidField(format!(
                "side {side} with {} cells",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidField(
                "cells must be finite and non-negative".into(),
            ));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > crate::closedform::WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidField(format!(
                "cells sum to {total}, expected 1"
            )));
        }
        Ok(Self { side, values })
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    /// Row-major cell measures.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure of the cell at `(x, y)`.
    pub fn value(&self, x: u32, y: u32) -> f64 {
        debug_assert!(x < self.side && y < self.side);
        self.values[(y as usize) * (self.side as usize) + (x as usize)]
    }
}

/// Generates a quadrant multiplicative cascade of the given depth.
///
/// Each refinement step splits every cell's measure among its four
/// children, multiplying by `weights` in NW, NE, SW, SE order. The
/// resulting side is `2^depth` and the cell at a given path holds the
/// product of the weights along that path.
pub fn gen_binomial_cascade(depth: u32, weights: [f64; 4]) -> Result<MeasureField> {
    if depth == 0 || depth > MAX_CASCADE_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth,
            max: MAX_CASCADE_DEPTH,
        });
    }
    // Reuse the closed-form constructor's validation so both paths accept
    // exactly the same weight vectors.
    crate::closedform::CascadeSpectrum::new(weights)?;
    let [nw, ne, sw, se] = weights;
    let mut values = vec![1.0f64];
    let mut side = 1usize;
    for _ in 0..depth {
        let next_side = side * 2;
        let mut next = vec![0.0f64; next_side * next_side];
        for y in 0..side {
            for x in 0..side {
                let m = values[y * side + x];
                next[(2 * y) * next_side + 2 * x] = m * nw;
                next[(2 * y) * next_side + 2 * x + 1] = m * ne;
                next[(2 * y + 1) * next_side + 2 * x] = m * sw;
                next[(2 * y + 1) * next_side + 2 * x + 1] = m * se;
            }
        }
        values = next;
        side = next_side;
    }
    MeasureField::new(side as u32, values)
}

/// Output depth for [`render_field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn max_value(self) -> f64 {
        match self {
            Self::Eight => 255.0,
            Self::Sixteen => 65_535.0,
        }
    }
}

/// A rendered measure field: intensities linearly rescaled so the largest
/// cell maps to full scale. Eight-bit renders convert losslessly to
/// [`GrayscaleImage`]; sixteen-bit renders keep the widened samples for
/// PNG export and narrow to the high byte on conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedField {
    side: u32,
    bit_depth: BitDepth,
    samples: Vec<u16>,
}

impl RenderedField {
    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    /// Rescaled samples, row-major, in `[0, 255]` or `[0, 65535]`.
    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    /// Converts to the 8-bit raster used by the analysis pipeline.
    pub fn to_grayscale(&self) -> GrayscaleImage {
        let pixels = match self.bit_depth {
            BitDepth::Eight => self.samples.iter().map(|s| *s as u8).collect(),
            BitDepth::Sixteen => self.samples.iter().map(|s| (*s >> 8) as u8).collect(),
        };
        GrayscaleImage::new(self.side, self.side, pixels)
            .expect("rendered field has consistent geometry")
    }

    /// Encodes as a grayscale PNG at the render's bit depth.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        match self.bit_depth {
            BitDepth::Eight => self.to_grayscale().encode_png(),
            BitDepth::Sixteen => {
                let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
                    image::ImageBuffer::from_raw(self.side, self.side, self.samples.clone())
                        .expect("rendered field has consistent geometry");
                let mut bytes = Vec::new();
                image::DynamicImage::ImageLuma16(buf)
                    .write_to(&mut Cursor::new(&mut bytes), image::ImageFormat::Png)
                    .map_err(|e| Error::EncodeFailed(e.to_string()))?;
                Ok(bytes)
            }
        }
    }
}

/// Renders a measure field to intensities: each cell is scaled by
/// `(2^bits − 1) / max cell` and rounded, so the densest cell sits at full
/// scale and zero cells stay zero.
pub fn render_field(field: &MeasureField, bit_depth: BitDepth) -> RenderedField {
    let v_max = field.values().iter().copied().fold(0.0f64, f64::max);
    // A valid field sums to 1, so v_max > 0.
    let scale = bit_depth.max_value() / v_max;
    let samples = field
        .values()
        .iter()
        .map(|v| (v * scale).round().min(bit_depth.max_value()) as u16)
        .collect();
    RenderedField {
        side: field.side(),
        bit_depth,
        samples,
    }
}
