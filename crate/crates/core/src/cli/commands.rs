//! The commands behind the CLI surface.

use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{load_image, load_manifest, resolve_record_path, RunConfig};
use super::output::{
    write_comparison, write_fixture, write_fragments, write_order_report, write_spectrum_set,
    ImageMeta,
};
use super::{error_chain, BitDepthArg, Cli, Command, CommonOpts, SynthCommand};
use crate::analysis::{
    centered_windows, compare_spectra, max_dimension, order_report, FragmentEntry, FragmentSeries,
    ScoredRecord,
};
use crate::boxcount::ScalePlan;
use crate::closedform::{sierpinski_carpet_dimension, CascadeSpectrum};
use crate::imaging::{
    extract_fragment, gen_binomial_cascade, gen_sierpinski_carpet, render_field, BitDepth,
    GrayscaleImage,
};
use crate::pipeline::{analyze_planned, AnalysisSettings};
use crate::spectrum::{MultifractalSpectrum, QGrid};
use crate::{Error, Result};

/// Executes a parsed invocation. The caller owns process concerns:
/// thread-pool setup beforehand, exit-code mapping afterwards.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { image, opts } => cmd_analyze(&image, &opts),
        Command::Batch { manifest, opts } => cmd_batch(&manifest, &opts),
        Command::Compare {
            image_a,
            image_b,
            opts,
        } => cmd_compare(&image_a, &image_b, &opts),
        Command::Fragments {
            image,
            levels,
            opts,
        } => cmd_fragments(&image, levels, &opts),
        Command::Synth { fixture } => cmd_synth(fixture),
    }
}

/// Plans, scans, and regresses one raster under the given settings.
fn analyze_raster(
    img: &GrayscaleImage,
    settings: &AnalysisSettings,
) -> Result<(ScalePlan, MultifractalSpectrum)> {
    let plan = settings.plan(img.width(), img.height())?;
    let spectrum = analyze_planned(img, &plan, &settings.qgrid, settings.mode)?;
    Ok((plan, spectrum))
}

fn cmd_analyze(image_path: &Path, opts: &CommonOpts) -> Result<()> {
    let config = RunConfig::from_opts(opts);
    let settings = config.settings()?;
    let img = load_image(image_path)?;
    let (plan, spectrum) = analyze_raster(&img, &settings)?;
    let meta = ImageMeta::new(image_path, &img);
    write_spectrum_set(&opts.out, &meta, &config, &plan, &spectrum)?;
    if spectrum.monotonicity_warning {
        eprintln!(
            "warning: D_q or alpha(q) is not non-increasing; extreme moments may be unreliable"
        );
    }
    println!(
        "{}: D_f = {:.4} (boxes {}..{} px, {} offsets) -> {}",
        image_path.display(),
        max_dimension(&spectrum)?,
        plan.min_size(),
        plan.base_size(),
        plan.offsets().len(),
        opts.out.display()
    );
    Ok(())
}

fn cmd_batch(manifest_path: &Path, opts: &CommonOpts) -> Result<()> {
    let config = RunConfig::from_opts(opts);
    let settings = config.settings()?;
    let records = load_manifest(manifest_path)?;

    let mut scored = Vec::with_capacity(records.len());
    for record in records {
        let image_path = resolve_record_path(manifest_path, &record);
        let out_dir = opts.out.join(&record.id);
        let analyzed = load_image(&image_path).and_then(|img| {
            let (plan, spectrum) = analyze_raster(&img, &settings)?;
            write_spectrum_set(
                &out_dir,
                &ImageMeta::new(&image_path, &img),
                &config,
                &plan,
                &spectrum,
            )?;
            max_dimension(&spectrum)
        });
        match analyzed {
            Ok(d_f) => {
                println!("{}: D_f = {d_f:.4}", record.id);
                scored.push(ScoredRecord {
                    record,
                    d_f: Some(d_f),
                    error: None,
                });
            }
            Err(e) => {
                let reason = error_chain(&e);
                eprintln!("{}: {reason}", record.id);
                scored.push(ScoredRecord {
                    record,
                    d_f: None,
                    error: Some(reason),
                });
            }
        }
    }

    let report = order_report(&scored, config.order_threshold)?;
    write_order_report(&opts.out, &config, manifest_path, &report)?;

    let failures = scored.iter().filter(|s| s.d_f.is_none()).count();
    if failures == scored.len() {
        return Err(Error::BatchFailed { failures });
    }
    println!(
        "{} records analyzed, {} failed -> {}",
        scored.len() - failures,
        failures,
        opts.out.display()
    );
    Ok(())
}

fn cmd_compare(path_a: &Path, path_b: &Path, opts: &CommonOpts) -> Result<()> {
    let config = RunConfig::from_opts(opts);
    let settings = config.settings()?;
    let img_a = load_image(path_a)?;
    let img_b = load_image(path_b)?;
    let (_, spec_a) = analyze_raster(&img_a, &settings)?;
    let (_, spec_b) = analyze_raster(&img_b, &settings)?;
    let comparison = compare_spectra(&spec_a, &spec_b)?;
    write_comparison(
        &opts.out,
        &config,
        &ImageMeta::new(path_a, &img_a),
        &ImageMeta::new(path_b, &img_b),
        max_dimension(&spec_a)?,
        max_dimension(&spec_b)?,
        &comparison,
    )?;
    println!(
        "delta_df = {:.4}, linf_f = {:.4}, area_gap = {:.4} -> {}",
        comparison.delta_df,
        comparison.linf_f,
        comparison.area_gap,
        opts.out.display()
    );
    Ok(())
}

fn cmd_fragments(image_path: &Path, levels: u32, opts: &CommonOpts) -> Result<()> {
    let config = RunConfig::from_opts(opts);
    let settings = config.settings()?;
    let img = load_image(image_path)?;

    let mut entries = Vec::new();
    for (k, (fraction, rect)) in centered_windows(img.width(), img.height(), levels)?
        .into_iter()
        .enumerate()
    {
        let window = extract_fragment(&img, rect)?;
        let plan = settings
            .plan(window.width(), window.height())
            .map_err(|e| match e {
                Error::ImageTooSmall(reason) => Error::FragmentTooSmall(format!(
                    "window {}x{} at area fraction {fraction}: {reason}",
                    rect.w, rect.h
                )),
                other => other,
            })?;
        let spectrum = analyze_planned(&window, &plan, &settings.qgrid, settings.mode)?;
        let d_f = max_dimension(&spectrum)?;
        let meta = ImageMeta::new(image_path, &window);
        write_spectrum_set(
            &opts.out.join(format!("fragment_{k}")),
            &meta,
            &config,
            &plan,
            &spectrum,
        )?;
        println!(
            "fragment {k}: area fraction {}, {}x{} px, D_f = {d_f:.4}",
            fraction, rect.w, rect.h
        );
        entries.push(FragmentEntry {
            area_fraction: fraction,
            d_f,
        });
    }

    write_fragments(&opts.out, &FragmentSeries { entries })?;
    println!("fragment series -> {}", opts.out.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct CarpetSidecar {
    kind: &'static str,
    level: u32,
    side: u32,
    expected_d0: f64,
}

#[derive(serde::Serialize)]
struct ExpectedPoint {
    q: f64,
    tau: f64,
    d_q: f64,
    alpha: f64,
    f_alpha: f64,
}

#[derive(serde::Serialize)]
struct CascadeSidecar {
    kind: &'static str,
    depth: u32,
    side: u32,
    weights: [f64; 4],
    bit_depth: u8,
    expected_d0: f64,
    expected_spectrum: Vec<ExpectedPoint>,
}

#[derive(serde::Serialize)]
struct SquareSidecar {
    kind: &'static str,
    side: u32,
    expected_d0: f64,
}

#[derive(serde::Serialize)]
struct NoiseSidecar {
    kind: &'static str,
    side: u32,
    seed: u64,
}

fn cmd_synth(fixture: SynthCommand) -> Result<()> {
    match fixture {
        SynthCommand::Carpet { level, out } => {
            let img = gen_sierpinski_carpet(level)?;
            let sidecar = CarpetSidecar {
                kind: "carpet",
                level,
                side: img.width(),
                expected_d0: sierpinski_carpet_dimension(),
            };
            write_fixture(&out, "carpet", &img.encode_png()?, &sidecar)?;
            println!(
                "carpet level {level}: {}x{} px -> {}",
                img.width(),
                img.width(),
                out.display()
            );
        }
        SynthCommand::Cascade {
            depth,
            weights,
            bit_depth,
            out,
        } => {
            let weights: [f64; 4] = weights.as_slice().try_into().map_err(|_| {
                Error::InvalidConfig(format!(
                    "expected exactly 4 cascade weights, got {}",
                    weights.len()
                ))
            })?;
            let field = gen_binomial_cascade(depth, weights)?;
            let rendered = render_field(
                &field,
                match bit_depth {
                    BitDepthArg::Eight => BitDepth::Eight,
                    BitDepthArg::Sixteen => BitDepth::Sixteen,
                },
            );
            let oracle = CascadeSpectrum::new(weights)?;
            let expected_spectrum = QGrid::default()
                .values()
                .iter()
                .map(|&q| ExpectedPoint {
                    q,
                    tau: oracle.tau(q),
                    d_q: oracle.d_q(q),
                    alpha: oracle.alpha(q),
                    f_alpha: oracle.f_alpha(q),
                })
                .collect();
            let sidecar = CascadeSidecar {
                kind: "cascade",
                depth,
                side: field.side(),
                weights,
                bit_depth: match bit_depth {
                    BitDepthArg::Eight => 8,
                    BitDepthArg::Sixteen => 16,
                },
                expected_d0: oracle.d_q(0.0),
                expected_spectrum,
            };
            write_fixture(&out, "cascade", &rendered.encode_png()?, &sidecar)?;
            println!(
                "cascade depth {depth}: {}x{} px -> {}",
                field.side(),
                field.side(),
                out.display()
            );
        }
        SynthCommand::Square { side, out } => {
            let img = GrayscaleImage::filled(side, side, 255)?;
            let sidecar = SquareSidecar {
                kind: "square",
                side,
                expected_d0: 2.0,
            };
            write_fixture(&out, "square", &img.encode_png()?, &sidecar)?;
            println!("square: {side}x{side} px -> {}", out.display());
        }
        SynthCommand::Noise { side, seed, out } => {
            let area = (side as usize).checked_mul(side as usize).ok_or_else(|| {
                Error::InvalidConfig(format!("noise side {side} overflows the pixel buffer"))
            })?;
            let mut pixels = vec![0u8; area];
            ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut pixels);
            let img = GrayscaleImage::new(side, side, pixels)?;
            let sidecar = NoiseSidecar {
                kind: "noise",
                side,
                seed,
            };
            write_fixture(&out, "noise", &img.encode_png()?, &sidecar)?;
            println!("noise: {side}x{side} px, seed {seed} -> {}", out.display());
        }
    }
    Ok(())
}
