//! End-to-end estimator checks against closed forms: the exact cascade
//! path, the uniform raster, and the Sierpiński carpet.

use multifrac::boxcount::{box_measures, MeasureMode};
use multifrac::closedform::{sierpinski_carpet_dimension, CascadeSpectrum};
use multifrac::imaging::{gen_binomial_cascade, gen_sierpinski_carpet, GrayscaleImage};
use multifrac::pipeline::{analyze_field, analyze_image, AnalysisSettings};
use multifrac::spectrum::{legendre_residuals, QGrid};

const CASCADE_WEIGHTS: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

fn cascade_spectrum_depth8() -> multifrac::spectrum::MultifractalSpectrum {
    let field = gen_binomial_cascade(8, CASCADE_WEIGHTS).unwrap();
    let sizes: Vec<u32> = (0..=8).map(|k| 1u32 << k).collect();
    analyze_field(&field, &sizes, &QGrid::default()).unwrap()
}

#[test]
fn cascade_exact_path_matches_closed_forms_everywhere() {
    let spec = cascade_spectrum_depth8();
    let oracle = CascadeSpectrum::new(CASCADE_WEIGHTS).unwrap();
    for p in &spec.points {
        assert!(
            (p.tau - oracle.tau(p.q)).abs() <= 1e-6,
            "tau(q={}) = {}, closed form {}",
            p.q,
            p.tau,
            oracle.tau(p.q)
        );
        assert!(
            (p.d_q - oracle.d_q(p.q)).abs() <= 1e-6,
            "d_q at q = {}",
            p.q
        );
        assert!(
            (p.alpha - oracle.alpha(p.q)).abs() <= 1e-6,
            "alpha at q = {}",
            p.q
        );
        assert!(
            (p.f_alpha - oracle.f_alpha(p.q)).abs() <= 1e-6,
            "f at q = {}",
            p.q
        );
        assert!(p.r2_tau > 1.0 - 1e-9, "r2 at q = {}", p.q);
    }
}

#[test]
fn cascade_spot_values() {
    let spec = cascade_spectrum_depth8();
    let d0 = spec.point_at(0.0).unwrap().d_q;
    assert!((d0 - 2.0).abs() <= 1e-9, "D_0 = {d0}");

    let d2 = spec.point_at(2.0).unwrap().d_q;
    assert!((d2 - 1.736_965_594_166_206_3).abs() <= 1e-9, "D_2 = {d2}");

    let alpha10 = spec.point_at(10.0).unwrap().alpha;
    assert!(
        (alpha10 - 1.344_959_303_379_597_7).abs() <= 1e-9,
        "alpha(10) = {alpha10}"
    );
    // alpha(q) approaches −log2 of the largest weight from above as the
    // strongest singularity dominates; at q = 10 it is within 0.05.
    let alpha_min = 0.4f64.log2().abs();
    assert!((alpha10 - alpha_min).abs() <= 0.05);

    // The q = 1 information-dimension identities: D_1 = alpha(1) = f(1).
    let p1 = spec.point_at(1.0).unwrap();
    assert!((p1.d_q - p1.alpha).abs() <= 1e-9);
    assert!((p1.d_q - p1.f_alpha).abs() <= 1e-9);
    assert!(
        (p1.d_q - 1.846_439_344_671_015_7).abs() <= 1e-9,
        "D_1 = {}",
        p1.d_q
    );
}

#[test]
fn cascade_legendre_residuals_vanish() {
    let spec = cascade_spectrum_depth8();
    for (q, residual) in legendre_residuals(&spec) {
        assert!(residual <= 1e-6, "Legendre residual {residual} at q = {q}");
    }
}

#[test]
fn uniform_image_dimension_two_at_every_offset() {
    let img = GrayscaleImage::filled(512, 512, 160).unwrap();
    let spec = analyze_image(&img, &AnalysisSettings::default()).unwrap();
    assert_eq!(spec.per_offset.len(), 4);
    for offset in &spec.per_offset {
        for p in &offset.points {
            assert!(
                (p.d_q - 2.0).abs() <= 1e-9,
                "offset {:?}, q {}: d_q = {}",
                offset.offset,
                p.q,
                p.d_q
            );
            assert!((p.r2_tau - 1.0).abs() <= 1e-12);
        }
    }
    for s in &spec.spread {
        assert!(s.d_q <= 1e-12, "spread at q {}", s.q);
    }
}

#[test]
fn carpet_offset_aligned_scan_is_exact() {
    // 729 is divisible by every planned power-of-3 box size, so the
    // origin-aligned grid counts exactly 8^k boxes and the regression
    // recovers ln 8 / ln 3 to rounding error.
    let img = gen_sierpinski_carpet(6).unwrap();
    let settings = AnalysisSettings {
        min_box: 3,
        num_scales: 6,
        num_offsets: 1,
        mode: MeasureMode::binary(),
        ..AnalysisSettings::default()
    };
    let spec = analyze_image(&img, &settings).unwrap();
    let d0 = spec.point_at(0.0).unwrap().d_q;
    assert!((d0 - sierpinski_carpet_dimension()).abs() <= 1e-9, "{d0}");
}

#[test]
fn carpet_offset_average_stays_near_closed_form() {
    let img = gen_sierpinski_carpet(6).unwrap();
    let settings = AnalysisSettings {
        min_box: 3,
        num_scales: 6,
        num_offsets: 4,
        mode: MeasureMode::binary(),
        ..AnalysisSettings::default()
    };
    let spec = analyze_image(&img, &settings).unwrap();
    let d0 = spec.point_at(0.0).unwrap().d_q;
    let expected = sierpinski_carpet_dimension();
    assert!((d0 - expected).abs() <= 0.03, "mean D_0 = {d0}");
    let spread = spec
        .spread
        .iter()
        .find(|s| s.q == 0.0)
        .expect("spread carries q = 0")
        .d_q;
    assert!(spread < 0.02, "offset spread {spread}");
}

#[test]
fn carpet_binary_counts_are_powers_of_eight() {
    for level in 2..=4u32 {
        let img = gen_sierpinski_carpet(level).unwrap();
        for k in 0..=level {
            let epsilon = 3u32.pow(k);
            let dist = box_measures(&img, epsilon, (0, 0), MeasureMode::binary()).unwrap();
            let expected = 8usize.pow(level - k);
            assert_eq!(
                dist.box_count(),
                expected,
                "level {level}, box size {epsilon}"
            );
        }
    }
}
