//! Validates the closed-form cascade spectrum against brute-force box
//! enumeration, with no shared code path: cells are enumerated here by
//! direct recursion on the construction rule, and every exponent is
//! recovered from finite differences of the enumerated moment sums.

use multifrac::closedform::CascadeSpectrum;

const WEIGHTS: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

/// All cell measures of a depth-`d` cascade, by direct enumeration of the
/// 4^d refinement paths.
fn enumerate_cells(depth: u32, weights: [f64; 4]) -> Vec<f64> {
    if depth == 0 {
        return vec![1.0];
    }
    let sub = enumerate_cells(depth - 1, weights);
    let mut out = Vec::with_capacity(sub.len() * 4);
    for w in weights {
        out.extend(sub.iter().map(|m| m * w));
    }
    out
}

/// Partition sum Σ μ_i^q over the enumerated cells (zero cells dropped).
fn brute_partition(cells: &[f64], q: f64) -> f64 {
    cells.iter().filter(|m| **m > 0.0).map(|m| m.powf(q)).sum()
}

/// Moment sums (Σ m_i ln μ_i, Σ m_i ln m_i) with m_i = μ_i^q / Σ μ_j^q.
fn brute_moments(cells: &[f64], q: f64) -> (f64, f64) {
    let norm = brute_partition(cells, q);
    let mut weighted_log_measure = 0.0;
    let mut weighted_log_weight = 0.0;
    for m in cells.iter().filter(|m| **m > 0.0) {
        let w = m.powf(q) / norm;
        weighted_log_measure += w * m.ln();
        weighted_log_weight += w * w.ln();
    }
    (weighted_log_measure, weighted_log_weight)
}

const Q_PROBE: [f64; 9] = [-10.0, -2.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 10.0];

#[test]
fn partition_sums_factor_across_depths() {
    // For a multiplicative cascade, I(q, depth) = (Σ p_i^q)^depth. Verify by
    // brute enumeration at every depth up to 4.
    let per_level: f64 = WEIGHTS.iter().map(|p| p.powf(2.0)).sum();
    for depth in 1..=4u32 {
        let cells = enumerate_cells(depth, WEIGHTS);
        assert_eq!(cells.len(), 4usize.pow(depth));
        let total: f64 = cells.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "mass conservation at {depth}");
        let got = brute_partition(&cells, 2.0);
        let expected = per_level.powi(depth as i32);
        assert!(
            (got - expected).abs() < 1e-12 * expected.abs(),
            "depth {depth}: {got} vs {expected}"
        );
    }
}

#[test]
fn tau_matches_brute_force_finite_differences() {
    let cf = CascadeSpectrum::new(WEIGHTS).unwrap();
    let ln2 = 2f64.ln();
    for depth in 2..=4u32 {
        let coarse = enumerate_cells(depth - 1, WEIGHTS);
        let fine = enumerate_cells(depth, WEIGHTS);
        for q in Q_PROBE {
            // Refining by one level multiplies box side by 1/2, so
            // Δ ln I / Δ ln ε = −log₂(I_fine / I_coarse) ... with
            // ln ε decreasing by ln 2 per level:
            let slope = (brute_partition(&fine, q).ln() - brute_partition(&coarse, q).ln()) / -ln2;
            // ln I ~ τ(q) ln ε, so the finite-difference slope is τ(q).
            assert!(
                (slope - cf.tau(q)).abs() < 1e-9,
                "depth {depth} q {q}: slope {slope} vs tau {}",
                cf.tau(q)
            );
        }
    }
}

#[test]
fn alpha_and_f_match_brute_force_finite_differences() {
    let cf = CascadeSpectrum::new(WEIGHTS).unwrap();
    let ln2 = 2f64.ln();
    for depth in 2..=4u32 {
        let coarse = enumerate_cells(depth - 1, WEIGHTS);
        let fine = enumerate_cells(depth, WEIGHTS);
        for q in Q_PROBE {
            let (a_coarse, f_coarse) = brute_moments(&coarse, q);
            let (a_fine, f_fine) = brute_moments(&fine, q);
            // Both moment sums are linear in ln ε with slopes α(q) and f(q).
            let alpha = (a_fine - a_coarse) / -ln2;
            let f = (f_fine - f_coarse) / -ln2;
            assert!(
                (alpha - cf.alpha(q)).abs() < 1e-9,
                "depth {depth} q {q}: alpha {alpha} vs {}",
                cf.alpha(q)
            );
            assert!(
                (f - cf.f_alpha(q)).abs() < 1e-9,
                "depth {depth} q {q}: f {f} vs {}",
                cf.f_alpha(q)
            );
        }
    }
}

#[test]
fn legendre_identity_holds_exactly() {
    let cf = CascadeSpectrum::new(WEIGHTS).unwrap();
    for q in Q_PROBE {
        let residual = (cf.f_alpha(q) - (q * cf.alpha(q) - cf.tau(q))).abs();
        assert!(residual < 1e-12, "q {q}: residual {residual}");
    }
}

#[test]
fn dimension_hierarchy_is_monotone() {
    let cf = CascadeSpectrum::new(WEIGHTS).unwrap();
    let mut prev = f64::INFINITY;
    for i in -40..=40 {
        let q = f64::from(i) * 0.25;
        let d = cf.d_q(q);
        assert!(d <= prev + 1e-12, "D_q rose at q {q}");
        prev = d;
    }
}
