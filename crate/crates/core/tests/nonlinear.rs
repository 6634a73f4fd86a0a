use proptest::prelude::*;
use rand::Rng;
use thermofuse::imaging::{trace_contour, BinaryMask};
use thermofuse::nonlinear::*;
use thermofuse::synth::{
    gen_contour, henon_series, koch_curve, logistic_series, sine, white_noise, ContourKind,
    ContourParams, HenonParams,
};
use thermofuse::{seeded_rng, Error};

/// Direct evaluation of `Phi^m - Phi^{m+1}` from its definition.
fn apen_oracle(x: &[f64], m: usize, r_factor: f64) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let r = r_factor * sd;
    let phi = |len: usize| {
        let count = n - len + 1;
        let mut total = 0.0;
        for i in 0..count {
            let mut c = 0usize;
            for j in 0..count {
                let d = (0..len)
                    .map(|k| (x[i + k] - x[j + k]).abs())
                    .fold(0.0, f64::max);
                if d <= r {
                    c += 1;
                }
            }
            total += (c as f64 / count as f64).ln();
        }
        total / count as f64
    };
    phi(m) - phi(m + 1)
}

#[test]
fn apen_matches_direct_definition() {
    let mut rng = seeded_rng(2024);
    for case in 0..50 {
        let n = rng.random_range(10..=500);
        let m = rng.random_range(1..=3);
        let r_factor = rng.random_range(0.1..0.35);
        let x: Vec<f64> = match case % 3 {
            0 => (0..n).map(|_| rng.random::<f64>()).collect(),
            1 => logistic_series(4.0, n, rng.random_range(0.05..0.95), 50).unwrap(),
            _ => {
                let p = rng.random_range(5.0..40.0);
                sine(n, p)
                    .unwrap()
                    .into_iter()
                    .map(|v| v + 0.1 * rng.random::<f64>())
                    .collect()
            }
        };
        let got = approx_entropy(&x, m, r_factor).unwrap();
        let want = apen_oracle(&x, m, r_factor);
        assert!(
            (got - want).abs() <= 1e-12,
            "case {case}: n={n} m={m} got {got} want {want}"
        );
    }
}

#[test]
fn apen_constant_and_ordering() {
    assert_eq!(approx_entropy(&[0.7; 300], 2, 0.2).unwrap(), 0.0);
    for seed in 0..20 {
        let noise = white_noise(300, seed);
        // unit population std, like the noise
        let s: Vec<f64> = sine(300, 17.0 + seed as f64)
            .unwrap()
            .into_iter()
            .map(|v| v * std::f64::consts::SQRT_2)
            .collect();
        let a_noise = approx_entropy(&noise, 2, 0.2).unwrap();
        let a_sine = approx_entropy(&s, 2, 0.2).unwrap();
        assert!(a_noise > a_sine, "seed {seed}: {a_noise} vs {a_sine}");
    }
}

proptest! {
    #[test]
    fn apen_scale_invariant(
        x in prop::collection::vec(-10.0f64..10.0, 8..120),
        k in prop::sample::select(vec![-4.0f64, -1.0, 0.5, 2.0, 8.0]),
    ) {
        let a = approx_entropy(&x, 2, 0.2).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * k).collect();
        prop_assert_eq!(approx_entropy(&scaled, 2, 0.2).unwrap(), a);
    }

    #[test]
    fn bcd_scale_invariant(
        pts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..200),
        scale_pow in -3i32..4,
    ) {
        let Ok(a) = box_counting_dim(&pts, &default_scales()) else {
            return Ok(());
        };
        let k = 2f64.powi(scale_pow);
        let moved: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| (x * k, y * k))
            .collect();
        prop_assert_eq!(box_counting_dim(&moved, &default_scales()).unwrap(), a);
        prop_assert!((0.0..=2.0).contains(&a));
    }
}

/// Logistic-map orbit average of `ln |f'(x)|`.
fn logistic_oracle(x: &[f64], r: f64) -> f64 {
    x.iter().map(|&v| (r - 2.0 * r * v).abs().ln()).sum::<f64>() / x.len() as f64
}

/// Largest Hénon exponent from the tangent map with renormalisation.
fn henon_oracle(p: &HenonParams, n: usize, burn_in: usize) -> f64 {
    let (mut x, mut y) = (p.x0, p.y0);
    let (mut vx, mut vy) = (1.0f64, 0.0f64);
    let mut sum = 0.0;
    for i in 0..burn_in + n {
        let (nvx, nvy) = (-2.0 * p.a * x * vx + vy, p.b * vx);
        let norm = nvx.hypot(nvy);
        (vx, vy) = (nvx / norm, nvy / norm);
        if i >= burn_in {
            sum += norm.ln();
        }
        (x, y) = (1.0 - p.a * x * x + y, p.b * x);
    }
    sum / n as f64
}

#[test]
fn logistic_map_exponent() {
    let x = logistic_series(4.0, 5000, 0.1234, 1000).unwrap();
    let oracle = logistic_oracle(&x, 4.0);
    assert!(
        (oracle - std::f64::consts::LN_2).abs() < 0.02,
        "oracle {oracle}"
    );
    let est = lyapunov_estimate(&x, 3, 1, None).unwrap();
    assert!(
        (est - oracle).abs() <= 0.05,
        "estimate {est} oracle {oracle}"
    );
}

#[test]
fn henon_exponent() {
    let p = HenonParams::default();
    let x = henon_series(5000, &p, 1000).unwrap();
    let oracle = henon_oracle(&p, 100_000, 1000);
    assert!((oracle - 0.419).abs() < 0.01, "oracle {oracle}");
    for m in 2..=5 {
        let est = lyapunov_estimate(&x, m, 1, None).unwrap();
        assert!((est - oracle).abs() <= 0.08, "m={m}: {est} vs {oracle}");
    }
}

#[test]
fn sine_exponent_is_small() {
    for period in [7.3, 25.0, 61.7, 150.7] {
        let s = sine(5000, period).unwrap();
        for m in 2..=5 {
            let est = lyapunov_estimate(&s, m, 1, None).unwrap();
            assert!(est <= 0.02, "period {period} m={m}: {est}");
        }
    }
}

#[test]
fn periodic_logistic_is_not_chaotic() {
    let x = logistic_series(3.2, 2000, 0.3, 0).unwrap();
    let est = lyapunov_estimate(&x, 3, 1, None).unwrap();
    assert!(est <= 0.0, "{est}");
}

#[test]
fn divergence_curve_shape() {
    let x = logistic_series(4.0, 3000, 0.31, 500).unwrap();
    let c = divergence_curve(&x, &LyapunovParams::new(3, 1)).unwrap();
    assert_eq!(c.mean_log_divergence[0], 0.0);
    assert_eq!(c.mean_log_divergence.len(), 21);
    assert!(c.fit_window.0 == 1 && c.fit_window.1 >= 5);
    assert!(c.pair_counts.iter().all(|&n| n > 0));
}

#[test]
fn embedding_errors() {
    assert!(matches!(
        delay_embed(&[1.0, 2.0, 3.0], 3, 1),
        Ok(e) if e.len() == 1
    ));
    assert!(matches!(
        delay_embed(&[1.0, 2.0], 3, 1),
        Err(Error::SignalTooShort { .. })
    ));
}

/// Occupied cells counted by scanning each cell against every point.
fn box_count_oracle(pts: &[(f64, f64)], eps: f64) -> usize {
    let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ext = (x1 - x0).max(y1 - y0);
    let cells = (1.0 / eps).round() as usize;
    let mut count = 0;
    for i in 0..cells {
        for j in 0..cells {
            let inside = |v: f64, c: usize| {
                let lo = c as f64 * eps;
                v >= lo && (v < lo + eps || (c == cells - 1 && v <= 1.0))
            };
            if pts
                .iter()
                .any(|&(x, y)| inside((x - x0) / ext, i) && inside((y - y0) / ext, j))
            {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn koch_box_counts_match_cell_scan() {
    let k = koch_curve(6).unwrap();
    let bc = box_count(&k, &default_scales()).unwrap();
    for (i, &eps) in bc.scales.iter().enumerate().take(5) {
        assert_eq!(bc.counts[i], box_count_oracle(&k, eps), "eps {eps}");
    }
    let d = bc.dimension();
    assert!((d - 4f64.ln() / 3f64.ln()).abs() <= 0.06, "{d}");
}

#[test]
fn bcd_reference_sets() {
    let line: Vec<(f64, f64)> = (0..1000)
        .map(|i| (i as f64 / 999.0, 0.3 * i as f64 / 999.0))
        .collect();
    let d = box_counting_dim(&line, &default_scales()).unwrap();
    assert!((d - 1.0).abs() <= 0.05, "line {d}");

    let mut rng = seeded_rng(77);
    let square: Vec<(f64, f64)> = (0..10_000)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let d = box_counting_dim(&square, &default_scales()).unwrap();
    assert!((d - 2.0).abs() <= 0.1, "square {d}");
}

#[test]
fn circle_features_are_smooth() {
    let disc = gen_contour(&ContourParams {
        amp: 0.0,
        ..ContourParams::benign(30.0, 0)
    })
    .unwrap();
    let f = extract_features(&disc.mask, &FeatureConfig::default()).unwrap();
    assert!((f.bcd - 1.0).abs() <= 0.1, "{f:?}");
    let rough = gen_contour(&ContourParams::malignant(30.0, 0)).unwrap();
    let g = extract_features(&rough.mask, &FeatureConfig::default()).unwrap();
    assert!(g.apen > f.apen, "{g:?} vs {f:?}");
}

#[test]
fn feature_extraction_is_deterministic() {
    let c = gen_contour(&ContourParams::malignant(35.0, 3)).unwrap();
    let cfg = FeatureConfig::default();
    let a = extract_features(&c.mask, &cfg).unwrap();
    assert_eq!(a, extract_features(&c.mask, &cfg).unwrap());
    assert_eq!(
        a,
        extract_features_from_contour(&trace_contour(&c.mask).unwrap(), &cfg).unwrap()
    );
    assert!(extract_features(&BinaryMask::empty(4, 4).unwrap(), &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    // Smooth and rough closed curves of the kind the lesion pipeline sees.
    #[test]
    fn bcd_rotation_within_grid_tolerance(
        angle in 0.0f64..std::f64::consts::TAU,
        seed in 0u64..1000,
        malignant: bool,
    ) {
        let kind = if malignant { ContourKind::Malignant } else { ContourKind::Benign };
        let sc = gen_contour(&ContourParams::of_kind(kind, 50.0, seed)).unwrap();
        let set: Vec<(f64, f64)> = (0..8192)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 8192.0;
                let r = sc.radius_at(t);
                (r * t.cos(), r * t.sin())
            })
            .collect();
        let (s, c) = angle.sin_cos();
        let rotated: Vec<(f64, f64)> =
            set.iter().map(|&(x, y)| (c * x - s * y, s * x + c * y)).collect();
        let a = box_counting_dim(&set, &default_scales()).unwrap();
        let b = box_counting_dim(&rotated, &default_scales()).unwrap();
        prop_assert!((a - b).abs() <= 0.05, "angle {}: {} vs {}", angle, a, b);
    }
}
