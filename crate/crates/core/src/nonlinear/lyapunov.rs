//! Largest Lyapunov exponent of a scalar series (Rosenstein method).
//!
//! Every reconstructed state is paired with its nearest neighbour among the
//! states that are more than one mean period away in time. Both members of a
//! pair are then followed forward, and the mean log separation ratio
//! `<ln d(t) / d(0)>` is tracked against the step `t`. The exponent is the
//! least-squares slope of that divergence curve over the fit window.

use rayon::prelude::*;

use super::embed::delay_embed;
use crate::{Error, Result};

/// Embedding dimensions searched by [`lle`].
pub const DEFAULT_LLE_DIMS: [usize; 4] = [2, 3, 4, 5];

/// Exclusion window used when the mean period cannot be estimated.
const FALLBACK_PERIOD: f64 = 10.0;
/// Upper bound on the default divergence horizon, in samples.
const MAX_HORIZON: usize = 20;
/// A rise of one decade in separation marks a curve with a scaling region.
const MIN_SCALING_RISE: f64 = std::f64::consts::LN_10;
/// The scaling region ends where the curve has covered this share of its rise.
const SATURATION_FRACTION: f64 = 0.7;
/// Shortest truncated window the default rule accepts.
const MIN_SCALING_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovParams {
    pub dim: usize,
    pub delay: usize,
    /// Inclusive `(first, last)` steps of the fit. `None` selects the default
    /// window described on [`divergence_curve`].
    pub fit_window: Option<(usize, usize)>,
    /// Temporal exclusion window in samples. `None` uses [`mean_period`].
    pub exclusion: Option<f64>,
}

impl LyapunovParams {
    pub fn new(dim: usize, delay: usize) -> Self {
        Self {
            dim,
            delay,
            fit_window: None,
            exclusion: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCurve {
    /// `<ln d(t)/d(0)>` indexed by `t`; NaN where no pair survives to `t`.
    pub mean_log_divergence: Vec<f64>,
    /// Number of pairs averaged at each `t`.
    pub pair_counts: Vec<usize>,
    pub exclusion: f64,
    /// Inclusive fit window actually used.
    pub fit_window: (usize, usize),
}

impl DivergenceCurve {
    /// Least-squares slope of the curve over the fit window, in nats/sample.
    pub fn slope(&self) -> Result<f64> {
        let (lo, hi) = self.fit_window;
        let pts: Vec<(f64, f64)> = (lo..=hi.min(self.mean_log_divergence.len() - 1))
            .map(|t| (t as f64, self.mean_log_divergence[t]))
            .filter(|(_, y)| y.is_finite())
            .collect();
        if pts.len() < 2 {
            return Err(Error::SignalTooShort {
                len: pts.len(),
                required: 1,
            });
        }
        Ok(least_squares_slope(&pts))
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Mean period from zero crossings of the mean-removed signal, or 10 samples
/// when fewer than two crossings exist.
pub fn mean_period(signal: &[f64]) -> f64 {
    if signal.is_empty() {
        return FALLBACK_PERIOD;
    }
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let crossings = signal
        .windows(2)
        .filter(|w| (w[0] - mean >= 0.0) != (w[1] - mean >= 0.0))
        .count();
    if crossings < 2 {
        FALLBACK_PERIOD
    } else {
        2.0 * signal.len() as f64 / crossings as f64
    }
}

/// Computes the mean log-divergence curve.
///
/// Without an explicit window the curve runs to `min(20, N/10)` steps (at
/// least 2) and is fit from step 1. When the curve rises by more than a
/// decade, nearest-neighbour separations saturate at the attractor size well
/// inside that horizon; the fit then stops at the first step that reaches
/// 70% of the rise, provided that leaves at least five steps.
pub fn divergence_curve(signal: &[f64], params: &LyapunovParams) -> Result<DivergenceCurve> {
    let emb = delay_embed(signal, params.dim, params.delay)?;
    let m = emb.len();
    if m < 2 {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            required: (params.dim - 1) * params.delay + 1,
        });
    }
    if let Some((lo, hi)) = params.fit_window {
        if lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "fit window ({lo}, {hi}) needs first < last"
            )));
        }
    }
    let exclusion = params.exclusion.unwrap_or_else(|| mean_period(signal));
    let horizon = match params.fit_window {
        Some((_, hi)) => hi,
        None => (signal.len() / 10).clamp(2, MAX_HORIZON),
    };

    let neighbours: Vec<Option<(usize, f64)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..m {
                if (i.abs_diff(j) as f64) <= exclusion {
                    continue;
                }
                let d = emb.dist(i, j);
                if d > 0.0 && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
            best
        })
        .collect();
    if neighbours.iter().all(Option::is_none) {
        return Err(Error::NoValidNeighbors);
    }

    let mut sums = vec![0.0; horizon + 1];
    let mut counts = vec![0usize; horizon + 1];
    for (i, nn) in neighbours.iter().enumerate() {
        let Some((j, d0)) = *nn else { continue };
        for t in 0..=horizon {
            if i + t >= m || j + t >= m {
                break;
            }
            let d = emb.dist(i + t, j + t);
            if d > 0.0 {
                sums[t] += (d / d0).ln();
                counts[t] += 1;
            }
        }
    }
    let curve: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { f64::NAN })
        .collect();

    let fit_window = match params.fit_window {
        Some(w) => w,
        None => (1, saturation_end(&curve, horizon)),
    };
    Ok(DivergenceCurve {
        mean_log_divergence: curve,
        pair_counts: counts,
        exclusion,
        fit_window,
    })
}

fn saturation_end(curve: &[f64], horizon: usize) -> usize {
    let base = curve[0];
    let rise = curve[1..]
        .iter()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, |a, &v| a.max(v - base));
    if !(rise >= MIN_SCALING_RISE) {
        return horizon;
    }
    let end = (1..=horizon)
        .find(|&t| curve[t].is_finite() && curve[t] - base >= SATURATION_FRACTION * rise)
        .unwrap_or(horizon);
    if end >= MIN_SCALING_POINTS {
        end
    } else {
        horizon
    }
}

/// Rosenstein estimate of the largest Lyapunov exponent, nats/sample.
pub fn lyapunov_estimate(
    signal: &[f64],
    dim: usize,
    delay: usize,
    fit_window: Option<(usize, usize)>,
) -> Result<f64> {
    let params = LyapunovParams {
        fit_window,
        ..LyapunovParams::new(dim, delay)
    };
    divergence_curve(signal, &params)?.slope()
}

/// Largest of the Rosenstein estimates over a set of embedding dimensions.
pub fn lle(signal: &[f64], delay: usize, dims: &[usize]) -> Result<f64> {
    if dims.is_empty() {
        return Err(Error::InvalidParameter("empty dimension set".into()));
    }
    dims.iter().try_fold(f64::NEG_INFINITY, |acc, &m| {
        Ok(acc.max(lyapunov_estimate(signal, m, delay, None)?))
    })
}
