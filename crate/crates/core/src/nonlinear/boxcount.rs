//! Box-counting dimension of a planar point set.
//!
//! Points are mapped into the unit square by translating the bounding-box
//! corner to the origin and dividing by the larger bounding-box side, so the
//! aspect ratio is kept. The grid of each scale is anchored at that corner.

use super::lyapunov::least_squares_slope;
use crate::{Error, Result};

/// Minimum number of scales in a fit.
const MIN_SCALES: usize = 4;

/// `2^-k` for `k` in `k_lo..=k_hi`.
pub fn dyadic_scales(k_lo: u32, k_hi: u32) -> Vec<f64> {
    (k_lo..=k_hi).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// `2^-1 ..= 2^-8`.
pub fn default_scales() -> Vec<f64> {
    dyadic_scales(1, 8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Scales that entered the fit.
    pub used: Vec<bool>,
    /// Raw least-squares slope of `ln N(eps)` against `ln(1/eps)`.
    pub slope: f64,
}

impl BoxCount {
    /// Slope clamped to the meaningful planar range `[0, 2]`.
    pub fn dimension(&self) -> f64 {
        if !(0.0..=2.0).contains(&self.slope) {
            log::warn!(
                "box-counting slope {:.4} outside [0, 2]; clamping",
                self.slope
            );
        }
        self.slope.clamp(0.0, 2.0)
    }
}

/// Counts occupied boxes per scale and fits the log-log slope.
///
/// A scale whose count exceeds half the number of distinct points is
/// undersampled (most boxes hold a single point) and is left out of the fit.
/// If fewer than four scales survive, the four coarsest are fit instead.
pub fn box_count(points: &[(f64, f64)], scales: &[f64]) -> Result<BoxCount> {
    if scales.len() < MIN_SCALES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SCALES} scales, got {}",
            scales.len()
        )));
    }
    if let Some(s) = scales.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::InvalidParameter(format!("scale {s} outside (0, 1]")));
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::InvalidParameter("non-finite point".into()));
    }
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let extent = (x1 - x0).max(y1 - y0);
    if points.is_empty() || !(extent > 0.0) {
        return Err(Error::DegeneratePointSet);
    }
    let unit: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| ((x - x0) / extent, (y - y0) / extent))
        .collect();

    let mut distinct: Vec<(u64, u64)> = unit
        .iter()
        .map(|&(x, y)| (x.to_bits(), y.to_bits()))
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    let n_distinct = distinct.len();

    let counts: Vec<usize> = scales
        .iter()
        .map(|&eps| {
            let cells = (1.0 / eps).ceil() as u64;
            let mut keys: Vec<u64> = unit
                .iter()
                .map(|&(x, y)| {
                    let bx = ((x / eps).floor() as u64).min(cells - 1);
                    let by = ((y / eps).floor() as u64).min(cells - 1);
                    bx * cells + by
                })
                .collect();
            keys.sort_unstable();
            keys.dedup();
            keys.len()
        })
        .collect();

    let mut used: Vec<bool> = counts.iter().map(|&c| 2 * c <= n_distinct).collect();
    if used.iter().filter(|&&u| u).count() < MIN_SCALES {
        let mut order: Vec<usize> = (0..scales.len()).collect();
        order.sort_by(|&a, &b| scales[b].total_cmp(&scales[a]));
        used = vec![false; scales.len()];
        for &i in order.iter().take(MIN_SCALES) {
            used[i] = true;
        }
    }
    let pts: Vec<(f64, f64)> = (0..scales.len())
        .filter(|&i| used[i])
        .map(|i| ((1.0 / scales[i]).ln(), (counts[i] as f64).ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    Ok(BoxCount {
        scales: scales.to_vec(),
        counts,
        used,
        slope,
    })
}

/// Box-counting dimension, clamped to `[0, 2]`.
pub fn box_counting_dim(points: &[(f64, f64)], scales: &[f64]) -> Result<f64> {
    Ok(box_count(points, scales)?.dimension())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_are_degenerate() {
        let pts = vec![(1.0, 1.0); 10];
        assert!(matches!(
            box_counting_dim(&pts, &default_scales()),
            Err(Error::DegeneratePointSet)
        ));
        assert!(matches!(
            box_counting_dim(&[], &default_scales()),
            Err(Error::DegeneratePointSet)
        ));
    }

    #[test]
    fn scale_validation() {
        let pts = [(0.0, 0.0), (1.0, 1.0)];
        assert!(box_counting_dim(&pts, &[0.5, 0.25, 0.125]).is_err());
        assert!(box_counting_dim(&pts, &[2.0, 0.5, 0.25, 0.125]).is_err());
        assert!(box_counting_dim(&[(0.0, f64::NAN), (1.0, 1.0)], &default_scales()).is_err());
    }

    #[test]
    fn two_points_have_dimension_zero() {
        let pts = [(0.0, 0.0), (1.0, 1.0)];
        let bc = box_count(&pts, &default_scales()).unwrap();
        assert_eq!(bc.counts, vec![2; 8]);
        assert_eq!(bc.used.iter().filter(|&&u| u).count(), 4);
        assert!(bc.used[..4].iter().all(|&u| u));
        assert_eq!(bc.dimension(), 0.0);
    }

    #[test]
    fn full_grid_has_dimension_two() {
        let pts: Vec<(f64, f64)> = (0..512)
            .flat_map(|i| (0..512).map(move |j| (i as f64, j as f64)))
            .collect();
        let d = box_counting_dim(&pts, &default_scales()).unwrap();
        assert!((d - 2.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn dyadic() {
        assert_eq!(dyadic_scales(1, 3), vec![0.5, 0.25, 0.125]);
    }
}
