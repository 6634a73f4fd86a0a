use rand::Rng;

use crate::{seeded_rng, Error, Result};

/// Orbits with `|x|` above this are reported as divergent.
const DIVERGENCE_BOUND: f64 = 1e6;

/// `x <- r x (1 - x)`, returning `n` values after discarding `burn_in`.
pub fn logistic_series(r: f64, n: usize, x0: f64, burn_in: usize) -> Result<Vec<f64>> {
    if !(r > 0.0 && r <= 4.0) {
        return Err(Error::InvalidParameter(format!("r = {r} outside (0, 4]")));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::InvalidParameter(format!("x0 = {x0} outside (0, 1)")));
    }
    let mut x = x0;
    for _ in 0..burn_in {
        x = r * x * (1.0 - x);
    }
    Ok((0..n)
        .map(|_| {
            let v = x;
            x = r * x * (1.0 - x);
            v
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonParams {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Default for HenonParams {
    fn default() -> Self {
        Self {
            a: 1.4,
            b: 0.3,
            x0: 0.1,
            y0: 0.1,
        }
    }
}

/// x-coordinate of the Hénon orbit `x' = 1 - a x^2 + y`, `y' = b x`.
pub fn henon_series(n: usize, p: &HenonParams, burn_in: usize) -> Result<Vec<f64>> {
    let (mut x, mut y) = (p.x0, p.y0);
    let mut out = Vec::with_capacity(n);
    for i in 0..burn_in + n {
        if i >= burn_in {
            out.push(x);
        }
        (x, y) = (1.0 - p.a * x * x + y, p.b * x);
        if !(x.abs() <= DIVERGENCE_BOUND) {
            return Err(Error::Divergence(i + 1));
        }
    }
    Ok(out)
}

/// Seeded uniform noise rescaled to zero mean and unit population variance.
pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if n < 2 {
        return vec![0.0; n];
    }
    let mean = raw.iter().sum::<f64>() / n as f64;
    let std = (raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
    raw.iter().map(|v| (v - mean) / std).collect()
}

/// `sin(2 pi i / period)`.
pub fn sine(n: usize, period: f64) -> Result<Vec<f64>> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {period}"
        )));
    }
    Ok((0..n)
        .map(|i| (std::f64::consts::TAU * i as f64 / period).sin())
        .collect())
}
