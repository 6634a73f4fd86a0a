//! Approximate entropy `ApEn(m, r) = Phi^m(r) - Phi^{m+1}(r)`.
//!
//! `Phi^m(r)` is the mean over templates of `ln C_i^m(r)`, where `C_i^m(r)` is
//! the fraction of length-`m` templates within Chebyshev distance `r` of
//! template `i`. Self-matches count, so every `C_i^m` is positive.

use crate::{Error, Result};

pub const APEN_DIM: usize = 2;
/// Tolerance as a multiple of the population standard deviation.
pub const APEN_R_FACTOR: f64 = 0.2;

/// Approximate entropy with tolerance `r = r_factor * std(signal)`.
///
/// A constant signal yields 0 (every template matches every other).
pub fn approx_entropy(signal: &[f64], m: usize, r_factor: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "template length m must be >= 1".into(),
        ));
    }
    if !(r_factor >= 0.0 && r_factor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r_factor must be finite and non-negative, got {r_factor}"
        )));
    }
    let n = signal.len();
    if n < m + 2 {
        return Err(Error::SignalTooShort {
            len: n,
            required: m + 1,
        });
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let var = signal.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Ok(0.0);
    }
    let r = r_factor * var.sqrt();

    // Templates of length m start at 0..n_m; those of length m+1 at 0..n_m-1.
    let n_m = n - m + 1;
    let mut count_m = vec![1usize; n_m];
    let mut count_m1 = vec![1usize; n_m - 1];
    for i in 0..n_m {
        for j in i + 1..n_m {
            if (0..m).all(|k| (signal[i + k] - signal[j + k]).abs() <= r) {
                count_m[i] += 1;
                count_m[j] += 1;
                if j + m < n && (signal[i + m] - signal[j + m]).abs() <= r {
                    count_m1[i] += 1;
                    count_m1[j] += 1;
                }
            }
        }
    }
    let phi = |counts: &[usize]| -> f64 {
        let total = counts.len() as f64;
        counts.iter().map(|&c| (c as f64 / total).ln()).sum::<f64>() / total
    };
    Ok(phi(&count_m) - phi(&count_m1))
}
