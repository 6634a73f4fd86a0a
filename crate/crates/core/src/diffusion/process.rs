//! Forward corruption, reverse steps, ancestral sampling and the simple loss.
//!
//! Random draws happen in row-major order, one generator per chain, so a
//! fixed seed reproduces a trajectory bit for bit.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::{Condition, Denoiser, NoiseSchedule, Tensor2D};
use crate::{Error, Result, SeededRng};

/// `x_t = sqrt(ab_t) x_0 + sqrt(1 - ab_t) eps`.
pub fn q_sample(x0: &Tensor2D, t: usize, eps: &Tensor2D, s: &NoiseSchedule) -> Result<Tensor2D> {
    s.check_step(t)?;
    let ab = s.alpha_bar(t);
    let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
    x0.zip_with(eps, |x, e| a * x + b * e)
}

/// Reverse-process mean
/// `(x_t - beta_t / sqrt(1 - ab_t) * eps_hat) / sqrt(1 - beta_t)`.
pub fn reverse_mean(
    x_t: &Tensor2D,
    t: usize,
    eps_hat: &Tensor2D,
    s: &NoiseSchedule,
) -> Result<Tensor2D> {
    s.check_step(t)?;
    let beta = s.beta(t);
    let coef = beta / (1.0 - s.alpha_bar(t)).sqrt();
    let scale = 1.0 / (1.0 - beta).sqrt();
    x_t.zip_with(eps_hat, |x, e| scale * (x - coef * e))
}

/// Reverse-step standard deviation, `sqrt(beta_t)`.
pub fn sigma(s: &NoiseSchedule, t: usize) -> f64 {
    s.beta(t).sqrt()
}

/// One ancestral step `x_{t-1} = mu(x_t, t) + sigma_t z`. No noise is added
/// at `t = 1`, and no random numbers are drawn there.
pub fn p_sample_step<R: Rng + ?Sized>(
    x_t: &Tensor2D,
    t: usize,
    d: &dyn Denoiser,
    cond: Condition,
    s: &NoiseSchedule,
    rng: &mut R,
) -> Result<Tensor2D> {
    s.check_step(t)?;
    let eps_hat = d.predict_noise(x_t, t, cond)?;
    x_t.check_shape(&eps_hat)?;
    let mean = reverse_mean(x_t, t, &eps_hat, s)?;
    if t == 1 {
        return Ok(mean);
    }
    let z = Tensor2D::randn(mean.shape(), rng);
    let sd = sigma(s, t);
    mean.zip_with(&z, |m, z| m + sd * z)
}

/// Full ancestral chain: `x_T ~ N(0, I)`, then steps `T..=1`; returns `x_0`.
pub fn sample<R: Rng + ?Sized>(
    d: &dyn Denoiser,
    shape: (usize, usize),
    cond: Condition,
    s: &NoiseSchedule,
    rng: &mut R,
) -> Result<Tensor2D> {
    let mut x = Tensor2D::randn(shape, rng);
    for t in (1..=s.steps()).rev() {
        x = p_sample_step(&x, t, d, cond, s, rng)?;
    }
    Ok(x)
}

/// Runs `n` independent chains in parallel. Chain `i` owns a ChaCha8 stream
/// `i` keyed by `seed`, so results do not depend on the worker count.
pub fn sample_chains(
    d: &dyn Denoiser,
    shape: (usize, usize),
    cond: Condition,
    s: &NoiseSchedule,
    n: usize,
    seed: u64,
) -> Result<Vec<Tensor2D>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample(d, shape, cond, s, &mut rng)
        })
        .collect()
}

/// Simple noise-prediction loss: for each item draw `t ~ U{1..T}` and
/// `eps ~ N(0, I)` (in that order), corrupt, predict, and average
/// `(eps - eps_hat)^2` over the batch and all pixels.
pub fn loss_simple<R: Rng + ?Sized>(
    d: &dyn Denoiser,
    batch: &[(Tensor2D, Condition)],
    s: &NoiseSchedule,
    rng: &mut R,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (x0, cond) in batch {
        let t = rng.random_range(1..=s.steps());
        let eps = Tensor2D::randn(x0.shape(), rng);
        let x_t = q_sample(x0, t, &eps, s)?;
        let eps_hat = d.predict_noise(&x_t, t, *cond)?;
        let sq = eps.zip_with(&eps_hat, |a, b| (a - b) * (a - b))?;
        total += sq.data().iter().sum::<f64>();
        count += sq.data().len();
    }
    Ok(total / count as f64)
}
