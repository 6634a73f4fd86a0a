//! Denoising-diffusion scheduler mathematics.
//!
//! Steps are 1-based: `t = 1` is the least noisy step and `t = T` the most.
//! All routines are written against the [`Denoiser`] contract; the two
//! built-in denoisers are analytic, which keeps every identity checkable.

mod denoiser;
mod process;
mod schedule;
mod tensor;

pub use denoiser::{Condition, Denoiser, GaussianOptimalDenoiser, GaussianTarget, ZeroDenoiser};
pub use process::{
    loss_simple, p_sample_step, q_sample, reverse_mean, sample, sample_chains, sigma,
};
pub use schedule::{NoiseSchedule, DEFAULT_BETA_END, DEFAULT_BETA_START, DEFAULT_STEPS};
pub use tensor::Tensor2D;
