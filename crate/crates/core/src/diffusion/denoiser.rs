use std::fmt;
use std::str::FromStr;

use super::{NoiseSchedule, Tensor2D};
use crate::{Error, Result};

/// Diagnostic class a sample is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Normal,
    Malignant,
}

impl Condition {
    pub fn index(self) -> usize {
        match self {
            Condition::Normal => 0,
            Condition::Malignant => 1,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Normal => "normal",
            Condition::Malignant => "malignant",
        })
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" | "healthy" | "benign" => Ok(Condition::Normal),
            "malignant" => Ok(Condition::Malignant),
            _ => Err(Error::InvalidParameter(format!("unknown condition {s:?}"))),
        }
    }
}

/// Noise-prediction network contract: given `x_t`, the step and the class,
/// return a prediction of the noise in `x_t` with the same shape.
///
/// Implementations must be deterministic in their inputs.
pub trait Denoiser: Send + Sync {
    fn predict_noise(&self, x_t: &Tensor2D, t: usize, cond: Condition) -> Result<Tensor2D>;
}

/// Always predicts zero noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDenoiser;

impl Denoiser for ZeroDenoiser {
    fn predict_noise(&self, x_t: &Tensor2D, _t: usize, _cond: Condition) -> Result<Tensor2D> {
        Ok(Tensor2D::zeros(x_t.shape()))
    }
}

/// Independent per-pixel Gaussian `N(mean, std^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTarget {
    pub mean: f64,
    pub std: f64,
}

/// Minimum-MSE noise predictor when the data are i.i.d. Gaussian pixels.
///
/// With `x_0 ~ N(mu, s^2)` and `x_t = sqrt(ab) x_0 + sqrt(1 - ab) eps`, the
/// pair `(eps, x_t)` is jointly Gaussian and
/// `E[eps | x_t] = sqrt(1 - ab) (x_t - sqrt(ab) mu) / (ab s^2 + 1 - ab)`.
#[derive(Debug, Clone)]
pub struct GaussianOptimalDenoiser {
    schedule: NoiseSchedule,
    targets: [GaussianTarget; 2],
}

impl GaussianOptimalDenoiser {
    pub fn new(
        schedule: NoiseSchedule,
        normal: GaussianTarget,
        malignant: GaussianTarget,
    ) -> Result<Self> {
        for t in [normal, malignant] {
            if !(t.mean.is_finite() && t.std.is_finite() && t.std >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "invalid Gaussian target {t:?}"
                )));
            }
        }
        Ok(Self {
            schedule,
            targets: [normal, malignant],
        })
    }

    /// Same target for both classes.
    pub fn unconditional(schedule: NoiseSchedule, target: GaussianTarget) -> Result<Self> {
        Self::new(schedule, target, target)
    }

    pub fn target(&self, cond: Condition) -> GaussianTarget {
        self.targets[cond.index()]
    }

    /// Scalar posterior mean of the noise.
    pub fn posterior_noise(&self, x_t: f64, t: usize, cond: Condition) -> f64 {
        let GaussianTarget { mean, std } = self.target(cond);
        let ab = self.schedule.alpha_bar(t);
        (1.0 - ab).sqrt() * (x_t - ab.sqrt() * mean) / (ab * std * std + 1.0 - ab)
    }
}

impl Denoiser for GaussianOptimalDenoiser {
    fn predict_noise(&self, x_t: &Tensor2D, t: usize, cond: Condition) -> Result<Tensor2D> {
        self.schedule.check_step(t)?;
        Ok(x_t.map(|x| self.posterior_noise(x, t, cond)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_parsing() {
        assert_eq!("normal".parse::<Condition>().unwrap(), Condition::Normal);
        assert_eq!(
            "malignant".parse::<Condition>().unwrap(),
            Condition::Malignant
        );
        assert!("other".parse::<Condition>().is_err());
        assert_eq!(Condition::Malignant.to_string(), "malignant");
    }

    #[test]
    fn zero_denoiser_keeps_shape() {
        let x = Tensor2D::filled((2, 3), 1.0);
        let e = ZeroDenoiser
            .predict_noise(&x, 5, Condition::Normal)
            .unwrap();
        assert_eq!(e.shape(), (2, 3));
        assert!(e.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gaussian_denoiser_rejects_bad_step() {
        let s = NoiseSchedule::linear(10, 1e-4, 0.02).unwrap();
        let d = GaussianOptimalDenoiser::unconditional(
            s,
            GaussianTarget {
                mean: 0.0,
                std: 1.0,
            },
        )
        .unwrap();
        let x = Tensor2D::zeros((1, 1));
        assert!(d.predict_noise(&x, 11, Condition::Normal).is_err());
        // standard-normal data: x_t is itself standard normal and
        // E[eps | x_t] = sqrt(1 - ab) x_t
        let ab: f64 = 1.0 - 1e-4;
        let p = d.posterior_noise(2.0, 1, Condition::Normal);
        assert!((p - (1.0 - ab).sqrt() * 2.0).abs() < 1e-12);
    }
}
