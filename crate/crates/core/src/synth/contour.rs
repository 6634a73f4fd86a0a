use std::f64::consts::TAU;

use rand::Rng;

use crate::imaging::{trace_contour, BinaryMask, Contour};
use crate::{seeded_rng, Error, Result};

/// Smallest accepted `n_points`.
const MIN_POINTS: usize = 64;
/// Angular samples used to verify that the radius stays positive.
const RADIUS_CHECK_SAMPLES: usize = 4096;
/// Background pixels kept around the lesion.
const MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    Benign,
    Malignant,
}

impl std::str::FromStr for ContourKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "benign" => Ok(Self::Benign),
            "malignant" => Ok(Self::Malignant),
            _ => Err(Error::InvalidParameter(format!(
                "contour kind {s:?} is not benign or malignant"
            ))),
        }
    }
}

impl std::fmt::Display for ContourKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Benign => "benign",
            Self::Malignant => "malignant",
        })
    }
}

/// Recipe for `r(theta) = s (1 + amp sum_k c_k cos(k theta + phi_k))`.
///
/// Benign contours use harmonics 2..=4; malignant ones use 2..=n_points/4.
/// The weights `c_k` are `U[0.5, 1] k^-spectral_decay`, normalised to sum to
/// one, so `|r/s - 1| <= amp`. The scale `s` makes the enclosed area equal
/// to `pi base_radius^2` whatever the spectrum.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContourParams {
    pub kind: ContourKind,
    pub base_radius: f64,
    pub n_points: usize,
    pub amp: f64,
    pub spectral_decay: f64,
    pub seed: u64,
}

impl ContourParams {
    pub fn benign(base_radius: f64, seed: u64) -> Self {
        Self {
            kind: ContourKind::Benign,
            base_radius,
            n_points: 256,
            amp: 0.12,
            spectral_decay: 3.0,
            seed,
        }
    }

    pub fn malignant(base_radius: f64, seed: u64) -> Self {
        Self {
            kind: ContourKind::Malignant,
            base_radius,
            n_points: 256,
            amp: 0.11,
            spectral_decay: 0.0,
            seed,
        }
    }

    pub fn of_kind(kind: ContourKind, base_radius: f64, seed: u64) -> Self {
        match kind {
            ContourKind::Benign => Self::benign(base_radius, seed),
            ContourKind::Malignant => Self::malignant(base_radius, seed),
        }
    }

    pub fn max_harmonic(&self) -> usize {
        match self.kind {
            ContourKind::Benign => 4,
            ContourKind::Malignant => (self.n_points / 4).max(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub k: usize,
    pub weight: f64,
    pub phase: f64,
}

#[derive(Debug, Clone)]
pub struct SynthContour {
    pub params: ContourParams,
    pub harmonics: Vec<Harmonic>,
    /// Radius scale `s`.
    pub scale: f64,
    /// Generating centre in pixel coordinates.
    pub centre: (f64, f64),
    pub mask: BinaryMask,
    pub contour: Contour,
}

impl SynthContour {
    /// Generating radius at screen angle `theta` (y down).
    pub fn radius_at(&self, theta: f64) -> f64 {
        radius(&self.harmonics, self.scale, self.params.amp, theta)
    }
}

fn radius(harmonics: &[Harmonic], scale: f64, amp: f64, theta: f64) -> f64 {
    let wave: f64 = harmonics
        .iter()
        .map(|h| h.weight * (h.k as f64 * theta + h.phase).cos())
        .sum();
    scale * (1.0 + amp * wave)
}

/// Draws the harmonic spectrum and rasterises the enclosed region.
pub fn gen_contour(p: &ContourParams) -> Result<SynthContour> {
    if p.n_points < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "n_points must be at least {MIN_POINTS}, got {}",
            p.n_points
        )));
    }
    if !(p.base_radius > 0.0 && p.base_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "base_radius must be positive, got {}",
            p.base_radius
        )));
    }
    if !(p.amp >= 0.0 && p.amp.is_finite() && p.spectral_decay.is_finite()) {
        return Err(Error::InvalidParameter(
            "amp must be non-negative and finite".into(),
        ));
    }
    if p.amp >= 1.0 {
        return Err(Error::SelfIntersection);
    }
    let mut rng = seeded_rng(p.seed);
    let mut harmonics: Vec<Harmonic> = (2..=p.max_harmonic())
        .map(|k| Harmonic {
            k,
            weight: rng.random_range(0.5..1.0) * (k as f64).powf(-p.spectral_decay),
            phase: rng.random_range(0.0..TAU),
        })
        .collect();
    let total: f64 = harmonics.iter().map(|h| h.weight).sum();
    for h in &mut harmonics {
        h.weight /= total;
    }
    let power: f64 = harmonics.iter().map(|h| h.weight * h.weight).sum();
    let scale = p.base_radius / (1.0 + 0.5 * p.amp * p.amp * power).sqrt();

    let mut r_max: f64 = 0.0;
    for i in 0..RADIUS_CHECK_SAMPLES {
        let r = radius(
            &harmonics,
            scale,
            p.amp,
            TAU * i as f64 / RADIUS_CHECK_SAMPLES as f64,
        );
        if r <= 0.0 {
            return Err(Error::SelfIntersection);
        }
        r_max = r_max.max(r);
    }
    let half = (r_max + MARGIN).ceil();
    let size = 2 * half as usize + 1;
    let centre = (half, half);
    let mut mask = BinaryMask::empty(size, size)?;
    for y in 0..size {
        for x in 0..size {
            let (dx, dy) = (x as f64 - centre.0, y as f64 - centre.1);
            let d = dx.hypot(dy);
            if d <= radius(&harmonics, scale, p.amp, dy.atan2(dx)) {
                mask.set(x, y, true);
            }
        }
    }
    let contour = trace_contour(&mask)?;
    Ok(SynthContour {
        params: p.clone(),
        harmonics,
        scale,
        centre,
        mask,
        contour,
    })
}
