use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{gen_contour, ContourKind, ContourParams, SynthContour};
use crate::classify::{DeepRecord, DEEP_DIM};
use crate::imaging::{roi_bbox, BinaryMask};
use crate::nonlinear::{extract_features, FeatureConfig, NonlinearFeatures};
use crate::{seeded_rng, Error, Result};

/// Binary 3x3 neighbourhoods.
const PATTERNS: usize = 512;
/// Background border added around the lesion before pooling.
const ROI_PAD: usize = 2;

/// Stand-in for a global-pooled CNN embedding of a lesion mask: one layer of
/// seeded random 3x3 filters with bias, ReLU, then global average pooling.
///
/// On a binary input the filter response depends only on the 3x3 pattern
/// under it, so each channel is a fixed function of the pattern histogram.
#[derive(Debug, Clone)]
pub struct RandomConvEmbedder {
    /// `PATTERNS x dim`, ReLU already applied.
    table: Vec<f64>,
    dim: usize,
}

impl RandomConvEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let filters: Vec<([f64; 9], f64)> = (0..dim)
            .map(|_| {
                let mut w = [0.0; 9];
                for v in &mut w {
                    *v = rng.sample::<f64, _>(StandardNormal) / 3.0;
                }
                (w, rng.sample::<f64, _>(StandardNormal) * 0.5)
            })
            .collect();
        let mut table = vec![0.0; PATTERNS * dim];
        for p in 0..PATTERNS {
            for (c, (w, b)) in filters.iter().enumerate() {
                let z: f64 = (0..9)
                    .filter(|bit| p >> bit & 1 == 1)
                    .map(|bit| w[bit])
                    .sum::<f64>()
                    + b;
                table[p * dim + c] = z.max(0.0);
            }
        }
        Self { table, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn embed(&self, mask: &BinaryMask) -> Result<Vec<f64>> {
        let bb = roi_bbox(mask, ROI_PAD)?;
        let mut hist = vec![0usize; PATTERNS];
        for y in bb.y0..bb.y0 + bb.height {
            for x in bb.x0..bb.x0 + bb.width {
                let mut p = 0;
                for (bit, (dx, dy)) in (-1..=1i64)
                    .flat_map(|dy| (-1..=1i64).map(move |dx| (dx, dy)))
                    .enumerate()
                {
                    if mask.get_signed(x as i64 + dx, y as i64 + dy) {
                        p |= 1 << bit;
                    }
                }
                hist[p] += 1;
            }
        }
        let n = (bb.width * bb.height) as f64;
        let mut out = vec![0.0; self.dim];
        for (p, &count) in hist.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let row = &self.table[p * self.dim..(p + 1) * self.dim];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += count as f64 * v;
            }
        }
        for o in &mut out {
            *o /= n;
        }
        Ok(out)
    }
}

/// Deep-feature stand-in of the default length for one mask.
pub fn deep_embedding(mask: &BinaryMask, seed: u64) -> Result<Vec<f64>> {
    RandomConvEmbedder::new(DEEP_DIM, seed).embed(mask)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    /// Contours per class; pair `i` shares radius and seed across classes.
    pub n_per_class: usize,
    pub radius_range: (f64, f64),
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            n_per_class: 200,
            radius_range: (45.0, 60.0),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub id: String,
    /// 0 benign, 1 malignant.
    pub label: u8,
    pub contour: SynthContour,
}

/// Paired benign/malignant contours with matched radius (hence area) and
/// seed, ordered pair by pair.
pub fn build_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusItem>> {
    let (lo, hi) = spec.radius_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius range ({lo}, {hi}) is invalid"
        )));
    }
    let mut rng = seeded_rng(spec.seed);
    let draws: Vec<(f64, u64)> = (0..spec.n_per_class)
        .map(|_| {
            let r = if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            };
            (r, rng.random::<u64>())
        })
        .collect();
    draws
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &(r, seed))| {
            [ContourKind::Benign, ContourKind::Malignant]
                .into_iter()
                .map(move |kind| {
                    let label = u8::from(kind == ContourKind::Malignant);
                    let prefix = if label == 1 { "malignant" } else { "benign" };
                    Ok(CorpusItem {
                        id: format!("{prefix}-{i:04}"),
                        label,
                        contour: gen_contour(&ContourParams::of_kind(kind, r, seed))?,
                    })
                })
        })
        .collect()
}

/// Deep stand-in and handcrafted features of every corpus item, in order.
pub fn corpus_features(
    items: &[CorpusItem],
    cfg: &FeatureConfig,
    embed_seed: u64,
) -> Result<(Vec<DeepRecord>, Vec<(String, NonlinearFeatures)>)> {
    let embedder = RandomConvEmbedder::new(DEEP_DIM, embed_seed);
    let rows = items
        .par_iter()
        .map(|it| {
            let mask = &it.contour.mask;
            Ok((
                DeepRecord {
                    id: it.id.clone(),
                    label: it.label,
                    features: embedder.embed(mask)?,
                },
                (it.id.clone(), extract_features(mask, cfg)?),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().unzip())
}
