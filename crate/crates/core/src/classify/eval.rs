use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train, Dataset, GbdtConfig};
use crate::{seeded_rng, Error, Result};

/// Probabilities at or above this value are called malignant.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// Single-evaluation confusion counts and rates, in percent.
///
/// A rate whose denominator is zero is `None` (serialised as `null`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn confusion_metrics(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMetrics> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Empty);
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fp += 1,
            (1, 0) => fn_ += 1,
            _ => {
                return Err(Error::Format(format!(
                    "labels must be 0 or 1, got ({t}, {p})"
                )))
            }
        }
    }
    let pct = |num: usize, den: usize| (den > 0).then(|| 100.0 * num as f64 / den as f64);
    Ok(ConfusionMetrics {
        tp,
        tn,
        fp,
        fn_,
        accuracy: 100.0 * (tp + tn) as f64 / y_true.len() as f64,
        sensitivity: pct(tp, tp + fn_),
        specificity: pct(tn, tn + fp),
    })
}

/// Mean and population standard deviation over the folds where the value is
/// defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub n_folds: usize,
}

impl MeanStd {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let v: Vec<f64> = values.flatten().collect();
        if v.is_empty() {
            return Self {
                mean: None,
                std: None,
                n_folds: 0,
            };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Self {
            mean: Some(mean),
            std: Some(var.sqrt()),
            n_folds: v.len(),
        }
    }
}

impl std::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.mean, self.std) {
            (Some(m), Some(s)) => write!(f, "{m:.2}±{s:.2}"),
            _ => f.write_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: ConfusionMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub accuracy: MeanStd,
    pub sensitivity: MeanStd,
    pub specificity: MeanStd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    /// Let synthetic samples enter held-out folds.
    pub include_synthetic_in_test: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            include_synthetic_in_test: false,
        }
    }
}

/// Fold index per sample; `None` marks samples that only ever train.
///
/// Each class is shuffled with one seeded generator (class 0 first) and dealt
/// round-robin over the folds, so fold class proportions differ by at most one
/// sample.
pub fn fold_assignment(ds: &Dataset, opts: &CvOptions) -> Result<Vec<Option<usize>>> {
    if opts.k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 folds, got {}",
            opts.k
        )));
    }
    let mut rng = seeded_rng(opts.seed);
    let mut folds = vec![None; ds.len()];
    for label in 0..=1u8 {
        let mut idx: Vec<usize> = ds
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == label && (opts.include_synthetic_in_test || !s.synthetic))
            .map(|(i, _)| i)
            .collect();
        if idx.len() < opts.k {
            return Err(Error::TooFewSamplesPerClass {
                label,
                found: idx.len(),
                required: opts.k,
            });
        }
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[i] = Some(pos % opts.k);
        }
    }
    Ok(folds)
}

/// Stratified k-fold evaluation at the fixed decision threshold.
///
/// Fold `f` trains with seed `seed + f`.
pub fn stratified_kfold(ds: &Dataset, cfg: &GbdtConfig, opts: &CvOptions) -> Result<CvReport> {
    let assignment = fold_assignment(ds, opts)?;
    let folds = (0..opts.k)
        .into_par_iter()
        .map(|fold| {
            let (test, train_idx): (Vec<usize>, Vec<usize>) =
                (0..ds.len()).partition(|&i| assignment[i] == Some(fold));
            let model = train(
                &ds.subset(&train_idx)?,
                cfg,
                opts.seed.wrapping_add(fold as u64),
            )?;
            let mut y_true = Vec::with_capacity(test.len());
            let mut y_pred = Vec::with_capacity(test.len());
            for &i in &test {
                let s = &ds.samples()[i];
                y_true.push(s.label);
                y_pred.push(u8::from(
                    model.predict_proba(&s.features)? >= DECISION_THRESHOLD,
                ));
            }
            Ok(FoldResult {
                fold,
                n_train: train_idx.len(),
                n_test: test.len(),
                metrics: confusion_metrics(&y_true, &y_pred)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport {
        accuracy: MeanStd::of(folds.iter().map(|f| Some(f.metrics.accuracy))),
        sensitivity: MeanStd::of(folds.iter().map(|f| f.metrics.sensitivity)),
        specificity: MeanStd::of(folds.iter().map(|f| f.metrics.specificity)),
        folds,
    })
}
