use std::collections::HashMap;

use crate::io::{fmt_f64, parse_f64};
use crate::nonlinear::NonlinearFeatures;
use crate::{Error, Result};

/// Length of a global-pooled deep embedding.
pub const DEEP_DIM: usize = 2048;
/// Length of the handcrafted nonlinear descriptor.
pub const HAND_DIM: usize = 4;

/// `deep ++ hand` for the default embedding length.
pub fn fuse(deep: &[f64], hand: &[f64]) -> Result<Vec<f64>> {
    fuse_with(deep, hand, DEEP_DIM)
}

/// `deep ++ hand`, with the deep length fixed at `deep_len`.
pub fn fuse_with(deep: &[f64], hand: &[f64], deep_len: usize) -> Result<Vec<f64>> {
    if deep.len() != deep_len {
        return Err(Error::LengthMismatch {
            expected: deep_len,
            found: deep.len(),
        });
    }
    if hand.len() != HAND_DIM {
        return Err(Error::LengthMismatch {
            expected: HAND_DIM,
            found: hand.len(),
        });
    }
    let mut out = Vec::with_capacity(deep_len + HAND_DIM);
    out.extend_from_slice(deep);
    out.extend_from_slice(hand);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub features: Vec<f64>,
    pub label: u8,
    /// Generated rather than acquired; kept out of held-out folds by default.
    pub synthetic: bool,
}

/// Labelled samples sharing one feature length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    n_features: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let n_features = samples.first().ok_or(Error::Empty)?.features.len();
        for s in &samples {
            if s.features.len() != n_features {
                return Err(Error::LengthMismatch {
                    expected: n_features,
                    found: s.features.len(),
                });
            }
            if s.label > 1 {
                return Err(Error::Format(format!(
                    "sample {}: label {} is not 0 or 1",
                    s.id, s.label
                )));
            }
        }
        Ok(Self {
            samples,
            n_features,
        })
    }

    /// Unlabelled-id convenience for in-memory data.
    pub fn from_xy(x: Vec<Vec<f64>>, y: &[u8]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Self::new(
            x.into_iter()
                .zip(y)
                .enumerate()
                .map(|(i, (features, &label))| Sample {
                    id: i.to_string(),
                    features,
                    label,
                    synthetic: false,
                })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Subset in the order of `idx`.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| self.samples[i].clone()).collect())
    }
}

/// One row of a deep-feature CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepRecord {
    pub id: String,
    pub label: u8,
    pub features: Vec<f64>,
}

fn parse_label(field: &str) -> Result<u8> {
    match field.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::Format(format!("label {other:?} is not 0 or 1"))),
    }
}

/// Parses `id,label,f0..f{d-1}`. With `expected_dim`, every row must have
/// exactly that many feature columns.
pub fn parse_deep_csv(text: &str, expected_dim: Option<usize>) -> Result<Vec<DeepRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.len() < 3 || &header[0] != "id" || &header[1] != "label" {
        return Err(Error::Format(
            "deep-feature CSV header must start with `id,label,f0`".into(),
        ));
    }
    let dim = header.len() - 2;
    if let Some(d) = expected_dim {
        if d != dim {
            return Err(Error::LengthMismatch {
                expected: d,
                found: dim,
            });
        }
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let features = rec
            .iter()
            .skip(2)
            .map(parse_f64)
            .collect::<Result<Vec<_>>>()?;
        out.push(DeepRecord {
            id: rec[0].to_string(),
            label: parse_label(&rec[1])?,
            features,
        });
    }
    if out.is_empty() {
        return Err(Error::Empty);
    }
    Ok(out)
}

pub fn format_deep_csv(rows: &[DeepRecord]) -> String {
    let dim = rows.first().map_or(0, |r| r.features.len());
    let mut out = String::from("id,label");
    for j in 0..dim {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{}", r.id, r.label));
        for &v in &r.features {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelInfo {
    pub label: u8,
    pub synthetic: bool,
}

/// Parses `id,label[,synthetic]`; `synthetic` accepts `0/1/true/false`.
pub fn parse_labels_csv(text: &str) -> Result<Vec<(String, LabelInfo)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let has_synth = match header.iter().collect::<Vec<_>>().as_slice() {
        ["id", "label"] => false,
        ["id", "label", "synthetic"] => true,
        _ => {
            return Err(Error::Format(
                "labels CSV header must be `id,label[,synthetic]`".into(),
            ))
        }
    };
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let synthetic = if has_synth {
                match &rec[2] {
                    "0" | "false" => false,
                    "1" | "true" => true,
                    other => {
                        return Err(Error::Format(format!(
                            "synthetic flag {other:?} is not 0/1/true/false"
                        )))
                    }
                }
            } else {
                false
            };
            Ok((
                rec[0].to_string(),
                LabelInfo {
                    label: parse_label(&rec[1])?,
                    synthetic,
                },
            ))
        })
        .collect()
}

/// Which feature blocks enter the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Fused,
    Deep,
    Hand,
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fused" => Ok(Self::Fused),
            "deep" => Ok(Self::Deep),
            "hand" => Ok(Self::Hand),
            _ => Err(Error::InvalidParameter(format!(
                "mode {s:?} is not fused, deep or hand"
            ))),
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Fused => "fused",
            Self::Deep => "deep",
            Self::Hand => "hand",
        })
    }
}

/// Feature vectors keyed by id, without labels.
///
/// Order follows the deep file when the mode uses it (or no hand file is
/// given), else the hand file.
pub fn join_features(
    mode: FeatureMode,
    deep: Option<&[DeepRecord]>,
    hand: Option<&[(String, NonlinearFeatures)]>,
) -> Result<Vec<(String, Vec<f64>)>> {
    let needs_deep = mode != FeatureMode::Hand;
    let needs_hand = mode != FeatureMode::Deep;
    if needs_deep && deep.is_none() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} needs deep features"
        )));
    }
    if needs_hand && hand.is_none() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} needs handcrafted features"
        )));
    }
    let hand_by_id: HashMap<&str, &NonlinearFeatures> = hand
        .unwrap_or_default()
        .iter()
        .map(|(id, f)| (id.as_str(), f))
        .collect();
    let deep_by_id: HashMap<&str, &DeepRecord> = deep
        .unwrap_or_default()
        .iter()
        .map(|r| (r.id.as_str(), r))
        .collect();
    let ids: Vec<&str> = match deep {
        Some(d) if needs_deep || hand.is_none() => d.iter().map(|r| r.id.as_str()).collect(),
        _ => hand
            .unwrap_or_default()
            .iter()
            .map(|(id, _)| id.as_str())
            .collect(),
    };

    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let missing = |what: &str| Error::Format(format!("id {id:?} has no {what} features"));
        let hand_vec = if needs_hand {
            hand_by_id
                .get(id)
                .map(|f| f.to_array().to_vec())
                .ok_or_else(|| missing("handcrafted"))?
        } else {
            Vec::new()
        };
        let deep_rec = deep_by_id.get(id).copied();
        let features = match mode {
            FeatureMode::Hand => hand_vec,
            FeatureMode::Deep => deep_rec.ok_or_else(|| missing("deep"))?.features.clone(),
            FeatureMode::Fused => {
                let d = &deep_rec.ok_or_else(|| missing("deep"))?.features;
                fuse_with(d, &hand_vec, d.len())?
            }
        };
        out.push((id.to_string(), features));
    }
    Ok(out)
}

/// Joins the feature sources by id and attaches labels.
///
/// Labels come from the deep file, overridden by `labels` where given; in
/// hand-only mode without a deep file every id needs an entry in `labels`.
pub fn assemble_dataset(
    mode: FeatureMode,
    deep: Option<&[DeepRecord]>,
    hand: Option<&[(String, NonlinearFeatures)]>,
    labels: Option<&[(String, LabelInfo)]>,
) -> Result<Dataset> {
    let rows = join_features(mode, deep, hand)?;
    let deep_label: HashMap<&str, u8> = deep
        .unwrap_or_default()
        .iter()
        .map(|r| (r.id.as_str(), r.label))
        .collect();
    let label_by_id: HashMap<&str, LabelInfo> = labels
        .unwrap_or_default()
        .iter()
        .map(|(id, l)| (id.as_str(), *l))
        .collect();
    let mut samples = Vec::with_capacity(rows.len());
    for (id, features) in rows {
        let info = match (label_by_id.get(id.as_str()), deep_label.get(id.as_str())) {
            (Some(l), _) => *l,
            (None, Some(&label)) => LabelInfo {
                label,
                synthetic: false,
            },
            (None, None) => return Err(Error::Format(format!("no label for id {id:?}"))),
        };
        samples.push(Sample {
            id,
            features,
            label: info.label,
            synthetic: info.synthetic,
        });
    }
    Dataset::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuse_lengths_and_order() {
        let deep: Vec<f64> = (0..DEEP_DIM).map(|i| i as f64).collect();
        let hand = [1.5, 2.5, 3.5, 4.5];
        let f = fuse(&deep, &hand).unwrap();
        assert_eq!(f.len(), 2052);
        assert_eq!(&f[2048..2052], &hand);
        assert_eq!(&f[..2048], deep.as_slice());
        assert!(matches!(
            fuse(&deep[..2047], &hand),
            Err(Error::LengthMismatch {
                expected: 2048,
                found: 2047
            })
        ));
        assert!(fuse(&deep, &hand[..3]).is_err());
        assert_eq!(fuse_with(&[9.0], &hand, 1).unwrap().len(), 5);
    }

    #[test]
    fn deep_csv_roundtrip() {
        let rows = vec![
            DeepRecord {
                id: "a".into(),
                label: 0,
                features: vec![0.5, 1.0],
            },
            DeepRecord {
                id: "b".into(),
                label: 1,
                features: vec![-2.0, 3.25],
            },
        ];
        let text = format_deep_csv(&rows);
        assert!(text.starts_with("id,label,f0,f1\n"));
        assert_eq!(parse_deep_csv(&text, Some(2)).unwrap(), rows);
        assert!(parse_deep_csv(&text, Some(3)).is_err());
        assert!(parse_deep_csv("id,label,f0\nx,2,1.0\n", None).is_err());
    }

    #[test]
    fn labels_csv() {
        let l = parse_labels_csv("id,label,synthetic\na,1,true\nb,0,0\n").unwrap();
        assert_eq!(
            l[0].1,
            LabelInfo {
                label: 1,
                synthetic: true
            }
        );
        assert!(!l[1].1.synthetic);
        assert!(parse_labels_csv("id,y\n").is_err());
    }

    fn hand(v: f64) -> NonlinearFeatures {
        NonlinearFeatures {
            bcd: v,
            lle: v,
            le: v,
            apen: v,
        }
    }

    #[test]
    fn assemble_modes() {
        let deep = vec![
            DeepRecord {
                id: "a".into(),
                label: 0,
                features: vec![1.0, 2.0],
            },
            DeepRecord {
                id: "b".into(),
                label: 1,
                features: vec![3.0, 4.0],
            },
        ];
        let hand_rows = vec![("b".to_string(), hand(7.0)), ("a".to_string(), hand(6.0))];
        let fused =
            assemble_dataset(FeatureMode::Fused, Some(&deep), Some(&hand_rows), None).unwrap();
        assert_eq!(fused.n_features(), 6);
        assert_eq!(fused.samples()[0].id, "a");
        assert_eq!(
            fused.samples()[0].features,
            vec![1.0, 2.0, 6.0, 6.0, 6.0, 6.0]
        );
        let h = assemble_dataset(FeatureMode::Hand, Some(&deep), Some(&hand_rows), None).unwrap();
        assert_eq!(h.n_features(), 4);
        assert_eq!(h.labels(), vec![1, 0]);
        assert!(assemble_dataset(FeatureMode::Hand, None, Some(&hand_rows), None).is_err());
        assert!(assemble_dataset(FeatureMode::Fused, Some(&deep), None, None).is_err());
        let d = assemble_dataset(FeatureMode::Deep, Some(&deep), None, None).unwrap();
        assert_eq!(d.n_features(), 2);
    }

    #[test]
    fn ragged_dataset_rejected() {
        assert!(Dataset::from_xy(vec![vec![1.0], vec![1.0, 2.0]], &[0, 1]).is_err());
        assert!(Dataset::from_xy(vec![vec![1.0]], &[2]).is_err());
        assert!(Dataset::from_xy(vec![], &[]).is_err());
    }
}
