//! Second-order gradient boosting of regression trees under logistic loss.
//!
//! Each round fits a tree to the gradients `g = p - y` and hessians
//! `h = p (1 - p)` of the current margins. Trees grow level by level with an
//! exact greedy search: every midpoint between consecutive distinct values of
//! every feature is scored with
//! `1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma`,
//! and a node splits only on positive gain. Leaves take `-eta G/(H+lambda)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{seeded_rng, Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtConfig {
    pub n_rounds: usize,
    pub eta: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub gamma: f64,
    /// Fraction of training rows drawn (seeded) for each tree.
    pub subsample: f64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            n_rounds: 200,
            eta: 0.1,
            max_depth: 4,
            lambda: 1.0,
            gamma: 0.0,
            subsample: 1.0,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be non-negative, got {}", self.gamma));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad(format!(
                "subsample must lie in (0, 1], got {}",
                self.subsample
            ));
        }
        Ok(())
    }
}

/// Tree node; `x[feature] < threshold` goes left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Flat tree with the root at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    fn validate(&self, n_features: usize) -> Result<()> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::Format("tree without nodes".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Leaf { value } if !value.is_finite() => {
                    return Err(Error::Format(format!("leaf {i} is not finite")))
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if feature >= n_features || !threshold.is_finite() {
                        return Err(Error::Format(format!("split {i} is invalid")));
                    }
                    // Children after parents rules out cycles.
                    if left <= i || right <= i || left >= n || right >= n {
                        return Err(Error::Format(format!("split {i} has bad children")));
                    }
                }
                Node::Leaf { .. } => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub format_version: u32,
    pub config: GbdtConfig,
    /// Prior log-odds of the malignant class.
    pub base_score: f64,
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

impl GbdtModel {
    pub fn predict_margin(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::LengthMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>())
    }

    /// Malignancy probability `sigmoid(base_score + sum of leaf values)`.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.predict_margin(x)?))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        m.config.validate()?;
        for t in &m.trees {
            t.validate(m.n_features)?;
        }
        Ok(m)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Negative log-likelihood of label `y` under margin `z`.
pub fn logistic_loss(y: u8, z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p() - f64::from(y) * z
}

fn mean_loss(y: &[u8], margins: &[f64]) -> f64 {
    y.iter()
        .zip(margins)
        .map(|(&y, &z)| logistic_loss(y, z))
        .sum::<f64>()
        / y.len() as f64
}

/// Best split of one frontier node along one feature.
#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Threshold `t` with `lo < t <= hi`, the midpoint whenever it is
/// representable strictly above `lo`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo / 2.0 + hi / 2.0;
    if mid > lo {
        mid
    } else {
        hi
    }
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    sorted: &'a [Vec<usize>],
    cfg: &'a GbdtConfig,
}

impl Grower<'_> {
    fn gain(&self, gl: f64, hl: f64, g: f64, h: f64) -> f64 {
        let l = self.cfg.lambda;
        let (gr, hr) = (g - gl, h - hl);
        0.5 * (gl * gl / (hl + l) + gr * gr / (hr + l) - g * g / (h + l)) - self.cfg.gamma
    }

    fn leaf_value(&self, g: f64, h: f64) -> f64 {
        -self.cfg.eta * g / (h + self.cfg.lambda)
    }

    /// Scans one feature for every frontier slot at once.
    fn scan_feature(
        &self,
        f: usize,
        slot_of: &[Option<usize>],
        totals: &[(f64, f64)],
        grad: &[f64],
        hess: &[f64],
    ) -> Vec<Option<Candidate>> {
        let k = totals.len();
        let mut acc = vec![(0.0f64, 0.0f64); k];
        let mut last: Vec<Option<f64>> = vec![None; k];
        let mut best: Vec<Option<Candidate>> = vec![None; k];
        for &r in &self.sorted[f] {
            let Some(s) = slot_of[r] else { continue };
            let v = self.x[r][f];
            if let Some(prev) = last[s] {
                if v > prev {
                    let gain = self.gain(acc[s].0, acc[s].1, totals[s].0, totals[s].1);
                    if best[s].is_none_or(|b| gain > b.gain) {
                        best[s] = Some(Candidate {
                            gain,
                            feature: f,
                            threshold: midpoint(prev, v),
                        });
                    }
                }
            }
            acc[s].0 += grad[r];
            acc[s].1 += hess[r];
            last[s] = Some(v);
        }
        best
    }

    fn grow(&self, rows: &[usize], grad: &[f64], hess: &[f64]) -> Tree {
        let n = self.x.len();
        let n_features = self.sorted.len();
        let mut nodes = vec![Node::Leaf { value: 0.0 }];
        // Frontier node id of each row taking part in this tree.
        let mut node_of: Vec<Option<usize>> = vec![None; n];
        for &r in rows {
            node_of[r] = Some(0);
        }
        let mut frontier = vec![0usize];
        for depth in 0..=self.cfg.max_depth {
            let mut slot_index = vec![usize::MAX; nodes.len()];
            for (s, &id) in frontier.iter().enumerate() {
                slot_index[id] = s;
            }
            let slot_of: Vec<Option<usize>> =
                node_of.iter().map(|o| o.map(|id| slot_index[id])).collect();
            let mut totals = vec![(0.0, 0.0); frontier.len()];
            for &r in rows {
                if let Some(s) = slot_of[r] {
                    totals[s].0 += grad[r];
                    totals[s].1 += hess[r];
                }
            }
            let best: Vec<Option<Candidate>> = if depth < self.cfg.max_depth {
                let per_feature: Vec<Vec<Option<Candidate>>> = (0..n_features)
                    .into_par_iter()
                    .map(|f| self.scan_feature(f, &slot_of, &totals, grad, hess))
                    .collect();
                // Feature order fixes ties independent of the worker count.
                let mut best = vec![None; frontier.len()];
                for cands in per_feature {
                    for (b, c) in best.iter_mut().zip(cands) {
                        if let Some(c) = c {
                            if b.is_none_or(|b: Candidate| c.gain > b.gain) {
                                *b = Some(c);
                            }
                        }
                    }
                }
                best
            } else {
                vec![None; frontier.len()]
            };

            let mut next = Vec::new();
            let mut children: Vec<Option<(usize, usize, usize, f64)>> = vec![None; frontier.len()];
            for (s, &id) in frontier.iter().enumerate() {
                match best[s] {
                    Some(c) if c.gain > 0.0 => {
                        let (left, right) = (nodes.len(), nodes.len() + 1);
                        nodes.push(Node::Leaf { value: 0.0 });
                        nodes.push(Node::Leaf { value: 0.0 });
                        nodes[id] = Node::Split {
                            feature: c.feature,
                            threshold: c.threshold,
                            left,
                            right,
                        };
                        children[s] = Some((left, right, c.feature, c.threshold));
                        next.push(left);
                        next.push(right);
                    }
                    _ => {
                        nodes[id] = Node::Leaf {
                            value: self.leaf_value(totals[s].0, totals[s].1),
                        };
                    }
                }
            }
            for &r in rows {
                if let Some(s) = slot_of[r] {
                    node_of[r] = children[s].map(
                        |(left, right, f, thr)| {
                            if self.x[r][f] < thr {
                                left
                            } else {
                                right
                            }
                        },
                    );
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Tree { nodes }
    }
}

fn check_dataset(ds: &Dataset) -> Result<()> {
    for (i, s) in ds.samples().iter().enumerate() {
        if let Some(j) = s.features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                sample: i,
                feature: j,
            });
        }
    }
    for label in 0..=1u8 {
        let count = ds.samples().iter().filter(|s| s.label == label).count();
        if count < 2 {
            return Err(Error::DegenerateDataset(format!(
                "class {label} has {count} samples; at least 2 are required"
            )));
        }
    }
    Ok(())
}

/// Fits a model; see [`train_with_history`].
pub fn train(ds: &Dataset, cfg: &GbdtConfig, seed: u64) -> Result<GbdtModel> {
    Ok(train_with_history(ds, cfg, seed)?.0)
}

/// Fits a model and returns the mean training logistic loss before the first
/// round and after every round (`n_rounds + 1` values).
///
/// The seed only drives row subsampling, so with `subsample = 1` the result
/// does not depend on it.
pub fn train_with_history(
    ds: &Dataset,
    cfg: &GbdtConfig,
    seed: u64,
) -> Result<(GbdtModel, Vec<f64>)> {
    cfg.validate()?;
    check_dataset(ds)?;
    let x: Vec<Vec<f64>> = ds.samples().iter().map(|s| s.features.clone()).collect();
    let y = ds.labels();
    let n = x.len();
    let n_features = ds.n_features();

    let sorted: Vec<Vec<usize>> = (0..n_features)
        .into_par_iter()
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let prior = y.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
    let base_score = (prior / (1.0 - prior)).ln();
    let mut margins = vec![base_score; n];
    let mut history = vec![mean_loss(&y, &margins)];
    let mut rng = seeded_rng(seed);
    let grower = Grower {
        x: &x,
        sorted: &sorted,
        cfg,
    };
    let mut trees = Vec::with_capacity(cfg.n_rounds);
    for _ in 0..cfg.n_rounds {
        let p: Vec<f64> = margins.iter().map(|&z| sigmoid(z)).collect();
        let grad: Vec<f64> = p.iter().zip(&y).map(|(&p, &y)| p - f64::from(y)).collect();
        let hess: Vec<f64> = p.iter().map(|&p| p * (1.0 - p)).collect();
        let rows: Vec<usize> = if cfg.subsample < 1.0 {
            let mut rows: Vec<usize> = (0..n)
                .filter(|_| rng.random::<f64>() < cfg.subsample)
                .collect();
            if rows.is_empty() {
                rows.push(rng.random_range(0..n));
            }
            rows
        } else {
            (0..n).collect()
        };
        let tree = grower.grow(&rows, &grad, &hess);
        for (m, xi) in margins.iter_mut().zip(&x) {
            *m += tree.predict(xi);
        }
        history.push(mean_loss(&y, &margins));
        trees.push(tree);
    }
    Ok((
        GbdtModel {
            format_version: MODEL_FORMAT_VERSION,
            config: cfg.clone(),
            base_score,
            n_features,
            trees,
        },
        history,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::from_xy(
            vec![
                vec![1.0],
                vec![2.0],
                vec![3.0],
                vec![10.0],
                vec![11.0],
                vec![12.0],
            ],
            &[0, 0, 0, 1, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn zero_rounds_predicts_prior() {
        let ds = Dataset::from_xy(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            &[0, 0, 0, 1],
        );
        let ds = ds.unwrap();
        let cfg = GbdtConfig {
            n_rounds: 0,
            ..GbdtConfig::default()
        };
        assert!(train(&ds, &cfg, 0).is_err());
        let ds = Dataset::from_xy(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            &[0, 0, 0, 1, 1],
        )
        .unwrap();
        let m = train(&ds, &cfg, 0).unwrap();
        assert!(m.trees.is_empty());
        assert!((m.predict_proba(&[7.0]).unwrap() - 0.4).abs() < 1e-12);
        assert!((m.base_score - (0.4f64 / 0.6).ln()).abs() < 1e-15);
    }

    #[test]
    fn stump_splits_between_classes() {
        let cfg = GbdtConfig {
            n_rounds: 1,
            max_depth: 1,
            ..GbdtConfig::default()
        };
        let m = train(&toy(), &cfg, 0).unwrap();
        match m.trees[0].nodes[0] {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 6.5);
            }
            _ => panic!("expected a split"),
        }
        assert!(m.predict_proba(&[2.0]).unwrap() < 0.5);
        assert!(m.predict_proba(&[11.0]).unwrap() > 0.5);
    }

    #[test]
    fn errors() {
        let cfg = GbdtConfig::default();
        let one_pos = Dataset::from_xy(vec![vec![0.0], vec![1.0], vec![2.0]], &[0, 0, 1]).unwrap();
        assert!(matches!(
            train(&one_pos, &cfg, 0),
            Err(Error::DegenerateDataset(_))
        ));
        let nan = Dataset::from_xy(
            vec![vec![0.0], vec![f64::NAN], vec![2.0], vec![3.0]],
            &[0, 0, 1, 1],
        )
        .unwrap();
        assert!(matches!(
            train(&nan, &cfg, 0),
            Err(Error::NonFiniteFeature {
                sample: 1,
                feature: 0
            })
        ));
        let m = train(&toy(), &cfg, 0).unwrap();
        assert!(matches!(
            m.predict_proba(&[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        for bad in [
            GbdtConfig {
                eta: 0.0,
                ..cfg.clone()
            },
            GbdtConfig {
                max_depth: 0,
                ..cfg.clone()
            },
            GbdtConfig {
                subsample: 1.5,
                ..cfg.clone()
            },
        ] {
            assert!(train(&toy(), &bad, 0).is_err());
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let m = train(&toy(), &GbdtConfig::default(), 3).unwrap();
        let text = m.to_json().unwrap();
        assert_eq!(GbdtModel::from_json(&text).unwrap(), m);
        let bumped = text.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        assert!(GbdtModel::from_json(&bumped).is_err());
    }

    #[test]
    fn positive_leaf_raises_probability() {
        let mut m = train(&toy(), &GbdtConfig::default(), 0).unwrap();
        let before = m.predict_proba(&[5.0]).unwrap();
        m.trees.push(Tree::leaf(0.3));
        assert!(m.predict_proba(&[5.0]).unwrap() > before);
    }

    #[test]
    fn midpoint_rule() {
        assert_eq!(midpoint(1.0, 2.0), 1.5);
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let t = midpoint(lo, hi);
        assert!(t > lo && t <= hi);
    }

    #[test]
    fn stable_loss_and_sigmoid() {
        assert!((logistic_loss(1, 800.0)).abs() < 1e-300);
        assert!((logistic_loss(0, 800.0) - 800.0).abs() < 1e-9);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }
}
