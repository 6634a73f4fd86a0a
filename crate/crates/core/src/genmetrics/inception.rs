use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-9;

/// Validated class-probability rows `p(y | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    rows: Vec<Vec<f64>>,
    classes: usize,
}

impl ProbMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let classes = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || classes == 0 {
            return Err(Error::InvalidRows("no probabilities".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != classes {
                return Err(Error::InvalidRows(format!(
                    "row {i} has {} entries, expected {classes}",
                    r.len()
                )));
            }
            if let Some(p) = r.iter().find(|&&p| !(p >= 0.0 && p.is_finite())) {
                return Err(Error::InvalidRows(format!("row {i} has entry {p}")));
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidRows(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self { rows, classes })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn classes(&self) -> usize {
        self.classes
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InceptionScore {
    pub mean: f64,
    /// Population standard deviation across splits.
    pub std: f64,
}

fn split_score(rows: &[Vec<f64>], classes: usize) -> f64 {
    let n = rows.len() as f64;
    let marginal: Vec<f64> = (0..classes)
        .map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / n)
        .collect();
    let mean_kl = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&marginal)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| p * (p / q).ln())
                .sum::<f64>()
        })
        .sum::<f64>()
        / n;
    mean_kl.exp()
}

/// `exp(E_x KL(p(y|x) || p(y)))` per contiguous split of the rows, with the
/// marginal taken within each split. `0 log 0` counts as 0.
pub fn inception_score(p: &ProbMatrix, splits: usize) -> Result<InceptionScore> {
    let n = p.rows.len();
    if splits == 0 || splits > n {
        return Err(Error::InvalidParameter(format!(
            "splits must lie in 1..={n}, got {splits}"
        )));
    }
    let scores: Vec<f64> = (0..splits)
        .map(|k| split_score(&p.rows[k * n / splits..(k + 1) * n / splits], p.classes))
        .collect();
    let mean = scores.iter().sum::<f64>() / splits as f64;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / splits as f64;
    Ok(InceptionScore {
        mean,
        std: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_rows_score_one() {
        let p = ProbMatrix::new(vec![vec![0.2, 0.3, 0.5]; 7]).unwrap();
        let s = inception_score(&p, 1).unwrap();
        assert!((s.mean - 1.0).abs() < 1e-12);
        assert_eq!(s.std, 0.0);
    }

    #[test]
    fn one_hot_uniform_scores_classes() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| (0..4).map(|c| f64::from(u8::from(i % 4 == c))).collect())
            .collect();
        let s = inception_score(&ProbMatrix::new(rows).unwrap(), 3).unwrap();
        assert!((s.mean - 4.0).abs() < 1e-12);
        assert!(s.std < 1e-12);
    }

    #[test]
    fn invalid_rows() {
        assert!(ProbMatrix::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(ProbMatrix::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(ProbMatrix::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(ProbMatrix::new(vec![]).is_err());
    }

    #[test]
    fn split_bounds() {
        let p = ProbMatrix::new(vec![vec![1.0, 0.0]; 3]).unwrap();
        assert!(inception_score(&p, 0).is_err());
        assert!(inception_score(&p, 4).is_err());
        assert!(inception_score(&p, 3).is_ok());
    }
}
