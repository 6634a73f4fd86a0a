use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// Largest tolerated asymmetry of a covariance matrix.
const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues in `[-PSD_TOL, 0)` are rounding noise and clamp to zero.
const PSD_TOL: f64 = 1e-8;

/// Mean and covariance of a Gaussian fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianStats {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch(mean.len(), cov.nrows()));
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Row-major sample matrix from rows of equal length.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(d, r.len()));
    }
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

/// Sample mean and unbiased (`n - 1`) covariance; rows are samples.
pub fn fit_gaussian(features: &DMatrix<f64>) -> Result<GaussianStats> {
    let n = features.nrows();
    if n < 2 {
        return Err(Error::TooFewSamples {
            found: n,
            required: 2,
        });
    }
    let mean: DVector<f64> = features.row_mean().transpose();
    let mut centered = features.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    // exact symmetry
    cov = (&cov + cov.transpose()) * 0.5;
    GaussianStats::new(mean, cov)
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let asym = (m - m.transpose()).amax();
    if asym >= SYMMETRY_TOL {
        return Err(Error::NotPsd(format!("asymmetry {asym:.3e}")));
    }
    Ok(())
}

fn clamped_eigenvalues(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::new(m);
    let mut values = eig.eigenvalues;
    for v in values.iter_mut() {
        if *v < -PSD_TOL {
            return Err(Error::NotPsd(format!("eigenvalue {v:.3e}")));
        }
        *v = v.max(0.0);
    }
    Ok((values, eig.eigenvectors))
}

fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = clamped_eigenvalues(m.clone())?;
    let root = DMatrix::from_diagonal(&values.map(f64::sqrt));
    Ok(&vectors * root * vectors.transpose())
}

/// `|mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2})`.
///
/// The trace of `(S_a S_b)^{1/2}` is evaluated as the sum of square roots of
/// the eigenvalues of the symmetric matrix `S_a^{1/2} S_b S_a^{1/2}`, which
/// has the same spectrum as `S_a S_b`.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    check_symmetric(&a.cov)?;
    check_symmetric(&b.cov)?;
    let root_a = sqrt_psd(&a.cov)?;
    clamped_eigenvalues(b.cov.clone())?;
    let inner = &root_a * &b.cov * &root_a;
    let inner = (&inner + inner.transpose()) * 0.5;
    let (values, _) = clamped_eigenvalues(inner)?;
    let tr_cross: f64 = values.iter().map(|v| v.sqrt()).sum();
    let diff = &a.mean - &b.mean;
    let fd = diff.norm_squared() + a.cov.trace() + b.cov.trace() - 2.0 * tr_cross;
    // non-negative in exact arithmetic
    Ok(fd.max(0.0))
}

/// Fréchet distance between Gaussian fits of two alternate-layer embedding
/// matrices.
pub fn sliced_fid(features_a: &DMatrix<f64>, features_b: &DMatrix<f64>) -> Result<f64> {
    frechet_distance(&fit_gaussian(features_a)?, &fit_gaussian(features_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_fit() {
        let x = matrix_from_rows(&[vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        let g = fit_gaussian(&x).unwrap();
        assert_eq!(g.mean.as_slice(), &[1.0, 1.0]);
        assert_eq!(g.cov, DMatrix::from_element(2, 2, 2.0));
    }

    #[test]
    fn identical_points_zero_cov() {
        let x = matrix_from_rows(&vec![vec![3.0, -1.0, 2.0]; 5]).unwrap();
        let g = fit_gaussian(&x).unwrap();
        assert!(g.cov.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_few_samples() {
        let x = matrix_from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(
            fit_gaussian(&x),
            Err(Error::TooFewSamples { found: 1, .. })
        ));
    }

    #[test]
    fn ragged_rows() {
        assert!(matrix_from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn dimension_mismatch_and_not_psd() {
        let a = GaussianStats::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        let b = GaussianStats::new(DVector::zeros(3), DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            frechet_distance(&a, &b),
            Err(Error::DimensionMismatch(2, 3))
        ));
        let neg = GaussianStats::new(DVector::zeros(2), -DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(frechet_distance(&a, &neg), Err(Error::NotPsd(_))));
        let asym = GaussianStats::new(
            DVector::zeros(2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(frechet_distance(&a, &asym), Err(Error::NotPsd(_))));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let a = GaussianStats::new(
            DVector::zeros(2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-10]),
        )
        .unwrap();
        assert!(frechet_distance(&a, &a).unwrap() < 1e-8);
    }
}
