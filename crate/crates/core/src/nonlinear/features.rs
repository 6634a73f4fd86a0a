use super::{
    approx_entropy, box_counting_dim, dyadic_scales, lle, lyapunov_estimate, APEN_DIM,
    APEN_R_FACTOR, DEFAULT_LLE_DIMS,
};
use crate::imaging::{radial_signal, trace_contour, BinaryMask, Contour};
use crate::io::{fmt_f64, parse_f64};
use crate::{Error, Result};

/// Column order of the handcrafted feature vector.
pub const FEATURE_NAMES: [&str; 4] = ["bcd", "lle", "le", "apen"];

/// The four handcrafted boundary descriptors of one lesion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearFeatures {
    pub bcd: f64,
    pub lle: f64,
    pub le: f64,
    pub apen: f64,
}

impl NonlinearFeatures {
    pub fn to_array(&self) -> [f64; 4] {
        [self.bcd, self.lle, self.le, self.apen]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [bcd, lle, le, apen] => Ok(Self { bcd, lle, le, apen }),
            _ => Err(Error::LengthMismatch {
                expected: 4,
                found: v.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub min_contour_points: usize,
    pub delay: usize,
    /// Embedding dimension of the LE feature.
    pub le_dim: usize,
    /// Dimensions maximised over by the LLE feature.
    pub lle_dims: Vec<usize>,
    pub apen_dim: usize,
    pub apen_r_factor: f64,
    /// Box sizes, as fractions of the lesion's larger bounding-box side.
    pub bcd_scales: Vec<f64>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            min_contour_points: 32,
            delay: 1,
            le_dim: 3,
            lle_dims: DEFAULT_LLE_DIMS.to_vec(),
            apen_dim: APEN_DIM,
            apen_r_factor: APEN_R_FACTOR,
            // The 2x2 grid is occupied in full by any closed contour spanning
            // its bounding square, so it carries no shape information.
            bcd_scales: dyadic_scales(2, 8),
        }
    }
}

/// Traces the lesion boundary and computes all four descriptors.
pub fn extract_features(mask: &BinaryMask, cfg: &FeatureConfig) -> Result<NonlinearFeatures> {
    extract_features_from_contour(&trace_contour(mask)?, cfg)
}

/// BCD is measured on the boundary polyline, resampled four times finer than
/// the smallest box, so pixel quantisation does not saturate the fine scales.
/// The other descriptors use the radial signal in contour order.
pub fn extract_features_from_contour(
    contour: &Contour,
    cfg: &FeatureConfig,
) -> Result<NonlinearFeatures> {
    if contour.len() < cfg.min_contour_points {
        return Err(Error::InsufficientBoundary {
            found: contour.len(),
            required: cfg.min_contour_points,
        });
    }
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for &(x, y) in contour.points() {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let extent = (x1 - x0).max(y1 - y0) as f64;
    let finest = cfg.bcd_scales.iter().copied().fold(f64::INFINITY, f64::min);
    let step = (extent * finest / 4.0).max(1e-3);
    let bcd = box_counting_dim(&contour.densified(step), &cfg.bcd_scales)?;

    let signal = radial_signal(contour)?.values;
    let le = lyapunov_estimate(&signal, cfg.le_dim, cfg.delay, None)?;
    let lle = lle(&signal, cfg.delay, &cfg.lle_dims)?;
    let apen = approx_entropy(&signal, cfg.apen_dim, cfg.apen_r_factor)?;
    Ok(NonlinearFeatures { bcd, lle, le, apen })
}

/// `id,bcd,lle,le,apen` with 17-significant-digit values.
pub fn format_features_csv(rows: &[(String, NonlinearFeatures)]) -> String {
    let mut out = format!("id,{}\n", FEATURE_NAMES.join(","));
    for (id, f) in rows {
        let vals: Vec<String> = f.to_array().iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&format!("{id},{}\n", vals.join(",")));
    }
    out
}

pub fn parse_features_csv(text: &str) -> Result<Vec<(String, NonlinearFeatures)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = std::iter::once("id").chain(FEATURE_NAMES).collect();
    if header != expected {
        return Err(Error::Format(format!(
            "feature CSV header must be {expected:?}, got {header:?}"
        )));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let vals = rec
                .iter()
                .skip(1)
                .map(parse_f64)
                .collect::<Result<Vec<_>>>()?;
            Ok((rec[0].to_string(), NonlinearFeatures::from_slice(&vals)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_mask_is_insufficient() {
        let mut m = BinaryMask::empty(5, 5).unwrap();
        m.set(1, 1, true);
        m.set(2, 1, true);
        assert!(matches!(
            extract_features(&m, &FeatureConfig::default()),
            Err(Error::InsufficientBoundary {
                found: 2,
                required: 32
            })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let f = NonlinearFeatures {
            bcd: 1.1,
            lle: 0.2,
            le: 0.15,
            apen: 0.6,
        };
        let text = format_features_csv(&[("a".into(), f)]);
        assert!(text.starts_with("id,bcd,lle,le,apen\n"));
        let back = parse_features_csv(&text).unwrap();
        assert_eq!(back, vec![("a".to_string(), f)]);
        assert!(parse_features_csv("id,x\n").is_err());
    }
}
