//! Ground-truth generators for validating the estimators.
//!
//! Fractals of known dimension, maps of known Lyapunov exponent, reference
//! signals for entropy ordering, and benign/malignant-style lesion contours.
//! The contour recipes are a test corpus only; they make no claim to be
//! clinically representative.

mod contour;
mod corpus;
mod series;

pub use contour::{gen_contour, ContourKind, ContourParams, Harmonic, SynthContour};
pub use corpus::{
    build_corpus, corpus_features, deep_embedding, CorpusItem, CorpusSpec, RandomConvEmbedder,
};
pub use series::{henon_series, logistic_series, sine, white_noise, HenonParams};

use crate::{Error, Result};

/// Highest supported Koch recursion level.
pub const MAX_KOCH_LEVEL: u32 = 8;

/// Vertices of the Koch curve on the unit segment `(0,0)-(1,0)`, bumps
/// pointing towards positive `y`; `4^level + 1` points.
pub fn koch_curve(level: u32) -> Result<Vec<(f64, f64)>> {
    if level > MAX_KOCH_LEVEL {
        return Err(Error::LevelOutOfRange(level));
    }
    let mut pts = vec![(0.0, 0.0), (1.0, 0.0)];
    let (sin60, cos60) = (3f64.sqrt() / 2.0, 0.5);
    for _ in 0..level {
        let mut next = Vec::with_capacity(4 * (pts.len() - 1) + 1);
        for w in pts.windows(2) {
            let ((ax, ay), (bx, by)) = (w[0], w[1]);
            let (dx, dy) = ((bx - ax) / 3.0, (by - ay) / 3.0);
            let p1 = (ax + dx, ay + dy);
            let p3 = (ax + 2.0 * dx, ay + 2.0 * dy);
            // segment rotated by +60 degrees
            let p2 = (
                p1.0 + dx * cos60 - dy * sin60,
                p1.1 + dx * sin60 + dy * cos60,
            );
            next.extend_from_slice(&[w[0], p1, p2, p3]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_levels() {
        assert_eq!(koch_curve(0).unwrap(), vec![(0.0, 0.0), (1.0, 0.0)]);
        let k1 = koch_curve(1).unwrap();
        assert_eq!(k1.len(), 5);
        assert!((k1[2].0 - 0.5).abs() < 1e-15);
        assert!((k1[2].1 - 3f64.sqrt() / 6.0).abs() < 1e-15);
        assert_eq!(koch_curve(6).unwrap().len(), 4usize.pow(6) + 1);
        let k8 = koch_curve(8).unwrap();
        assert_eq!(k8.len(), 4usize.pow(8) + 1);
        assert_eq!(*k8.last().unwrap(), (1.0, 0.0));
        assert!(matches!(koch_curve(9), Err(Error::LevelOutOfRange(9))));
    }
}
