use crate::{Error, Result};

/// Time-delay reconstruction of a scalar series: vector `i` is
/// `(s[i], s[i + tau], ..., s[i + (m - 1) tau])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayEmbedding {
    dim: usize,
    delay: usize,
    // row-major, `len() * dim` values
    data: Vec<f64>,
}

impl DelayEmbedding {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.vector(i)
            .iter()
            .zip(self.vector(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn delay_embed(signal: &[f64], dim: usize, delay: usize) -> Result<DelayEmbedding> {
    if dim == 0 || delay == 0 {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension and delay must be >= 1 (got m={dim}, tau={delay})"
        )));
    }
    let span = (dim - 1) * delay;
    if signal.len() <= span {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            required: span,
        });
    }
    let count = signal.len() - span;
    let mut data = Vec::with_capacity(count * dim);
    for i in 0..count {
        data.extend((0..dim).map(|j| signal[i + j * delay]));
    }
    Ok(DelayEmbedding { dim, delay, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        let e = delay_embed(&[1.0, 2.0, 3.0, 4.0, 5.0], 2, 1).unwrap();
        let v: Vec<&[f64]> = e.vectors().collect();
        assert_eq!(
            v,
            vec![&[1.0, 2.0][..], &[2.0, 3.0], &[3.0, 4.0], &[4.0, 5.0]]
        );
    }

    #[test]
    fn dim_one_is_identity() {
        let s = [3.0, 1.0, 4.0];
        let e = delay_embed(&s, 1, 3).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.vectors().map(|v| v[0]).collect::<Vec<_>>(), s);
    }

    #[test]
    fn boundary_lengths() {
        let s5 = [0.0; 5];
        assert_eq!(delay_embed(&s5, 3, 2).unwrap().len(), 1);
        assert!(matches!(
            delay_embed(&s5[..4], 3, 2),
            Err(Error::SignalTooShort {
                len: 4,
                required: 4
            })
        ));
        assert!(delay_embed(&s5, 0, 1).is_err());
        assert!(delay_embed(&s5, 2, 0).is_err());
    }
}
