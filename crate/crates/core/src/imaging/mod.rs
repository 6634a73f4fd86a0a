//! Image ingestion, normalisation, resizing, contour tracing and radial
//! signals.
//!
//! Pixel coordinates are `(x, y)` with `x` running along a row and `y` running
//! down the image, matching the row-major storage of [`GrayImage`] and
//! [`BinaryMask`].

mod contour;
pub mod pnm;

pub use contour::{trace_contour, Contour};

use crate::{Error, Result};

/// Row-major scalar image.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image from rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(width * height);
        for row in rows {
            if row.len() != width {
                return Err(Error::LengthMismatch {
                    expected: width,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Row-major boolean mask; `true` marks lesion foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    /// Thresholds an image: pixels with value `>= threshold` are foreground.
    pub fn from_threshold(img: &GrayImage, threshold: f64) -> Self {
        Self {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| v >= threshold).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    /// Foreground lookup that treats everything outside the image as background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Mask rendered as an image with foreground 1.0 and background 0.0.
    pub fn to_image(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| f64::from(u8::from(b))).collect(),
        }
    }
}

/// Distances from ordered boundary points to the lesion centre.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSignal {
    pub values: Vec<f64>,
    pub centroid: (f64, f64),
}

/// Axis-aligned pixel box, `x0..x0+width` by `y0..y0+height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

/// Linearly rescales intensities to `[0, 1]`.
pub fn normalize_minmax(img: &GrayImage) -> Result<GrayImage> {
    let (lo, hi) = img.min_max();
    if !(hi > lo) {
        return Err(Error::ConstantImage);
    }
    let span = hi - lo;
    let data = img
        .data
        .iter()
        .map(|&v| ((v - lo) / span).clamp(0.0, 1.0))
        .collect();
    GrayImage::new(img.width, img.height, data)
}

/// Bilinear resize with corner-aligned sampling: output pixel `i` of `n`
/// samples the source at `i * (N - 1) / (n - 1)`, so the corner pixels of
/// both grids coincide. A single output column (row) samples the source
/// centre.
pub fn resize_bilinear(img: &GrayImage, width: usize, height: usize) -> Result<GrayImage> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "target size must be positive, got {width}x{height}"
        )));
    }
    if width == img.width && height == img.height {
        return Ok(img.clone());
    }
    let src_coord = |i: usize, n_out: usize, n_in: usize| -> f64 {
        if n_out == 1 {
            (n_in - 1) as f64 / 2.0
        } else {
            i as f64 * (n_in - 1) as f64 / (n_out - 1) as f64
        }
    };
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let sy = src_coord(y, height, img.height);
        let y0 = (sy.floor() as usize).min(img.height - 1);
        let y1 = (y0 + 1).min(img.height - 1);
        let fy = sy - y0 as f64;
        for x in 0..width {
            let sx = src_coord(x, width, img.width);
            let x0 = (sx.floor() as usize).min(img.width - 1);
            let x1 = (x0 + 1).min(img.width - 1);
            let fx = sx - x0 as f64;
            let top = img.get(x0, y0) * (1.0 - fx) + img.get(x1, y0) * fx;
            let bottom = img.get(x0, y1) * (1.0 - fx) + img.get(x1, y1) * fx;
            data.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    GrayImage::new(width, height, data)
}

/// Arithmetic mean of the contour points.
pub fn centroid(contour: &Contour) -> (f64, f64) {
    let n = contour.len() as f64;
    let (sx, sy) = contour
        .points()
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| {
            (sx + x as f64, sy + y as f64)
        });
    (sx / n, sy / n)
}

/// Euclidean distance of every contour point to the contour centroid, in
/// contour order.
pub fn radial_signal(contour: &Contour) -> Result<RadialSignal> {
    if contour.len() < 3 {
        return Err(Error::DegenerateContour(contour.len()));
    }
    let c = centroid(contour);
    let values = contour
        .points()
        .iter()
        .map(|&(x, y)| (x as f64 - c.0).hypot(y as f64 - c.1))
        .collect();
    Ok(RadialSignal {
        values,
        centroid: c,
    })
}

/// Tight foreground bounding box grown by `pad` on every side and clamped to
/// the mask.
pub fn roi_bbox(mask: &BinaryMask, pad: usize) -> Result<BBox> {
    let mut bounds: Option<(usize, usize, usize, usize)> = None;
    for y in 0..mask.height {
        for x in 0..mask.width {
            if mask.get(x, y) {
                bounds = Some(match bounds {
                    None => (x, y, x, y),
                    Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                });
            }
        }
    }
    let (x0, y0, x1, y1) = bounds.ok_or(Error::EmptyMask)?;
    let x0 = x0.saturating_sub(pad);
    let y0 = y0.saturating_sub(pad);
    let x1 = (x1 + pad).min(mask.width - 1);
    let y1 = (y1 + pad).min(mask.height - 1);
    Ok(BBox {
        x0,
        y0,
        width: x1 - x0 + 1,
        height: y1 - y0 + 1,
    })
}

/// Crops `img` to a box.
pub fn crop(img: &GrayImage, bbox: BBox) -> Result<GrayImage> {
    if bbox.x0 + bbox.width > img.width || bbox.y0 + bbox.height > img.height {
        return Err(Error::InvalidParameter(format!(
            "box {bbox:?} exceeds {}x{} image",
            img.width, img.height
        )));
    }
    let mut data = Vec::with_capacity(bbox.width * bbox.height);
    for y in bbox.y0..bbox.y0 + bbox.height {
        let start = y * img.width + bbox.x0;
        data.extend_from_slice(&img.data[start..start + bbox.width]);
    }
    GrayImage::new(bbox.width, bbox.height, data)
}

/// ROI patch of `img` around the lesion in `mask`.
pub fn roi_crop(img: &GrayImage, mask: &BinaryMask, pad: usize) -> Result<GrayImage> {
    if img.width != mask.width || img.height != mask.height {
        return Err(Error::ShapeMismatch {
            expected: (mask.height, mask.width),
            found: (img.height, img.width),
        });
    }
    crop(img, roi_bbox(mask, pad)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(rows: &[&[f64]]) -> GrayImage {
        GrayImage::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn normalize_hand_values() {
        let out = normalize_minmax(&img(&[&[0.0, 2.0], &[4.0, 8.0]])).unwrap();
        assert_eq!(out.data(), &[0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn normalize_constant_is_error() {
        let err = normalize_minmax(&img(&[&[5.0, 5.0], &[5.0, 5.0]])).unwrap_err();
        assert!(matches!(err, Error::ConstantImage));
    }

    #[test]
    fn normalize_fixes_zero_and_one() {
        let out = normalize_minmax(&img(&[&[0.0, 0.3], &[1.0, 0.7]])).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(0, 1), 1.0);
    }

    #[test]
    fn resize_constant_upscale() {
        let src = GrayImage::filled(1, 1, 3.5).unwrap();
        let out = resize_bilinear(&src, 4, 4).unwrap();
        assert!(out.data().iter().all(|&v| v == 3.5));
    }

    #[test]
    fn resize_same_size_is_identity() {
        let src = img(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(resize_bilinear(&src, 3, 2).unwrap(), src);
    }

    #[test]
    fn resize_checkerboard_centre() {
        let src = img(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let out = resize_bilinear(&src, 3, 3).unwrap();
        assert_eq!(out.get(1, 1), 0.5);
        // corners are preserved under corner alignment
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(2, 0), 1.0);
        assert_eq!(out.get(1, 0), 0.5);
    }

    #[test]
    fn resize_rejects_zero_target() {
        let src = GrayImage::filled(2, 2, 0.0).unwrap();
        assert!(resize_bilinear(&src, 0, 3).is_err());
    }

    #[test]
    fn image_dimension_checks() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
        assert!(BinaryMask::new(2, 2, vec![false; 5]).is_err());
    }

    #[test]
    fn bbox_single_pixel() {
        let mut m = BinaryMask::empty(10, 10).unwrap();
        m.set(5, 5, true);
        let b = roi_bbox(&m, 0).unwrap();
        assert_eq!(
            b,
            BBox {
                x0: 5,
                y0: 5,
                width: 1,
                height: 1
            }
        );
    }

    #[test]
    fn bbox_clamps_to_image() {
        let mut m = BinaryMask::empty(4, 4).unwrap();
        m.set(0, 0, true);
        let b = roi_bbox(&m, 3).unwrap();
        assert_eq!((b.x0, b.y0, b.width, b.height), (0, 0, 4, 4));
    }

    #[test]
    fn bbox_full_mask_is_full_image() {
        let m = BinaryMask::new(6, 5, vec![true; 30]).unwrap();
        let b = roi_bbox(&m, 2).unwrap();
        assert_eq!((b.x0, b.y0, b.width, b.height), (0, 0, 6, 5));
    }

    #[test]
    fn bbox_empty_mask() {
        let m = BinaryMask::empty(3, 3).unwrap();
        assert!(matches!(roi_bbox(&m, 1), Err(Error::EmptyMask)));
    }

    #[test]
    fn roi_crop_extracts_patch() {
        let src = GrayImage::new(4, 3, (0..12).map(f64::from).collect()).unwrap();
        let mut m = BinaryMask::empty(4, 3).unwrap();
        m.set(2, 1, true);
        let patch = roi_crop(&src, &m, 1).unwrap();
        assert_eq!((patch.width(), patch.height()), (3, 3));
        assert_eq!(
            patch.data(),
            &[1.0, 2.0, 3.0, 5.0, 6.0, 7.0, 9.0, 10.0, 11.0]
        );
    }

    #[test]
    fn centroid_of_square_corners() {
        let c = Contour::from_points(vec![(0, 0), (2, 0), (2, 2), (0, 2)]).unwrap();
        assert_eq!(centroid(&c), (1.0, 1.0));
        let single = Contour::from_points(vec![(7, 3)]).unwrap();
        assert_eq!(centroid(&single), (7.0, 3.0));
    }

    #[test]
    fn radial_signal_needs_three_points() {
        let c = Contour::from_points(vec![(0, 0), (1, 0)]).unwrap();
        assert!(matches!(
            radial_signal(&c),
            Err(Error::DegenerateContour(2))
        ));
    }
}
