//! Binary PGM (P5) reader and writer, 8- and 16-bit.
//!
//! Samples wider than one byte are big-endian, as Netpbm requires.

use std::io::{Read, Write};
use std::path::Path;

use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

/// A decoded PGM: raw sample values plus the declared maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub image: GrayImage,
    pub maxval: u16,
}

struct Header {
    width: usize,
    height: usize,
    maxval: u16,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Format("missing P5 magic number".into()));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated PGM header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("expected a number in PGM header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Format("header number out of range".into()))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("missing whitespace after maxval".into()));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval == 0 || maxval > u64::from(u16::MAX) {
        return Err(Error::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    Ok(Header {
        width: width as usize,
        height: height as usize,
        maxval: maxval as u16,
        data_offset: pos + 1,
    })
}

/// Decodes a P5 byte stream.
pub fn decode(bytes: &[u8]) -> Result<Pgm> {
    let h = parse_header(bytes)?;
    let bps = if h.maxval > 255 { 2 } else { 1 };
    let n = h.width * h.height;
    let raster = &bytes[h.data_offset..];
    if raster.len() < n * bps {
        return Err(Error::Format(format!(
            "raster truncated: need {} bytes, have {}",
            n * bps,
            raster.len()
        )));
    }
    let data = if bps == 1 {
        raster[..n].iter().map(|&b| f64::from(b)).collect()
    } else {
        raster[..2 * n]
            .chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])))
            .collect()
    };
    Ok(Pgm {
        image: GrayImage::new(h.width, h.height, data)?,
        maxval: h.maxval,
    })
}

/// Encodes raw sample values, rounding and clamping each to `0..=maxval`.
pub fn encode(img: &GrayImage, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(Error::InvalidParameter("maxval must be positive".into()));
    }
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    let quantize = |v: f64| -> u16 {
        if v.is_nan() {
            0
        } else {
            v.round().clamp(0.0, f64::from(maxval)) as u16
        }
    };
    if maxval > 255 {
        for &v in img.data() {
            out.extend_from_slice(&quantize(v).to_be_bytes());
        }
    } else {
        out.extend(img.data().iter().map(|&v| quantize(v) as u8));
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Pgm> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn write(path: &Path, img: &GrayImage, maxval: u16) -> Result<()> {
    let bytes = encode(img, maxval)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

/// Foreground threshold for masks stored as PGM: 128 on the 8-bit scale,
/// and the same half-range point for wider samples.
pub fn mask_threshold(maxval: u16) -> f64 {
    if maxval <= 255 {
        128.0
    } else {
        (f64::from(maxval) + 1.0) / 2.0
    }
}

pub fn decode_mask(bytes: &[u8]) -> Result<BinaryMask> {
    let pgm = decode(bytes)?;
    Ok(BinaryMask::from_threshold(
        &pgm.image,
        mask_threshold(pgm.maxval),
    ))
}

/// Mask as an 8-bit PGM with foreground 255.
pub fn encode_mask(mask: &BinaryMask) -> Vec<u8> {
    let img = mask.to_image();
    let scaled = GrayImage::new(
        img.width(),
        img.height(),
        img.data().iter().map(|v| v * 255.0).collect(),
    )
    .expect("same dimensions");
    encode(&scaled, 255).expect("positive maxval")
}
