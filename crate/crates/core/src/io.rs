//! CSV encodings shared by every module, plus atomic file output.
//!
//! Floating-point values are written with 17 significant digits so that
//! files round-trip exactly and can be diffed byte-for-byte across runs.

use std::io::Write;
use std::path::Path;

use crate::imaging::{BinaryMask, GrayImage, RadialSignal};
use crate::{Error, Result};

/// 17-significant-digit scientific encoding (`1.2500000000000000e-1`).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_f64(field: &str) -> Result<f64> {
    let t = field.trim();
    t.parse::<f64>()
        .map_err(|_| Error::Format(format!("not a number: {t:?}")))
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Parses a headerless numeric matrix; every row must have the same width.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.iter().map(parse_f64).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::LengthMismatch {
                    expected: first,
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn format_matrix_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Image stored as a CSV matrix, one CSV row per image row.
pub fn read_image_csv(path: &Path) -> Result<GrayImage> {
    GrayImage::from_rows(&read_matrix_csv(path)?)
}

/// Mask stored as a CSV matrix of 0/1.
pub fn read_mask_csv(path: &Path) -> Result<BinaryMask> {
    let img = read_image_csv(path)?;
    if let Some(v) = img.data().iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::Format(format!("mask CSV value {v} is not 0 or 1")));
    }
    Ok(BinaryMask::from_threshold(&img, 0.5))
}

/// Single-column CSV with header `r`.
pub fn format_radial_csv(signal: &RadialSignal) -> String {
    let mut out = String::from("r\n");
    for &v in &signal.values {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    out
}

pub fn parse_radial_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("r") => {}
        other => {
            return Err(Error::Format(format!(
                "expected header `r`, found {other:?}"
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(parse_f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(parse_f64(&fmt_f64(x)).unwrap(), x);
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn matrix_roundtrip_and_ragged_rows() {
        let rows = vec![vec![1.0, -2.5], vec![1e-300, 3.0]];
        assert_eq!(parse_matrix_csv(&format_matrix_csv(&rows)).unwrap(), rows);
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("").is_err());
        assert!(parse_matrix_csv("1,x\n").is_err());
    }

    #[test]
    fn radial_csv() {
        let s = RadialSignal {
            values: vec![1.0, 2.0],
            centroid: (0.0, 0.0),
        };
        let text = format_radial_csv(&s);
        assert!(text.starts_with("r\n"));
        assert_eq!(parse_radial_csv(&text).unwrap(), vec![1.0, 2.0]);
        assert!(parse_radial_csv("x\n1\n").is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
