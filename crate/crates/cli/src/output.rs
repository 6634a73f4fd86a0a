//! Report envelope, atomic outputs and input loaders shared by subcommands.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;
use thermofuse::imaging::{pnm, BinaryMask};

/// Bumped whenever a report field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a C,
    pub results: R,
}

pub fn report<'a, C: Serialize, R: Serialize>(
    command: &'a str,
    seed: u64,
    config: &'a C,
    results: R,
) -> Report<'a, C, R> {
    Report {
        schema_version: SCHEMA_VERSION,
        tool: "thermofuse",
        version: thermofuse::VERSION,
        command,
        seed,
        config,
        results,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    thermofuse::io::atomic_write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Writes to `path`, or to stdout when no path is given.
pub fn write_or_stdout(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn write_report<C: Serialize, R: Serialize>(
    path: Option<&Path>,
    command: &str,
    seed: u64,
    config: &C,
    results: R,
) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(
            p,
            to_json(&report(command, seed, config, results))?.as_bytes(),
        ),
        None => Ok(()),
    }
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Mask from a PGM/PNM (foreground at or above half range) or a 0/1 CSV.
pub fn load_mask(path: &Path) -> anyhow::Result<BinaryMask> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let mask = match ext.as_deref() {
        Some("pgm" | "pnm") => {
            let bytes =
                std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            pnm::decode_mask(&bytes)?
        }
        Some("csv") => thermofuse::io::read_mask_csv(path)?,
        _ => bail!("{}: mask must be .pgm, .pnm or .csv", path.display()),
    };
    Ok(mask)
}

/// File stem used as the sample id.
pub fn stem_id(path: &Path) -> anyhow::Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .with_context(|| format!("{}: no usable file name", path.display()))
}

/// CSV of `(x, y)` pairs with the given header.
pub fn xy_csv(header: &str, pts: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for &(x, y) in pts {
        out.push_str(&thermofuse::io::fmt_f64(x));
        out.push(',');
        out.push_str(&thermofuse::io::fmt_f64(y));
        out.push('\n');
    }
    out
}

/// Single-column CSV with the given header.
pub fn column_csv(header: &str, values: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for &v in values {
        out.push_str(&thermofuse::io::fmt_f64(v));
        out.push('\n');
    }
    out
}
