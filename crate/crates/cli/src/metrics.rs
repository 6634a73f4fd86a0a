use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand};
use serde::Serialize;
use thermofuse::genmetrics::{
    fit_gaussian, frechet_distance, inception_score, matrix_from_rows, ProbMatrix,
};
use thermofuse::io::read_matrix_csv;

use crate::output::{report, to_json, write_or_stdout};

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    /// Fréchet distance between Gaussian fits of two embedding sets.
    Fid(FrechetArgs),
    /// Fréchet distance on alternate (e.g. spatial) embeddings.
    Sfid(FrechetArgs),
    /// Inception Score of a class-probability matrix.
    Is(IsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FrechetArgs {
    /// Headerless n x d CSV of reference embeddings.
    #[arg(long)]
    pub real: PathBuf,
    /// Headerless m x d CSV of generated embeddings.
    #[arg(long)]
    pub gen: PathBuf,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IsArgs {
    /// Headerless n x C CSV of class probabilities, rows summing to 1.
    #[arg(long)]
    pub probs: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub splits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct FrechetResults {
    distance: f64,
    n_real: usize,
    n_gen: usize,
    dim: usize,
}

#[derive(Debug, Serialize)]
struct IsResults {
    mean: f64,
    std: f64,
    n: usize,
    classes: usize,
    splits: usize,
}

fn frechet(a: &FrechetArgs) -> anyhow::Result<FrechetResults> {
    let load = |p: &PathBuf| -> anyhow::Result<Vec<Vec<f64>>> {
        read_matrix_csv(p).with_context(|| format!("reading {}", p.display()))
    };
    let (real, gen) = (load(&a.real)?, load(&a.gen)?);
    let sa = fit_gaussian(&matrix_from_rows(&real)?)?;
    let sb = fit_gaussian(&matrix_from_rows(&gen)?)?;
    Ok(FrechetResults {
        distance: frechet_distance(&sa, &sb)?,
        n_real: real.len(),
        n_gen: gen.len(),
        dim: sa.dim(),
    })
}

pub fn run(m: &MetricsCommand, seed: u64) -> anyhow::Result<()> {
    let (json, out) = match m {
        MetricsCommand::Fid(a) => (
            to_json(&report("metrics fid", seed, a, frechet(a)?))?,
            &a.out,
        ),
        MetricsCommand::Sfid(a) => (
            to_json(&report("metrics sfid", seed, a, frechet(a)?))?,
            &a.out,
        ),
        MetricsCommand::Is(a) => {
            let rows = read_matrix_csv(&a.probs)
                .with_context(|| format!("reading {}", a.probs.display()))?;
            let classes = rows.first().map_or(0, Vec::len);
            let n = rows.len();
            let score = inception_score(&ProbMatrix::new(rows)?, a.splits)?;
            let results = IsResults {
                mean: score.mean,
                std: score.std,
                n,
                classes,
                splits: a.splits,
            };
            (to_json(&report("metrics is", seed, a, results))?, &a.out)
        }
    };
    write_or_stdout(out.as_deref(), json.as_bytes())
}
