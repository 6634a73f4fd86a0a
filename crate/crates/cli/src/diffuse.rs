use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use thermofuse::diffusion::{
    sample_chains, Condition, GaussianOptimalDenoiser, GaussianTarget, NoiseSchedule,
    DEFAULT_BETA_END, DEFAULT_BETA_START, DEFAULT_STEPS,
};
use thermofuse::imaging::{pnm, GrayImage};
use thermofuse::io::format_matrix_csv;

use crate::output::{report, to_json, write_file, write_or_stdout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CondArg {
    Normal,
    Malignant,
}

impl From<CondArg> for Condition {
    fn from(c: CondArg) -> Self {
        match c {
            CondArg::Normal => Condition::Normal,
            CondArg::Malignant => Condition::Malignant,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DiffuseArgs {
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_BETA_START)]
    pub beta_start: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_END)]
    pub beta_end: f64,
    #[arg(long, value_enum, default_value_t = CondArg::Normal)]
    pub cond: CondArg,
    /// Number of independent chains.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 32)]
    pub rows: usize,
    #[arg(long, default_value_t = 32)]
    pub cols: usize,
    /// Per-pixel mean of the Gaussian data model, in normalised intensity.
    #[arg(long, default_value_t = 0.5)]
    pub target_mean: f64,
    #[arg(long, default_value_t = 0.15)]
    pub target_std: f64,
    /// First chain as an 8-bit PGM; intensities clamped to [0, 1].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Every chain as one row-major CSV row.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    /// Schedule table `t,beta,alpha_bar`.
    #[arg(long)]
    pub schedule_out: Option<PathBuf>,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct DiffuseResults {
    n_pixels: usize,
    sample_mean: f64,
    sample_std: f64,
    target_mean: f64,
    target_std: f64,
    final_alpha_bar: f64,
}

pub fn run(a: &DiffuseArgs, seed: u64) -> anyhow::Result<()> {
    let schedule = NoiseSchedule::linear(a.steps, a.beta_start, a.beta_end)?;
    if a.chains == 0 || a.rows == 0 || a.cols == 0 {
        anyhow::bail!("--chains, --rows and --cols must be positive");
    }
    let target = GaussianTarget {
        mean: a.target_mean,
        std: a.target_std,
    };
    let denoiser = GaussianOptimalDenoiser::unconditional(schedule.clone(), target)?;
    log::info!(
        "sampling {} chain(s) of {}x{} over {} steps",
        a.chains,
        a.rows,
        a.cols,
        a.steps
    );
    let samples = sample_chains(
        &denoiser,
        (a.rows, a.cols),
        a.cond.into(),
        &schedule,
        a.chains,
        seed,
    )?;

    let all: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.data().iter().copied())
        .collect();
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;

    if let Some(p) = &a.out {
        let px: Vec<f64> = samples[0]
            .data()
            .iter()
            .map(|&v| v.clamp(0.0, 1.0) * 255.0)
            .collect();
        let img = GrayImage::new(a.cols, a.rows, px)?;
        write_file(p, &pnm::encode(&img, 255)?)?;
    }
    if let Some(p) = &a.samples_out {
        let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.data().to_vec()).collect();
        write_file(p, format_matrix_csv(&rows).as_bytes())?;
    }
    if let Some(p) = &a.schedule_out {
        write_file(p, schedule.to_csv().as_bytes())?;
    }
    let results = DiffuseResults {
        n_pixels: all.len(),
        sample_mean: mean,
        sample_std: var.sqrt(),
        target_mean: a.target_mean,
        target_std: a.target_std,
        final_alpha_bar: schedule.alpha_bar(a.steps),
    };
    let json = to_json(&report("diffuse", seed, a, results))?;
    write_or_stdout(a.report.as_deref(), json.as_bytes())
}
