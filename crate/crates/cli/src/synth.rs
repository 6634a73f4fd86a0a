use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use thermofuse::classify::format_deep_csv;
use thermofuse::imaging::pnm;
use thermofuse::nonlinear::{format_features_csv, FeatureConfig};
use thermofuse::synth::{
    build_corpus, corpus_features, gen_contour, henon_series, koch_curve, logistic_series, sine,
    white_noise, ContourKind, ContourParams, CorpusSpec, HenonParams,
};

use crate::features::FeatureArgs;
use crate::output::{column_csv, write_file, write_or_stdout, write_report, xy_csv};

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Benign or malignant lesion mask from a random radius spectrum.
    Contour(ContourArgs),
    /// Koch curve vertices.
    Koch(KochArgs),
    /// Logistic-map orbit.
    Logistic(LogisticArgs),
    /// x-coordinate of a Hénon-map orbit.
    Henon(HenonArgs),
    /// Standardised uniform white noise.
    Noise(NoiseArgs),
    /// Sampled sine wave.
    Sine(SineArgs),
    /// Paired benign/malignant corpus with deep and handcrafted features.
    Corpus(CorpusArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ContourArgs {
    #[arg(long, default_value_t = ContourKind::Benign)]
    pub kind: ContourKind,
    /// Mean radius in pixels.
    #[arg(long, default_value_t = 50.0)]
    pub radius: f64,
    /// Relative amplitude of the radius perturbation; default per kind.
    #[arg(long)]
    pub amp: Option<f64>,
    /// Harmonic weight decay exponent; default per kind.
    #[arg(long)]
    pub spectral_decay: Option<f64>,
    /// Mask PGM.
    #[arg(long)]
    pub out: PathBuf,
    /// Generating radius sampled at the given number of angles, `theta,r`.
    #[arg(long)]
    pub radius_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1024)]
    pub radius_samples: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct KochArgs {
    #[arg(long, default_value_t = 6)]
    pub level: u32,
    /// CSV `x,y`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LogisticArgs {
    #[arg(long, default_value_t = 4.0)]
    pub r: f64,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub x0: f64,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    /// CSV with header `x`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HenonArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 1.4)]
    pub a: f64,
    #[arg(long, default_value_t = 0.3)]
    pub b: f64,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SineArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Period in samples.
    #[arg(long, default_value_t = 50.0)]
    pub period: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 200)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 45.0)]
    pub radius_min: f64,
    #[arg(long, default_value_t = 60.0)]
    pub radius_max: f64,
    /// Seed of the random convolutional embedder.
    #[arg(long, default_value_t = 0)]
    pub embed_seed: u64,
    /// Deep-feature CSV `id,label,f0..f2047`.
    #[arg(long)]
    pub deep_out: PathBuf,
    /// Handcrafted feature CSV `id,bcd,lle,le,apen`.
    #[arg(long)]
    pub hand_out: PathBuf,
    /// Labels CSV `id,label,synthetic`.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    /// Directory receiving one mask PGM per item.
    #[arg(long)]
    pub masks_dir: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureArgs,
}

fn contour(a: &ContourArgs, seed: u64) -> anyhow::Result<()> {
    let mut params = ContourParams::of_kind(a.kind, a.radius, seed);
    if let Some(v) = a.amp {
        params.amp = v;
    }
    if let Some(v) = a.spectral_decay {
        params.spectral_decay = v;
    }
    let sc = gen_contour(&params)?;
    write_file(&a.out, &pnm::encode_mask(&sc.mask))?;
    if let Some(p) = &a.radius_out {
        let n = a.radius_samples.max(1);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                (t, sc.radius_at(t))
            })
            .collect();
        write_file(p, xy_csv("theta,r", &pts).as_bytes())?;
    }
    write_report(
        a.report.as_deref(),
        "synth contour",
        seed,
        a,
        serde_json::json!({
            "params": params,
            "width": sc.mask.width(),
            "height": sc.mask.height(),
            "area_px": sc.mask.count(),
            "contour_points": sc.contour.len(),
            "centre": [sc.centre.0, sc.centre.1],
            "scale": sc.scale,
        }),
    )
}

fn corpus(a: &CorpusArgs, seed: u64) -> anyhow::Result<()> {
    let spec = CorpusSpec {
        n_per_class: a.n_per_class,
        radius_range: (a.radius_min, a.radius_max),
        seed,
    };
    let items = build_corpus(&spec)?;
    log::info!("built {} contours; extracting features", items.len());
    let cfg = FeatureConfig {
        ..a.features.config()
    };
    let (deep, hand) = corpus_features(&items, &cfg, a.embed_seed)?;
    write_file(&a.deep_out, format_deep_csv(&deep).as_bytes())?;
    write_file(&a.hand_out, format_features_csv(&hand).as_bytes())?;
    if let Some(p) = &a.labels_out {
        let mut csv = String::from("id,label,synthetic\n");
        for it in &items {
            csv.push_str(&format!("{},{},1\n", it.id, it.label));
        }
        write_file(p, csv.as_bytes())?;
    }
    if let Some(dir) = &a.masks_dir {
        std::fs::create_dir_all(dir)?;
        for it in &items {
            write_file(
                &dir.join(format!("{}.pgm", it.id)),
                &pnm::encode_mask(&it.contour.mask),
            )?;
        }
    }
    write_report(
        a.report.as_deref(),
        "synth corpus",
        seed,
        a,
        serde_json::json!({ "n_items": items.len() }),
    )
}

pub fn run(s: &SynthCommand, seed: u64) -> anyhow::Result<()> {
    match s {
        SynthCommand::Contour(a) => contour(a, seed),
        SynthCommand::Koch(a) => {
            let pts = koch_curve(a.level)?;
            write_or_stdout(a.out.as_deref(), xy_csv("x,y", &pts).as_bytes())
        }
        SynthCommand::Logistic(a) => {
            let xs = logistic_series(a.r, a.n, a.x0, a.burn_in)?;
            write_or_stdout(a.out.as_deref(), column_csv("x", &xs).as_bytes())
        }
        SynthCommand::Henon(a) => {
            let p = HenonParams {
                a: a.a,
                b: a.b,
                ..HenonParams::default()
            };
            let xs = henon_series(a.n, &p, a.burn_in)?;
            write_or_stdout(a.out.as_deref(), column_csv("x", &xs).as_bytes())
        }
        SynthCommand::Noise(a) => {
            let xs = white_noise(a.n, seed);
            write_or_stdout(a.out.as_deref(), column_csv("x", &xs).as_bytes())
        }
        SynthCommand::Sine(a) => {
            let xs = sine(a.n, a.period)?;
            write_or_stdout(a.out.as_deref(), column_csv("x", &xs).as_bytes())
        }
        SynthCommand::Corpus(a) => corpus(a, seed),
    }
}
