use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::Serialize;
use thermofuse::classify::{
    assemble_dataset, join_features, parse_deep_csv, parse_labels_csv, stratified_kfold,
    train_with_history, CvOptions, Dataset, DeepRecord, FeatureMode, GbdtConfig, GbdtModel,
    LabelInfo, DECISION_THRESHOLD,
};
use thermofuse::io::fmt_f64;
use thermofuse::nonlinear::{parse_features_csv, NonlinearFeatures};

use crate::output::{read_text, report, to_json, write_file, write_or_stdout, write_report};

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// Deep-feature CSV `id,label,f0..`.
    #[arg(long)]
    pub deep: Option<PathBuf>,
    /// Handcrafted feature CSV `id,bcd,lle,le,apen`.
    #[arg(long)]
    pub hand: Option<PathBuf>,
    /// Labels CSV `id,label[,synthetic]`; overrides labels in the deep file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = FeatureMode::Fused)]
    pub mode: FeatureMode,
}

#[derive(Debug, Args, Serialize)]
pub struct GbdtArgs {
    #[arg(long, default_value_t = 200)]
    pub rounds: usize,
    /// Learning rate.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    /// L2 penalty on leaf weights.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Minimum gain for a split.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Row fraction drawn per round.
    #[arg(long, default_value_t = 1.0)]
    pub subsample: f64,
}

impl GbdtArgs {
    fn config(&self) -> GbdtConfig {
        GbdtConfig {
            n_rounds: self.rounds,
            eta: self.eta,
            max_depth: self.max_depth,
            lambda: self.lambda,
            gamma: self.gamma,
            subsample: self.subsample,
        }
    }
}

type Sources = (
    Option<Vec<DeepRecord>>,
    Option<Vec<(String, NonlinearFeatures)>>,
);

fn load_sources(deep: Option<&Path>, hand: Option<&Path>) -> anyhow::Result<Sources> {
    let deep = deep
        .map(|p| {
            parse_deep_csv(&read_text(p)?, None).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let hand = hand
        .map(|p| {
            parse_features_csv(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    Ok((deep, hand))
}

fn load_dataset(a: &DataArgs) -> anyhow::Result<Dataset> {
    let (deep, hand) = load_sources(a.deep.as_deref(), a.hand.as_deref())?;
    let labels: Option<Vec<(String, LabelInfo)>> = a
        .labels
        .as_deref()
        .map(|p| {
            parse_labels_csv(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let ds = assemble_dataset(a.mode, deep.as_deref(), hand.as_deref(), labels.as_deref())?;
    log::info!(
        "{} samples, {} features ({} mode)",
        ds.len(),
        ds.n_features(),
        a.mode
    );
    Ok(ds)
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub gbdt: GbdtArgs,
    /// Model JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Training loss per round, `round,loss` (round 0 is the prior).
    #[arg(long)]
    pub loss_out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run_train(a: &TrainArgs, seed: u64) -> anyhow::Result<()> {
    let ds = load_dataset(&a.data)?;
    let (model, losses) = train_with_history(&ds, &a.gbdt.config(), seed)?;
    write_file(&a.out, model.to_json()?.as_bytes())?;
    if let Some(p) = &a.loss_out {
        let mut csv = String::from("round,loss\n");
        for (i, &l) in losses.iter().enumerate() {
            csv.push_str(&format!("{i},{}\n", fmt_f64(l)));
        }
        write_file(p, csv.as_bytes())?;
    }
    write_report(
        a.report.as_deref(),
        "train",
        seed,
        a,
        serde_json::json!({
            "n_samples": ds.len(),
            "n_features": ds.n_features(),
            "n_trees": model.trees.len(),
            "base_score": model.base_score,
            "initial_loss": losses.first(),
            "final_loss": losses.last(),
        }),
    )
}

#[derive(Debug, Args, Serialize)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub gbdt: GbdtArgs,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Let synthetic samples land in held-out folds.
    #[arg(long)]
    pub include_synthetic: bool,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_cv(a: &CvArgs, seed: u64) -> anyhow::Result<()> {
    let ds = load_dataset(&a.data)?;
    let opts = CvOptions {
        k: a.folds,
        seed,
        include_synthetic_in_test: a.include_synthetic,
    };
    let cv = stratified_kfold(&ds, &a.gbdt.config(), &opts)?;
    log::info!(
        "accuracy {} sensitivity {} specificity {}",
        cv.accuracy,
        cv.sensitivity,
        cv.specificity
    );
    let results = serde_json::json!({
        "n_samples": ds.len(),
        "n_features": ds.n_features(),
        "summary": {
            "accuracy": cv.accuracy.to_string(),
            "sensitivity": cv.sensitivity.to_string(),
            "specificity": cv.specificity.to_string(),
        },
        "accuracy": cv.accuracy,
        "sensitivity": cv.sensitivity,
        "specificity": cv.specificity,
        "folds": cv.folds,
    });
    let json = to_json(&report("cv", seed, a, results))?;
    write_or_stdout(a.out.as_deref(), json.as_bytes())
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub deep: Option<PathBuf>,
    #[arg(long)]
    pub hand: Option<PathBuf>,
    /// Must match the mode the model was trained with.
    #[arg(long, default_value_t = FeatureMode::Fused)]
    pub mode: FeatureMode,
    /// CSV `id,probability,prediction`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_predict(a: &PredictArgs, _seed: u64) -> anyhow::Result<()> {
    let model = GbdtModel::from_json(&read_text(&a.model)?)
        .with_context(|| format!("loading model {}", a.model.display()))?;
    let (deep, hand) = load_sources(a.deep.as_deref(), a.hand.as_deref())?;
    let rows = join_features(a.mode, deep.as_deref(), hand.as_deref())?;
    let mut csv = String::from("id,probability,prediction\n");
    for (id, x) in &rows {
        let p = model
            .predict_proba(x)
            .with_context(|| format!("sample {id:?} (is --mode the training mode?)"))?;
        csv.push_str(&format!(
            "{id},{},{}\n",
            fmt_f64(p),
            u8::from(p >= DECISION_THRESHOLD)
        ));
    }
    write_or_stdout(a.out.as_deref(), csv.as_bytes())
}
