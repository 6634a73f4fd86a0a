use std::collections::HashSet;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use serde::Serialize;
use thermofuse::imaging::{radial_signal, trace_contour};
use thermofuse::io::{fmt_f64, format_radial_csv};
use thermofuse::nonlinear::{
    divergence_curve, extract_features, format_features_csv, FeatureConfig, LyapunovParams,
    APEN_DIM, APEN_R_FACTOR,
};

use crate::output::{load_mask, read_text, stem_id, write_file, write_or_stdout, write_report};
use crate::plot::{line_plot, Series};

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeatureArgs {
    /// Delay of every embedding.
    #[arg(long, default_value_t = 1)]
    pub delay: usize,
    /// Embedding dimension of the LE feature.
    #[arg(long, default_value_t = 3)]
    pub le_dim: usize,
    /// Embedding dimensions maximised over by the LLE feature.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5])]
    pub lle_dims: Vec<usize>,
    #[arg(long, default_value_t = APEN_DIM)]
    pub apen_dim: usize,
    /// ApEn tolerance as a fraction of the signal's standard deviation.
    #[arg(long, default_value_t = APEN_R_FACTOR)]
    pub apen_r_factor: f64,
    #[arg(long, default_value_t = 32)]
    pub min_contour_points: usize,
}

impl FeatureArgs {
    pub fn config(&self) -> FeatureConfig {
        FeatureConfig {
            min_contour_points: self.min_contour_points,
            delay: self.delay,
            le_dim: self.le_dim,
            lle_dims: self.lle_dims.clone(),
            apen_dim: self.apen_dim,
            apen_r_factor: self.apen_r_factor,
            ..FeatureConfig::default()
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    /// Lesion mask (.pgm/.pnm or 0/1 .csv); repeatable. The file stem is the id.
    #[arg(long = "mask", required_unless_present = "mask_list")]
    pub masks: Vec<PathBuf>,
    /// Text file with one mask path per line.
    #[arg(long)]
    pub mask_list: Option<PathBuf>,
    /// Feature CSV `id,bcd,lle,le,apen`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureArgs,
}

pub fn run_features(a: &FeaturesArgs, seed: u64) -> anyhow::Result<()> {
    let mut paths = a.masks.clone();
    if let Some(list) = &a.mask_list {
        let base = list.parent().map(PathBuf::from).unwrap_or_default();
        for line in read_text(list)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
        {
            paths.push(base.join(line));
        }
    }
    let cfg = a.features.config();
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(paths.len());
    for p in &paths {
        let id = stem_id(p)?;
        if !seen.insert(id.clone()) {
            bail!("duplicate id {id:?} (file stems must be unique)");
        }
        let mask = load_mask(p)?;
        let f = extract_features(&mask, &cfg).with_context(|| format!("{}", p.display()))?;
        log::info!(
            "{id}: bcd {:.4} lle {:.4} le {:.4} apen {:.4}",
            f.bcd,
            f.lle,
            f.le,
            f.apen
        );
        rows.push((id, f));
    }
    write_or_stdout(a.out.as_deref(), format_features_csv(&rows).as_bytes())?;
    write_report(
        a.report.as_deref(),
        "features",
        seed,
        a,
        serde_json::json!({ "n_masks": rows.len() }),
    )
}

#[derive(Debug, Args, Serialize)]
pub struct SignalArgs {
    #[arg(long)]
    pub mask: PathBuf,
    /// Radial signal CSV (header `r`).
    #[arg(long)]
    pub out: PathBuf,
    /// Radial signal plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Divergence curve CSV `t,mean_log_divergence,pairs`.
    #[arg(long)]
    pub divergence_out: Option<PathBuf>,
    #[arg(long)]
    pub divergence_svg: Option<PathBuf>,
    /// Embedding dimension of the divergence curve.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub delay: usize,
    /// Inclusive fit window `LO,HI`; chosen from the curve when omitted.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub fit_window: Option<Vec<usize>>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run_signal(a: &SignalArgs, seed: u64) -> anyhow::Result<()> {
    let mask = load_mask(&a.mask)?;
    let contour = trace_contour(&mask)?;
    let signal = radial_signal(&contour)?;
    write_file(&a.out, format_radial_csv(&signal).as_bytes())?;
    if let Some(p) = &a.svg {
        let pts = signal
            .values
            .iter()
            .enumerate()
            .map(|(i, &r)| (i as f64, r))
            .collect();
        let svg = line_plot(
            &format!("Radial signal: {}", stem_id(&a.mask)?),
            "contour index",
            "distance to centroid (px)",
            &[Series {
                label: "r",
                color: "#1f4e9c",
                points: pts,
                dashed: false,
            }],
        );
        write_file(p, svg.as_bytes())?;
    }

    let wants_curve =
        a.divergence_out.is_some() || a.divergence_svg.is_some() || a.report.is_some();
    let mut curve_summary = serde_json::Value::Null;
    if wants_curve {
        let mut params = LyapunovParams::new(a.dim, a.delay);
        params.fit_window = a.fit_window.as_ref().map(|w| (w[0], w[1]));
        let curve = divergence_curve(&signal.values, &params)?;
        let slope = curve.slope().ok();
        if let Some(p) = &a.divergence_out {
            let mut csv = String::from("t,mean_log_divergence,pairs\n");
            for (t, (&d, &n)) in curve
                .mean_log_divergence
                .iter()
                .zip(&curve.pair_counts)
                .enumerate()
            {
                csv.push_str(&format!("{t},{},{n}\n", fmt_f64(d)));
            }
            write_file(p, csv.as_bytes())?;
        }
        if let Some(p) = &a.divergence_svg {
            let pts: Vec<(f64, f64)> = curve
                .mean_log_divergence
                .iter()
                .enumerate()
                .map(|(t, &d)| (t as f64, d))
                .collect();
            let mut series = vec![Series {
                label: "<ln d(t)/d(0)>",
                color: "#1f4e9c",
                points: pts,
                dashed: false,
            }];
            if let Some(s) = slope {
                let (lo, hi) = curve.fit_window;
                let fit: Vec<(usize, f64)> = (lo..=hi.min(curve.mean_log_divergence.len() - 1))
                    .map(|t| (t, curve.mean_log_divergence[t]))
                    .filter(|(_, y)| y.is_finite())
                    .collect();
                let n = fit.len() as f64;
                let mx = fit.iter().map(|p| p.0 as f64).sum::<f64>() / n;
                let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
                series.push(Series {
                    label: "fit",
                    color: "#c0392b",
                    points: vec![
                        (lo as f64, my + s * (lo as f64 - mx)),
                        (hi as f64, my + s * (hi as f64 - mx)),
                    ],
                    dashed: true,
                });
            }
            let svg = line_plot(
                &format!("Divergence curve (m={}, tau={})", a.dim, a.delay),
                "t (samples)",
                "mean log divergence",
                &series,
            );
            write_file(p, svg.as_bytes())?;
        }
        curve_summary = serde_json::json!({
            "exclusion": curve.exclusion,
            "fit_window": [curve.fit_window.0, curve.fit_window.1],
            "slope": slope,
        });
    }
    write_report(
        a.report.as_deref(),
        "signal",
        seed,
        a,
        serde_json::json!({
            "contour_points": contour.len(),
            "centroid": [signal.centroid.0, signal.centroid.1],
            "divergence": curve_summary,
        }),
    )
}
