//! Chaos-theoretic descriptors of lesion boundaries.
//!
//! Time-series estimators ([`lyapunov_estimate`], [`lle`], [`approx_entropy`])
//! operate on radial signals; [`box_counting_dim`] operates on the 2-D
//! boundary point set. [`extract_features`] bundles all four for one mask.

mod apen;
mod boxcount;
mod embed;
mod features;
mod lyapunov;

pub use apen::{approx_entropy, APEN_DIM, APEN_R_FACTOR};
pub use boxcount::{box_count, box_counting_dim, default_scales, dyadic_scales, BoxCount};
pub use embed::{delay_embed, DelayEmbedding};
pub use features::{
    extract_features, extract_features_from_contour, format_features_csv, parse_features_csv,
    FeatureConfig, NonlinearFeatures, FEATURE_NAMES,
};
pub use lyapunov::{
    divergence_curve, lle, lyapunov_estimate, mean_period, DivergenceCurve, LyapunovParams,
    DEFAULT_LLE_DIMS,
};
