use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    // imaging
    #[error("image is constant (max == min); min-max normalisation is undefined")]
    ConstantImage,
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("contour has {0} points; at least 3 are required")]
    DegenerateContour(usize),
    #[error("contour has {found} points; at least {required} are required for feature extraction")]
    InsufficientBoundary { found: usize, required: usize },

    // nonlinear
    #[error("signal too short: {len} samples, need more than {required}")]
    SignalTooShort { len: usize, required: usize },
    #[error("no valid nearest neighbours outside the temporal exclusion window")]
    NoValidNeighbors,
    #[error("point set is degenerate (all points identical)")]
    DegeneratePointSet,

    // diffusion
    #[error("invalid schedule range: {0}")]
    InvalidRange(String),
    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("diffusion step {t} outside 1..={steps}")]
    StepOutOfRange { t: usize, steps: usize },
    #[error("batch is empty")]
    EmptyBatch,

    // genmetrics
    #[error("need at least {required} samples, got {found}")]
    TooFewSamples { found: usize, required: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("invalid probability rows: {0}")]
    InvalidRows(String),

    // classify
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),
    #[error("non-finite feature value in sample {sample}, feature {feature}")]
    NonFiniteFeature { sample: usize, feature: usize },
    #[error("class {label} has {found} samples; {required} folds need at least {required}")]
    TooFewSamplesPerClass {
        label: u8,
        found: usize,
        required: usize,
    },
    #[error("empty input")]
    Empty,

    // synth
    #[error("Koch level {0} outside 0..=8")]
    LevelOutOfRange(u32),
    #[error("radius function becomes non-positive (self-intersecting contour)")]
    SelfIntersection,
    #[error("orbit diverged at iteration {0}")]
    Divergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
