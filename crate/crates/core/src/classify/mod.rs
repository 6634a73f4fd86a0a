//! Feature fusion, boosted-tree classification and cross-validated evaluation.
//!
//! Labels are `0` for benign/normal and `1` for malignant.

mod dataset;
mod eval;
mod gbdt;

pub use dataset::{
    assemble_dataset, format_deep_csv, fuse, fuse_with, join_features, parse_deep_csv,
    parse_labels_csv, Dataset, DeepRecord, FeatureMode, LabelInfo, Sample, DEEP_DIM, HAND_DIM,
};
pub use eval::{
    confusion_metrics, fold_assignment, stratified_kfold, ConfusionMetrics, CvOptions, CvReport,
    FoldResult, MeanStd, DECISION_THRESHOLD,
};
pub use gbdt::{
    logistic_loss, sigmoid, train, train_with_history, GbdtConfig, GbdtModel, Node, Tree,
    MODEL_FORMAT_VERSION,
};
