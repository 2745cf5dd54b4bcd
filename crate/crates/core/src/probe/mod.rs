//! Sub-classification of the negative label from penultimate-layer
//! activations of a binary segmentation network, without retraining.
//!
//! The flow is: gather activations per reference label, fit a Gaussian per
//! `(label, feature map)`, classify every pixel on every map (maximum
//! likelihood or MAP-MRF), fuse the maps with the squeeze-and-excitation
//! weights, overlay the network's building prediction, and score.

mod aggregate;
mod classify;
mod eval;
mod pdf;
mod pipeline;

pub use aggregate::{aggregate, overlay_buildings};
pub use classify::{map_mrf_classify, map_mrf_model, mlc_classify, ClassificationImage, MapMrfParams};
pub use eval::{evaluate_f1, EvalReport};
pub use pdf::{
    default_label_names, fit_gaussians, gather_activations, gaussian_density, remove_zero_outliers,
    ClassPdfTable, FitParams, PdfCell, SampleSet, ZERO_EPSILON,
};
pub use pipeline::{
    fit_table, probe_image, probe_pipeline, Classifier, EvalImage, FitImage, ProbeConfig, ProbeOutcome,
};

/// MRF weights of the ablation grid.
pub const DEFAULT_W_GRID: [f64; 4] = [0.0005, 0.005, 0.05, 0.1];
