use rayon::prelude::*;

use super::aggregate::{aggregate, overlay_buildings};
use super::classify::{map_mrf_classify, mlc_classify, MapMrfParams};
use super::eval::{evaluate_f1, EvalReport};
use super::pdf::{fit_gaussians, gather_activations, ClassPdfTable, FitParams, SampleSet};
use crate::error::{Error, Result};
use crate::raster::{ActivationStack, BinaryMask, ColorPalette, LabelMap, SeWeightVector};
use crate::recon::{refine_multilabel, RefineParams};

/// Image with multi-label reference used to estimate the class models.
#[derive(Debug, Clone)]
pub struct FitImage {
    pub activations: ActivationStack,
    pub labels: LabelMap,
}

/// Image to sub-classify.
#[derive(Debug, Clone)]
pub struct EvalImage {
    pub activations: ActivationStack,
    pub se_weights: SeWeightVector,
    /// Binary building prediction of the network.
    pub buildings: BinaryMask,
    /// Multi-label reference, if available for scoring.
    pub labels: Option<LabelMap>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classifier {
    Mlc,
    MapMrf(MapMrfParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub label_names: Vec<String>,
    pub building_label: u8,
    pub fit: FitParams,
    pub classifier: Classifier,
    /// Multi-label MRF refinement of the aggregated map before the overlay.
    pub refine: Option<RefineParams>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            label_names: ColorPalette::isprs().names(),
            building_label: ColorPalette::BUILDING,
            fit: FitParams::default(),
            classifier: Classifier::Mlc,
            refine: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    /// Aggregated (and optionally refined) sub-classification.
    pub sub_classification: LabelMap,
    /// Sub-classification with the building prediction overlaid.
    pub overlay: LabelMap,
    pub report: Option<EvalReport>,
}

/// Gathers activations per label over all fit images, drops ReLU zeros and
/// fits one Gaussian per `(label, feature map)`.
pub fn fit_table(images: &[FitImage], config: &ProbeConfig) -> Result<ClassPdfTable> {
    let num_labels = config.label_names.len();
    let first = images
        .first()
        .ok_or_else(|| Error::InvalidValue("fit set is empty".into()))?;
    let mut samples = SampleSet::new(num_labels, first.activations.maps());
    for img in images {
        if img.labels.num_labels() as usize > num_labels {
            return Err(Error::LengthMismatch {
                expected: num_labels,
                found: img.labels.num_labels() as usize,
            });
        }
        let labels = LabelMap::from_raster(img.labels.raster().clone(), num_labels as u8)?;
        samples.extend(&gather_activations(&img.activations, &labels)?)?;
    }
    samples.remove_zero_outliers();
    let table = fit_gaussians(&samples, config.label_names.clone(), &config.fit)?;
    if table.valid_cell_count() == 0 {
        return Err(Error::InvalidTable(
            "every (label, feature map) cell has too few samples".into(),
        ));
    }
    Ok(table)
}

/// Sub-classifies one image with a fitted table.
pub fn probe_image(table: &ClassPdfTable, image: &EvalImage, config: &ProbeConfig) -> Result<ProbeOutcome> {
    let images = match &config.classifier {
        Classifier::Mlc => mlc_classify(&image.activations, table)?,
        Classifier::MapMrf(params) => map_mrf_classify(&image.activations, table, params)?,
    };
    let mut sub = aggregate(&images, &image.se_weights, table.num_labels() as u8)?;
    if let Some(params) = &config.refine {
        sub = refine_multilabel(&sub, params)?;
    }
    let overlay = overlay_buildings(&sub, &image.buildings, config.building_label)?;
    let report = image
        .labels
        .as_ref()
        .map(|gt| evaluate_f1(&overlay, gt))
        .transpose()?;
    Ok(ProbeOutcome {
        sub_classification: sub,
        overlay,
        report,
    })
}

/// Fits on `fit`, then sub-classifies, optionally refines, overlays and
/// scores every image of `eval`.
pub fn probe_pipeline(
    fit: &[FitImage],
    eval: &[EvalImage],
    config: &ProbeConfig,
) -> Result<(ClassPdfTable, Vec<ProbeOutcome>)> {
    let table = fit_table(fit, config)?;
    let outcomes = eval
        .par_iter()
        .map(|img| probe_image(&table, img, config))
        .collect::<Result<Vec<_>>>()?;
    Ok((table, outcomes))
}
