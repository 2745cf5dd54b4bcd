//! Classification-to-reconstruction analysis of building maps: threshold,
//! MRF refinement, boundary extraction and simplification, re-rasterization
//! and per-pixel / per-building scoring.

mod components;
mod contour;
mod metrics;
mod polygon;
mod rasterize;
mod refine;
mod simplify;

pub use components::{connected_components, BoundingBox, BuildingSet, Component};
pub use contour::trace_boundary;
pub use metrics::{iou_per_building, iou_per_pixel, pixel_accuracy, ReconMetrics, DEFAULT_OVERLAP};
pub use polygon::{segment_distance, Footprint, Point, Polygon, RingKind};
pub use rasterize::rasterize;
pub use refine::{refine_binary, refine_multilabel, refinement_model, RefineParams};
pub use simplify::{douglas_peucker, simplify_chain, simplify_chain_indices};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::raster::{BinaryMask, ProbabilityMap};

/// Building threshold applied to network probabilities.
pub const DEFAULT_TAU: f64 = 0.4;
/// Douglas-Peucker tolerance in pixels.
pub const DEFAULT_DP_TOLERANCE: f64 = 0.5;

/// Pixels with probability `>= tau`.
pub fn threshold(p: &ProbabilityMap, tau: f64) -> BinaryMask {
    BinaryMask::from_raster(p.raster().map(|v| v as f64 >= tau))
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn default_tau_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub iou: f64,
}

/// Per-pixel IoU against `gt` after thresholding at each `tau`, in ascending order.
pub fn threshold_sweep(p: &ProbabilityMap, gt: &BinaryMask, taus: &[f64]) -> Result<Vec<SweepPoint>> {
    gt.raster().ensure_dims(p.dims())?;
    let mut taus = taus.to_vec();
    taus.sort_by(f64::total_cmp);
    taus.into_iter()
        .map(|tau| {
            Ok(SweepPoint {
                tau,
                iou: iou_per_pixel(&threshold(p, tau), gt)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconParams {
    pub tau: f64,
    pub dp_tolerance: f64,
    pub overlap: f64,
    pub refine: RefineParams,
}

impl Default for ReconParams {
    fn default() -> Self {
        ReconParams {
            tau: DEFAULT_TAU,
            dp_tolerance: DEFAULT_DP_TOLERANCE,
            overlap: DEFAULT_OVERLAP,
            refine: RefineParams::default(),
        }
    }
}

/// Vectorizes a mask: traces every component and simplifies each ring.
pub fn vectorize(mask: &BinaryMask, dp_tolerance: Option<f64>) -> Vec<Footprint> {
    connected_components(mask)
        .components
        .par_iter()
        .map(|c| {
            let fp = trace_boundary(c);
            match dp_tolerance {
                None => fp,
                Some(tol) => Footprint {
                    outer: douglas_peucker(&fp.outer, tol),
                    holes: fp.holes.iter().map(|h| douglas_peucker(h, tol)).collect(),
                },
            }
        })
        .collect()
}

/// Mask re-rasterized from a set of footprints.
pub fn footprints_to_mask(footprints: &[Footprint], width: usize, height: usize) -> BinaryMask {
    rasterize(footprints.iter().flat_map(Footprint::rings), width, height)
}

#[derive(Debug, Clone)]
pub struct ReconReport {
    /// Thresholded network output against the reference.
    pub classification: ReconMetrics,
    /// Refined, vectorized, simplified and re-rasterized output against the reference.
    pub reconstruction: ReconMetrics,
    pub reconstructed: BinaryMask,
    pub footprints: Vec<Footprint>,
}

pub fn reconstruction_analysis(
    p: &ProbabilityMap,
    gt: &BinaryMask,
    params: &ReconParams,
) -> Result<ReconReport> {
    gt.raster().ensure_dims(p.dims())?;
    let classified = threshold(p, params.tau);
    let classification = iou_per_building(&classified, gt, params.overlap)?;

    let refined = refine_binary(&classified, &params.refine)?;
    let footprints = vectorize(&refined, Some(params.dp_tolerance));
    let reconstructed = footprints_to_mask(&footprints, p.width(), p.height());
    let reconstruction = iou_per_building(&reconstructed, gt, params.overlap)?;
    Ok(ReconReport {
        classification,
        reconstruction,
        reconstructed,
        footprints,
    })
}
