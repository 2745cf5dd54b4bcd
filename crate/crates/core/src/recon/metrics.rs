use std::collections::HashMap;

use serde::Serialize;

use super::components::connected_components;
use crate::error::Result;
use crate::raster::BinaryMask;

/// Overlap fraction of a ground-truth building required for a true positive.
pub const DEFAULT_OVERLAP: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconMetrics {
    pub per_pixel_iou: f64,
    pub per_building_iou: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub pixel_accuracy: f64,
}

/// `|a ∩ b| / |a ∪ b|`, defined as 1 when both masks are empty.
pub fn iou_per_pixel(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    b.raster().ensure_dims(a.dims())?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&p, &q) in a.bits().iter().zip(b.bits()) {
        inter += usize::from(p && q);
        union += usize::from(p || q);
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

pub fn pixel_accuracy(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    b.raster().ensure_dims(a.dims())?;
    let n = a.bits().len();
    if n == 0 {
        return Ok(1.0);
    }
    let agree = a.bits().iter().zip(b.bits()).filter(|(p, q)| p == q).count();
    Ok(agree as f64 / n as f64)
}

/// Per-pixel and per-building agreement between a predicted and a reference mask.
///
/// Buildings are 8-connected components. Predicted/reference pairs are matched
/// greedily by descending pixel overlap; a reference building counts as a true
/// positive when its match covers at least `overlap_thresh` of its pixels.
/// Unmatched predictions are false positives, unmatched references false
/// negatives, and the per-building IoU is `TP / (TP + FP + FN)` (1 when both
/// masks are empty).
pub fn iou_per_building(
    pred: &BinaryMask,
    gt: &BinaryMask,
    overlap_thresh: f64,
) -> Result<ReconMetrics> {
    gt.raster().ensure_dims(pred.dims())?;
    let pred_set = connected_components(pred);
    let gt_set = connected_components(gt);

    let mut overlap: HashMap<(usize, usize), usize> = HashMap::new();
    for (&pid, &gid) in pred_set.ids.data().iter().zip(gt_set.ids.data()) {
        if pid != 0 && gid != 0 {
            *overlap.entry((pid as usize - 1, gid as usize - 1)).or_default() += 1;
        }
    }
    let mut pairs: Vec<((usize, usize), usize)> = overlap.into_iter().collect();
    pairs.sort_by(|(ka, a), (kb, b)| b.cmp(a).then((ka.1, ka.0).cmp(&(kb.1, kb.0))));

    let mut pred_used = vec![false; pred_set.len()];
    let mut gt_used = vec![false; gt_set.len()];
    let mut tp = 0;
    for ((p, g), count) in pairs {
        if pred_used[p] || gt_used[g] {
            continue;
        }
        if count as f64 / gt_set.components[g].area() as f64 >= overlap_thresh {
            pred_used[p] = true;
            gt_used[g] = true;
            tp += 1;
        }
    }
    let fp = pred_set.len() - tp;
    let fn_ = gt_set.len() - tp;
    let denom = tp + fp + fn_;
    Ok(ReconMetrics {
        per_pixel_iou: iou_per_pixel(pred, gt)?,
        per_building_iou: if denom == 0 {
            1.0
        } else {
            tp as f64 / denom as f64
        },
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        pixel_accuracy: pixel_accuracy(pred, gt)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(w: usize, h: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| (x0..x0 + bw).contains(&x) && (y0..y0 + bh).contains(&y))
    }

    #[test]
    fn pixel_iou_cases() {
        let a = block(4, 4, 0, 0, 2, 2);
        assert_eq!(iou_per_pixel(&a, &a).unwrap(), 1.0);
        assert_eq!(iou_per_pixel(&a, &block(4, 4, 2, 2, 2, 2)).unwrap(), 0.0);
        let shifted = block(4, 4, 1, 0, 2, 2);
        assert!((iou_per_pixel(&a, &shifted).unwrap() - 2.0 / 6.0).abs() < 1e-15);
        let e = BinaryMask::empty(3, 3);
        assert_eq!(iou_per_pixel(&e, &e).unwrap(), 1.0);
        assert!(iou_per_pixel(&e, &BinaryMask::empty(2, 3)).is_err());
    }

    #[test]
    fn identical_single_building() {
        let a = block(8, 8, 2, 2, 3, 3);
        let m = iou_per_building(&a, &a, DEFAULT_OVERLAP).unwrap();
        assert_eq!((m.true_positives, m.false_positives, m.false_negatives), (1, 0, 0));
        assert_eq!(m.per_building_iou, 1.0);
    }

    #[test]
    fn half_coverage_is_a_miss() {
        let gt = block(8, 8, 0, 0, 4, 4);
        let pred = block(8, 8, 0, 0, 2, 4);
        let m = iou_per_building(&pred, &gt, DEFAULT_OVERLAP).unwrap();
        assert_eq!((m.true_positives, m.false_positives, m.false_negatives), (0, 1, 1));
        assert_eq!(m.per_building_iou, 0.0);
    }

    #[test]
    fn exactly_threshold_overlap_counts() {
        let gt = block(8, 8, 0, 0, 4, 4);
        let pred = block(8, 8, 0, 0, 3, 4);
        let m = iou_per_building(&pred, &gt, DEFAULT_OVERLAP).unwrap();
        assert_eq!(m.true_positives, 1);
    }

    #[test]
    fn both_empty_is_perfect() {
        let e = BinaryMask::empty(4, 4);
        assert_eq!(iou_per_building(&e, &e, 0.75).unwrap().per_building_iou, 1.0);
    }
}
