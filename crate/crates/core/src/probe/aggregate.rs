use super::classify::ClassificationImage;
use crate::error::{Error, Result};
use crate::raster::{BinaryMask, LabelMap, SeWeightVector};

/// Fuses the per-map classification images into one label map.
///
/// Each map `k` adds `se[k] * probability` to the vote of its winning label;
/// the label with the largest total wins, lowest id on ties. Absent maps
/// contribute nothing.
pub fn aggregate(
    images: &[Option<ClassificationImage>],
    se: &SeWeightVector,
    num_labels: u8,
) -> Result<LabelMap> {
    if images.len() != se.len() {
        return Err(Error::LengthMismatch {
            expected: images.len(),
            found: se.len(),
        });
    }
    let first = images
        .iter()
        .flatten()
        .next()
        .ok_or_else(|| Error::InvalidTable("no feature map has a valid label model".into()))?;
    let (w, h) = (first.width, first.height);
    let n = w * h;
    let l = num_labels as usize;
    let mut votes = vec![0.0f64; n * l];
    for (img, &weight) in images.iter().zip(se.weights()) {
        let Some(img) = img else { continue };
        if (img.width, img.height) != (w, h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                found: (img.width, img.height),
            });
        }
        let weight = weight as f64;
        for (p, (&label, &prob)) in img.labels.iter().zip(&img.probabilities).enumerate() {
            votes[p * l + label as usize] += weight * prob;
        }
    }
    let labels = votes
        .chunks_exact(l)
        .map(|v| {
            let mut best = 0;
            for i in 1..l {
                if v[i] > v[best] {
                    best = i;
                }
            }
            best as u8
        })
        .collect();
    LabelMap::new(w, h, labels, num_labels)
}

/// Writes `building_label` wherever the building mask is set.
pub fn overlay_buildings(sub: &LabelMap, buildings: &BinaryMask, building_label: u8) -> Result<LabelMap> {
    buildings.raster().ensure_dims(sub.dims())?;
    let labels = sub
        .labels()
        .iter()
        .zip(buildings.bits())
        .map(|(&l, &b)| if b { building_label } else { l })
        .collect();
    LabelMap::new(sub.width(), sub.height(), labels, sub.num_labels())
}
