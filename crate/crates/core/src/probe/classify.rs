//! Per-feature-map sub-classification of pixels from their activations.

use rayon::prelude::*;

use super::pdf::ClassPdfTable;
use crate::error::{Error, Result};
use crate::graphcut::{alpha_expansion_over, grid_edges, EnergyModel, Labeling, Pairwise};
use crate::raster::ActivationStack;

/// Winning label and its Gaussian density for every pixel of one feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationImage {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u8>,
    pub probabilities: Vec<f64>,
}

fn check_maps(acts: &ActivationStack, table: &ClassPdfTable) -> Result<()> {
    if acts.maps() != table.maps() {
        return Err(Error::LengthMismatch {
            expected: table.maps(),
            found: acts.maps(),
        });
    }
    Ok(())
}

fn mlc_map(acts: &ActivationStack, table: &ClassPdfTable, k: usize) -> Option<ClassificationImage> {
    let valid = table.valid_labels(k);
    if valid.is_empty() {
        return None;
    }
    let (labels, probabilities) = acts
        .plane(k)
        .iter()
        .map(|&v| {
            let v = v as f64;
            let mut best = (valid[0], table.cell(valid[0] as usize, k).density(v));
            for &l in &valid[1..] {
                let d = table.cell(l as usize, k).density(v);
                if d > best.1 {
                    best = (l, d);
                }
            }
            best
        })
        .unzip();
    Some(ClassificationImage {
        width: acts.width(),
        height: acts.height(),
        labels,
        probabilities,
    })
}

/// Maximum-likelihood label per pixel on every feature map.
///
/// Only valid table cells compete; ties go to the lowest label id. Maps
/// without any valid label yield `None` and are skipped downstream.
pub fn mlc_classify(
    acts: &ActivationStack,
    table: &ClassPdfTable,
) -> Result<Vec<Option<ClassificationImage>>> {
    check_maps(acts, table)?;
    Ok((0..acts.maps())
        .into_par_iter()
        .map(|k| mlc_map(acts, table, k))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapMrfParams {
    /// Weight of the pairwise term relative to the unary term.
    pub w: f64,
    /// Pairwise cost of neighbors carrying different labels, before weighting.
    pub label_change_cost: f64,
    pub max_sweeps: usize,
}

impl MapMrfParams {
    pub fn with_weight(w: f64) -> Self {
        MapMrfParams {
            w,
            ..MapMrfParams::default()
        }
    }
}

impl Default for MapMrfParams {
    fn default() -> Self {
        MapMrfParams {
            w: 0.0005,
            label_change_cost: 40.0,
            max_sweeps: 10,
        }
    }
}

/// The per-map MAP-MRF energy.
///
/// Unary: `1 / (1 + N(v_p; mu_l, sigma_l))`. Pairwise, scaled by `w`:
/// `label_change_cost` when neighbors differ, otherwise the absolute
/// difference of the shared label's densities at the two pixels.
pub fn map_mrf_model(
    acts: &ActivationStack,
    table: &ClassPdfTable,
    k: usize,
    params: &MapMrfParams,
) -> Result<EnergyModel> {
    let num_labels = table.num_labels();
    let plane = acts.plane(k);
    let density = |l: usize, v: f32| {
        let cell = table.cell(l, k);
        if cell.valid {
            cell.density(v as f64)
        } else {
            0.0
        }
    };
    let mut unary = Vec::with_capacity(plane.len() * num_labels);
    for &v in plane {
        for l in 0..num_labels {
            unary.push(1.0 / (1.0 + density(l, v)));
        }
    }
    let pairwise = if params.w == 0.0 {
        Pairwise::Zero
    } else {
        let edges = grid_edges(acts.width(), acts.height());
        let mut same = Vec::with_capacity(edges.len() * num_labels);
        for (p, q) in edges {
            for l in 0..num_labels {
                same.push(params.w * (density(l, plane[p]) - density(l, plane[q])).abs());
            }
        }
        Pairwise::SameLabel {
            differ: params.w * params.label_change_cost,
            same,
        }
    };
    EnergyModel::new(acts.width(), acts.height(), num_labels, unary, pairwise)
}

/// MAP-MRF labeling per feature map by alpha-expansion started from the
/// maximum-likelihood labeling. Stored probabilities are the densities of the
/// assigned labels.
pub fn map_mrf_classify(
    acts: &ActivationStack,
    table: &ClassPdfTable,
    params: &MapMrfParams,
) -> Result<Vec<Option<ClassificationImage>>> {
    check_maps(acts, table)?;
    if params.w.is_nan() || params.w < 0.0 {
        return Err(Error::InvalidValue(format!("MRF weight {} must be >= 0", params.w)));
    }
    (0..acts.maps())
        .into_par_iter()
        .map(|k| {
            let Some(init) = mlc_map(acts, table, k) else {
                return Ok(None);
            };
            let model = map_mrf_model(acts, table, k, params)?;
            let start = Labeling::new(init.width, init.height, init.labels)?;
            let result = alpha_expansion_over(&model, &start, &table.valid_labels(k), params.max_sweeps)?;
            let labels = result.labeling.into_data();
            let probabilities = labels
                .iter()
                .zip(acts.plane(k))
                .map(|(&l, &v)| table.cell(l as usize, k).density(v as f64))
                .collect();
            Ok(Some(ClassificationImage {
                width: init.width,
                height: init.height,
                labels,
                probabilities,
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::pdf::{default_label_names, PdfCell};

    fn table(params: &[(f64, f64)]) -> ClassPdfTable {
        let cells = params
            .iter()
            .map(|&(mu, sigma)| PdfCell { mu, sigma, n: 100, valid: true })
            .collect();
        ClassPdfTable::new(default_label_names(params.len()), 1, cells).unwrap()
    }

    #[test]
    fn picks_higher_density() {
        let t = table(&[(0.0, 1.0), (10.0, 1.0)]);
        let acts = ActivationStack::new(1, 1, 1, vec![9.0]).unwrap();
        let img = mlc_classify(&acts, &t).unwrap().remove(0).unwrap();
        assert_eq!(img.labels, vec![1]);
        assert!((img.probabilities[0] - (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identical_models_tie_to_lowest_label() {
        let t = table(&[(3.0, 1.0), (3.0, 1.0), (3.0, 1.0)]);
        let acts = ActivationStack::new(1, 2, 1, vec![1.0, 7.0]).unwrap();
        let img = mlc_classify(&acts, &t).unwrap().remove(0).unwrap();
        assert_eq!(img.labels, vec![0, 0]);
    }

    #[test]
    fn invalid_cells_do_not_compete() {
        let mut t = table(&[(0.0, 1.0), (5.0, 1.0)]);
        t = ClassPdfTable::new(
            t.labels().to_vec(),
            1,
            vec![PdfCell { valid: false, ..*t.cell(0, 0) }, *t.cell(1, 0)],
        )
        .unwrap();
        let acts = ActivationStack::new(1, 1, 1, vec![0.0]).unwrap();
        assert_eq!(mlc_classify(&acts, &t).unwrap()[0].as_ref().unwrap().labels, vec![1]);

        let none = ClassPdfTable::new(
            t.labels().to_vec(),
            1,
            vec![PdfCell { valid: false, ..*t.cell(1, 0) }; 2],
        )
        .unwrap();
        assert!(mlc_classify(&acts, &none).unwrap()[0].is_none());
        assert!(map_mrf_classify(&acts, &none, &MapMrfParams::with_weight(1.0)).unwrap()[0].is_none());
    }

    #[test]
    fn map_count_mismatch_is_an_error() {
        let t = table(&[(0.0, 1.0)]);
        let acts = ActivationStack::new(2, 1, 1, vec![0.0, 0.0]).unwrap();
        assert!(mlc_classify(&acts, &t).is_err());
    }

    #[test]
    fn strong_weight_smooths_single_outlier() {
        let t = table(&[(0.0, 1.0), (10.0, 1.0)]);
        let mut values = vec![0.2f32; 9];
        values[4] = 6.0;
        let acts = ActivationStack::new(1, 3, 3, values).unwrap();
        let mlc = mlc_classify(&acts, &t).unwrap().remove(0).unwrap();
        assert_eq!(mlc.labels[4], 1);
        let mrf = map_mrf_classify(&acts, &t, &MapMrfParams::with_weight(0.1))
            .unwrap()
            .remove(0)
            .unwrap();
        assert!(mrf.labels.iter().all(|&l| l == 0));
    }
}
