//! Per-(label, feature map) Gaussian models of penultimate-layer activations.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ActivationStack, LabelMap};

/// Values with magnitude at or below this are ReLU zeros and are discarded
/// before fitting.
pub const ZERO_EPSILON: f64 = 1e-12;

/// Activation samples grouped by `(label, feature map)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    num_labels: usize,
    maps: usize,
    samples: Vec<Vec<f32>>,
}

impl SampleSet {
    pub fn new(num_labels: usize, maps: usize) -> Self {
        SampleSet {
            num_labels,
            maps,
            samples: vec![Vec::new(); num_labels * maps],
        }
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn maps(&self) -> usize {
        self.maps
    }

    pub fn get(&self, label: usize, map: usize) -> &[f32] {
        &self.samples[label * self.maps + map]
    }

    pub fn push(&mut self, label: usize, map: usize, value: f32) {
        self.samples[label * self.maps + map].push(value);
    }

    /// Concatenates another image's samples onto these.
    pub fn extend(&mut self, other: &SampleSet) -> Result<()> {
        if (other.num_labels, other.maps) != (self.num_labels, self.maps) {
            return Err(Error::DimensionMismatch {
                expected: (self.num_labels, self.maps),
                found: (other.num_labels, other.maps),
            });
        }
        for (dst, src) in self.samples.iter_mut().zip(&other.samples) {
            dst.extend_from_slice(src);
        }
        Ok(())
    }

    pub fn remove_zero_outliers(&mut self) {
        for cell in &mut self.samples {
            *cell = remove_zero_outliers(cell);
        }
    }
}

/// Collects `acts[k][y][x]` into cell `(gt[y][x], k)`.
pub fn gather_activations(acts: &ActivationStack, gt: &LabelMap) -> Result<SampleSet> {
    gt.raster().ensure_dims(acts.dims())?;
    let mut set = SampleSet::new(gt.num_labels() as usize, acts.maps());
    for k in 0..acts.maps() {
        for (&v, &l) in acts.plane(k).iter().zip(gt.labels()) {
            set.samples[l as usize * set.maps + k].push(v);
        }
    }
    Ok(set)
}

pub fn remove_zero_outliers(samples: &[f32]) -> Vec<f32> {
    samples
        .iter()
        .copied()
        .filter(|v| (*v as f64).abs() > ZERO_EPSILON)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub min_samples: usize,
    pub sigma_floor: f64,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            min_samples: 10,
            sigma_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfCell {
    pub mu: f64,
    pub sigma: f64,
    pub n: usize,
    pub valid: bool,
}

impl PdfCell {
    pub fn density(&self, v: f64) -> f64 {
        gaussian_density(v, self.mu, self.sigma)
    }
}

pub fn gaussian_density(v: f64, mu: f64, sigma: f64) -> f64 {
    let z = (v - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Gaussian parameters for every `(label, feature map)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPdfTable {
    labels: Vec<String>,
    maps: usize,
    cells: Vec<PdfCell>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    labels: Vec<String>,
    maps: usize,
    cells: Vec<Vec<PdfCell>>,
}

impl ClassPdfTable {
    pub fn new(labels: Vec<String>, maps: usize, cells: Vec<PdfCell>) -> Result<Self> {
        if cells.len() != labels.len() * maps {
            return Err(Error::LengthMismatch {
                expected: labels.len() * maps,
                found: cells.len(),
            });
        }
        Ok(ClassPdfTable {
            labels,
            maps,
            cells,
        })
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn maps(&self) -> usize {
        self.maps
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cell(&self, label: usize, map: usize) -> &PdfCell {
        &self.cells[label * self.maps + map]
    }

    /// Labels competing on feature map `map`, ascending.
    pub fn valid_labels(&self, map: usize) -> Vec<u8> {
        (0..self.num_labels())
            .filter(|&l| self.cell(l, map).valid)
            .map(|l| l as u8)
            .collect()
    }

    pub fn valid_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| c.valid).count()
    }

    pub fn to_json(&self) -> String {
        let json = TableJson {
            labels: self.labels.clone(),
            maps: self.maps,
            cells: self.cells.chunks(self.maps.max(1)).map(<[PdfCell]>::to_vec).collect(),
        };
        serde_json::to_string_pretty(&json).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: TableJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidTable(e.to_string()))?;
        if json.cells.len() != json.labels.len()
            || json.cells.iter().any(|row| row.len() != json.maps)
        {
            return Err(Error::InvalidTable(
                "cells must be a labels x maps matrix".into(),
            ));
        }
        ClassPdfTable::new(json.labels, json.maps, json.cells.concat())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Sample mean and population standard deviation per cell.
///
/// Cells with fewer than `min_samples` values are kept but marked invalid.
/// Outlier removal is expected to have been applied already.
pub fn fit_gaussians(samples: &SampleSet, labels: Vec<String>, params: &FitParams) -> Result<ClassPdfTable> {
    if labels.len() != samples.num_labels() {
        return Err(Error::LengthMismatch {
            expected: samples.num_labels(),
            found: labels.len(),
        });
    }
    let cells = samples
        .samples
        .iter()
        .map(|values| fit_cell(values, params))
        .collect();
    ClassPdfTable::new(labels, samples.maps(), cells)
}

fn fit_cell(values: &[f32], params: &FitParams) -> PdfCell {
    let n = values.len();
    if n == 0 {
        return PdfCell {
            mu: 0.0,
            sigma: params.sigma_floor,
            n: 0,
            valid: false,
        };
    }
    let mu = values.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mu).powi(2))
        .sum::<f64>()
        / n as f64;
    PdfCell {
        mu,
        sigma: var.sqrt().max(params.sigma_floor),
        n,
        valid: n >= params.min_samples,
    }
}

/// Generic label names `label0`, `label1`, ...
pub fn default_label_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("label{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_from(values: &[f32]) -> SampleSet {
        let mut s = SampleSet::new(1, 1);
        s.samples[0] = values.to_vec();
        s
    }

    fn fit(values: &[f32], min_samples: usize) -> PdfCell {
        let params = FitParams {
            min_samples,
            ..FitParams::default()
        };
        *fit_gaussians(&set_from(values), default_label_names(1), &params)
            .unwrap()
            .cell(0, 0)
    }

    #[test]
    fn gathers_by_label() {
        let acts = ActivationStack::new(1, 2, 1, vec![5.0, 7.0]).unwrap();
        let gt = LabelMap::new(2, 1, vec![0, 1], 2).unwrap();
        let s = gather_activations(&acts, &gt).unwrap();
        assert_eq!(s.get(0, 0), &[5.0]);
        assert_eq!(s.get(1, 0), &[7.0]);
        let mut twice = s.clone();
        twice.extend(&s).unwrap();
        assert_eq!(twice.get(1, 0), &[7.0, 7.0]);
    }

    #[test]
    fn zero_outliers_removed() {
        assert_eq!(remove_zero_outliers(&[0.0, 0.0, 2.0, 4.0]), vec![2.0, 4.0]);
        assert!(remove_zero_outliers(&[0.0; 5]).is_empty());
        assert_eq!(remove_zero_outliers(&[1e-13, 3.0]), vec![3.0]);
    }

    #[test]
    fn closed_form_fits() {
        let c = fit(&[4.0, 4.0, 4.0], 1);
        assert_eq!((c.mu, c.sigma, c.valid), (4.0, 1e-6, true));
        let c = fit(&[1.0, 2.0, 3.0], 1);
        assert_eq!(c.mu, 2.0);
        assert!((c.sigma - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(!fit(&[1.0, 2.0, 3.0, 4.0, 5.0], 10).valid);
    }

    #[test]
    fn json_round_trip_and_layout() {
        let cells = vec![
            PdfCell { mu: 1.0, sigma: 0.5, n: 12, valid: true },
            PdfCell { mu: 2.0, sigma: 0.25, n: 3, valid: false },
        ];
        let t = ClassPdfTable::new(vec!["a".into()], 2, cells).unwrap();
        let text = t.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["cells"][0][1]["n"], 3);
        assert_eq!(v["maps"], 2);
        assert_eq!(ClassPdfTable::from_json(&text).unwrap(), t);
        assert!(ClassPdfTable::from_json(r#"{"labels":["a"],"maps":2,"cells":[[]]}"#).is_err());
    }
}
