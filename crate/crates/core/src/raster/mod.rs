//! Raster containers and their on-disk formats.
//!
//! Every raster is row-major with `(x, y)` addressing, `x` along the width.
//! Probability maps and activations hold `f32` samples because that is the
//! interchange precision of the NPY files; arithmetic on them is done in `f64`.

mod downsample;
mod manifest;
mod merge;
pub mod npy;
mod png;

pub use downsample::Downsample;
pub use manifest::{load_manifest, TileManifest};
pub use merge::{merge_patches, Patch};
pub use npy::{load_npy_f32, save_npy_f32, NpyTensor};
pub use png::{load_label_png, load_mask_png, save_label_png, save_mask_png};

use crate::error::{Error, Result};

/// Dense row-major grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Raster<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width * height != data.len() {
            return Err(Error::LengthMismatch {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Raster {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Raster {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Raster<U> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub(crate) fn ensure_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: self.dims(),
            });
        }
        Ok(())
    }
}

/// Per-pixel building probability in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap(Raster<f32>);

impl ProbabilityMap {
    pub fn new(width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidValue(format!(
                "probability {v} outside [0,1]"
            )));
        }
        Ok(ProbabilityMap(Raster::new(width, height, values)?))
    }

    pub fn from_raster(raster: Raster<f32>) -> Result<Self> {
        let (w, h) = raster.dims();
        Self::new(w, h, raster.into_data())
    }

    pub fn raster(&self) -> &Raster<f32> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.0.get(x, y)
    }

    pub fn values(&self) -> &[f32] {
        self.0.data()
    }

    /// Probability map whose values are exactly the mask bits.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        ProbabilityMap(mask.raster().map(|b| if b { 1.0 } else { 0.0 }))
    }
}

/// Thresholded building mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask(Raster<bool>);

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        Ok(BinaryMask(Raster::new(width, height, bits)?))
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BinaryMask(Raster::filled(width, height, false))
    }

    pub fn from_raster(raster: Raster<bool>) -> Self {
        BinaryMask(raster)
    }

    pub fn from_fn(width: usize, height: usize, f: impl FnMut(usize, usize) -> bool) -> Self {
        BinaryMask(Raster::from_fn(width, height, f))
    }

    pub fn raster(&self) -> &Raster<bool> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.0.get(x, y)
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.0.set(x, y, value)
    }

    pub fn bits(&self) -> &[bool] {
        self.0.data()
    }

    pub fn count_ones(&self) -> usize {
        self.0.data().iter().filter(|b| **b).count()
    }

    /// Pixels equal to `label` in a label map.
    pub fn from_label(map: &LabelMap, label: u8) -> Self {
        BinaryMask(map.raster().map(|l| l == label))
    }
}

/// Categorical raster with `num_labels` classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    raster: Raster<u8>,
    num_labels: u8,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u8>, num_labels: u8) -> Result<Self> {
        Self::from_raster(Raster::new(width, height, labels)?, num_labels)
    }

    pub fn from_raster(raster: Raster<u8>, num_labels: u8) -> Result<Self> {
        if num_labels == 0 {
            return Err(Error::InvalidValue("label count must be positive".into()));
        }
        if let Some(l) = raster.data().iter().find(|l| **l >= num_labels) {
            return Err(Error::InvalidValue(format!(
                "label {l} not below label count {num_labels}"
            )));
        }
        Ok(LabelMap { raster, num_labels })
    }

    pub fn filled(width: usize, height: usize, label: u8, num_labels: u8) -> Result<Self> {
        Self::from_raster(Raster::filled(width, height, label), num_labels)
    }

    /// Two-label map: building pixels become `1`, the rest `0`.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        LabelMap {
            raster: mask.raster().map(u8::from),
            num_labels: 2,
        }
    }

    pub fn raster(&self) -> &Raster<u8> {
        &self.raster
    }

    pub fn num_labels(&self) -> u8 {
        self.num_labels
    }

    pub fn width(&self) -> usize {
        self.raster.width()
    }

    pub fn height(&self) -> usize {
        self.raster.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.raster.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.raster.get(x, y)
    }

    pub fn labels(&self) -> &[u8] {
        self.raster.data()
    }
}

/// `K` penultimate-layer feature maps of equal size, stored map-major `(K, H, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationStack {
    maps: usize,
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl ActivationStack {
    pub fn new(maps: usize, width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        if maps == 0 {
            return Err(Error::InvalidValue("activation stack needs K > 0".into()));
        }
        if values.len() != maps * width * height {
            return Err(Error::LengthMismatch {
                expected: maps * width * height,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("non-finite activation {v}")));
        }
        Ok(ActivationStack {
            maps,
            width,
            height,
            values,
        })
    }

    pub fn maps(&self) -> usize {
        self.maps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, k: usize, x: usize, y: usize) -> f32 {
        self.values[(k * self.height + y) * self.width + x]
    }

    /// Row-major plane of feature map `k`.
    pub fn plane(&self, k: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.values[k * n..(k + 1) * n]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

/// Excitation weights of the final squeeze-and-excitation block, one per feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct SeWeightVector(Vec<f32>);

impl SeWeightVector {
    pub fn new(weights: Vec<f32>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidValue(format!("SE weight {w} outside [0,1]")));
        }
        Ok(SeWeightVector(weights))
    }

    pub fn uniform(len: usize) -> Self {
        SeWeightVector(vec![1.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f32] {
        &self.0
    }
}

/// One palette entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteEntry {
    pub label: u8,
    pub rgb: [u8; 3],
    pub name: String,
}

/// Ordered label colors; ids are contiguous from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorPalette {
    entries: Vec<PaletteEntry>,
}

impl ColorPalette {
    pub const BUILDING: u8 = 0;
    pub const ROAD: u8 = 1;
    pub const CAR: u8 = 2;
    pub const TREE: u8 = 3;
    pub const LOW_VEGETATION: u8 = 4;
    pub const CLUTTER: u8 = 5;

    pub fn new(colors: Vec<([u8; 3], String)>) -> Result<Self> {
        if colors.is_empty() || colors.len() > 256 {
            return Err(Error::InvalidValue(format!(
                "palette size {} not in 1..=256",
                colors.len()
            )));
        }
        for (i, (rgb, _)) in colors.iter().enumerate() {
            if colors[..i].iter().any(|(other, _)| other == rgb) {
                return Err(Error::InvalidValue(format!(
                    "duplicate palette color {rgb:?}"
                )));
            }
        }
        let entries = colors
            .into_iter()
            .enumerate()
            .map(|(i, (rgb, name))| PaletteEntry {
                label: i as u8,
                rgb,
                name,
            })
            .collect();
        Ok(ColorPalette { entries })
    }

    /// Six-class aerial palette: building, road, car, tree, low vegetation, clutter.
    pub fn isprs() -> Self {
        let colors = [
            ([0, 0, 255], "building"),
            ([255, 255, 255], "road"),
            ([255, 255, 0], "car"),
            ([0, 255, 0], "tree"),
            ([0, 255, 255], "low_vegetation"),
            ([255, 0, 0], "clutter"),
        ];
        ColorPalette::new(
            colors
                .iter()
                .map(|(rgb, name)| (*rgb, name.to_string()))
                .collect(),
        )
        .expect("static palette is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn label_of(&self, rgb: [u8; 3]) -> Option<u8> {
        self.entries.iter().find(|e| e.rgb == rgb).map(|e| e.label)
    }

    pub fn color_of(&self, label: u8) -> Option<[u8; 3]> {
        self.entries.get(label as usize).map(|e| e.rgb)
    }
}
