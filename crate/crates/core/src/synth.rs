//! Deterministic synthetic fixtures.
//!
//! Planted-activation fixtures draw every pixel's activation on every feature
//! map from a known per-label Gaussian, so the fitted models and classifier
//! accuracy can be checked against ground truth. Rectangle cities provide
//! building masks for the reconstruction pipeline.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::raster::{
    save_label_png, save_mask_png, ActivationStack, BinaryMask, ColorPalette, LabelMap,
    ProbabilityMap, Raster, SeWeightVector, TileManifest,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    /// Seeds the class means.
    pub seed: u64,
    /// Seeds the scene layout and the noise; fixtures sharing `seed` but not
    /// `scene_seed` are independent images of the same classes.
    pub scene_seed: u64,
    pub width: usize,
    pub height: usize,
    pub maps: usize,
    pub num_labels: u8,
    /// Distance between consecutive label means, in units of `sigma`.
    pub separation: f64,
    pub sigma: f64,
    /// Side of the square label blocks of the scene.
    pub block: usize,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            seed: 0,
            scene_seed: 1,
            width: 64,
            height: 64,
            maps: 16,
            num_labels: 6,
            separation: 10.0,
            sigma: 1.0,
            block: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedFixture {
    pub activations: ActivationStack,
    pub labels: LabelMap,
    pub se_weights: SeWeightVector,
    /// Pixels of label 0.
    pub buildings: BinaryMask,
    pub probability: ProbabilityMap,
    /// True `(mu, sigma)` indexed `[label * maps + map]`.
    pub true_params: Vec<(f64, f64)>,
}

/// Scene of square label blocks with every label present (when there are at
/// least as many blocks as labels) and activations drawn from per-label
/// Gaussians. On each map the label means are a random permutation of
/// `offset + i * separation * sigma`, followed by a ReLU.
pub fn planted_fixture(cfg: &PlantedConfig) -> PlantedFixture {
    let mut params_rng = rng(cfg.seed);
    let mut rng = rng(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ cfg.scene_seed);
    let l = cfg.num_labels as usize;
    let block = cfg.block.max(1);
    let (bw, bh) = (cfg.width.div_ceil(block), cfg.height.div_ceil(block));
    let mut block_labels: Vec<u8> = (0..bw * bh).map(|_| rng.gen_range(0..cfg.num_labels)).collect();
    let mut slots: Vec<usize> = (0..block_labels.len()).collect();
    slots.shuffle(&mut rng);
    for (label, &slot) in slots.iter().take(l).enumerate() {
        block_labels[slot] = label as u8;
    }
    let labels = Raster::from_fn(cfg.width, cfg.height, |x, y| {
        block_labels[(y / block) * bw + x / block]
    });

    let offset = 5.0 * cfg.sigma;
    let mut true_params = vec![(0.0, 0.0); l * cfg.maps];
    for k in 0..cfg.maps {
        let mut order: Vec<usize> = (0..l).collect();
        order.shuffle(&mut params_rng);
        for (label, &rank) in order.iter().enumerate() {
            let mu = offset + rank as f64 * cfg.separation * cfg.sigma;
            true_params[label * cfg.maps + k] = (mu, cfg.sigma);
        }
    }
    let mut values = Vec::with_capacity(cfg.maps * cfg.width * cfg.height);
    for k in 0..cfg.maps {
        for &label in labels.data() {
            let (mu, sigma) = true_params[label as usize * cfg.maps + k];
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push((mu + sigma * z).max(0.0) as f32);
        }
    }

    let labels = LabelMap::from_raster(labels, cfg.num_labels).expect("labels below count");
    let buildings = BinaryMask::from_label(&labels, 0);
    PlantedFixture {
        activations: ActivationStack::new(cfg.maps, cfg.width, cfg.height, values)
            .expect("finite activations"),
        se_weights: SeWeightVector::uniform(cfg.maps),
        probability: ProbabilityMap::from_mask(&buildings),
        buildings,
        labels,
        true_params,
    }
}

impl PlantedFixture {
    /// Writes `<name>_act.npy`, `<name>_se.npy`, `<name>_prob.npy` and
    /// `<name>_gt.png` into `dir`; returns the manifest entry with paths
    /// relative to `dir`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<TileManifest> {
        let act = format!("{name}_act.npy");
        let se = format!("{name}_se.npy");
        let prob = format!("{name}_prob.npy");
        let gt = format!("{name}_gt.png");
        self.activations.save_npy(dir.join(&act))?;
        self.se_weights.save_npy(dir.join(&se))?;
        self.probability.save_npy(dir.join(&prob))?;
        save_label_png(&self.labels, &ColorPalette::isprs(), dir.join(&gt))?;
        Ok(TileManifest {
            image: None,
            labels: Some(gt.into()),
            activations: Some(act.into()),
            se_weights: Some(se.into()),
            probability: Some(prob.into()),
            gsd_cm: 30.0,
        })
    }
}

/// Writes `<name>_prob.npy` and `<name>_gt.png` (gray building mask) into
/// `dir`; returns the manifest entry with paths relative to `dir`.
pub fn write_recon_tile(
    dir: &Path,
    name: &str,
    probability: &ProbabilityMap,
    reference: &BinaryMask,
) -> Result<TileManifest> {
    let prob = format!("{name}_prob.npy");
    let gt = format!("{name}_gt.png");
    probability.save_npy(dir.join(&prob))?;
    save_mask_png(reference, dir.join(&gt))?;
    Ok(TileManifest {
        image: None,
        labels: Some(gt.into()),
        activations: None,
        se_weights: None,
        probability: Some(prob.into()),
        gsd_cm: 30.0,
    })
}

/// Writes a manifest array as JSON.
pub fn write_manifest(path: &Path, tiles: &[TileManifest]) -> Result<()> {
    let text = serde_json::to_string_pretty(tiles)
        .map_err(|e| crate::Error::Manifest(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| crate::Error::io(path, e))
}

/// Axis-aligned rectangle `(x, y, width, height)`.
pub type Rect = (usize, usize, usize, usize);

pub fn rect_mask(width: usize, height: usize, rects: &[Rect]) -> BinaryMask {
    BinaryMask::from_fn(width, height, |x, y| {
        rects
            .iter()
            .any(|&(rx, ry, rw, rh)| (rx..rx + rw).contains(&x) && (ry..ry + rh).contains(&y))
    })
}

/// Up to `count` non-touching rectangles with sides in `sides` (inclusive),
/// kept at least `gap` pixels apart and away from the image border.
///
/// With the default refinement costs, gaps under 4 pixels between buildings
/// (2 pixels to the border) are filled in, so fixtures meant to survive
/// refinement unchanged should use `gap >= 4`.
pub fn rectangle_city(
    seed: u64,
    width: usize,
    height: usize,
    count: usize,
    sides: (usize, usize),
    gap: usize,
) -> Vec<Rect> {
    let mut rng = rng(seed);
    let mut rects: Vec<Rect> = Vec::new();
    let mut attempts = 0;
    while rects.len() < count && attempts < 200 * count.max(1) {
        attempts += 1;
        let rw = rng.gen_range(sides.0..=sides.1);
        let rh = rng.gen_range(sides.0..=sides.1);
        if rw + 2 * gap > width || rh + 2 * gap > height {
            continue;
        }
        let x = rng.gen_range(gap..=width - rw - gap);
        let y = rng.gen_range(gap..=height - rh - gap);
        let clear = rects.iter().all(|&(ox, oy, ow, oh)| {
            x >= ox + ow + gap || ox >= x + rw + gap || y >= oy + oh + gap || oy >= y + rh + gap
        });
        if clear {
            rects.push((x, y, rw, rh));
        }
    }
    rects
}

/// Sets a `rate` fraction of pixels to probability 1 (salt). The same seed
/// yields nested corruptions: every pixel salted at a lower rate is also
/// salted at a higher one.
pub fn salt_noise(p: &ProbabilityMap, rate: f64, seed: u64) -> ProbabilityMap {
    let mut rng = rng(seed);
    let values = p
        .values()
        .iter()
        .map(|&v| if rng.gen::<f64>() < rate { 1.0 } else { v })
        .collect();
    ProbabilityMap::new(p.width(), p.height(), values).expect("values stay in [0,1]")
}
