use super::{ActivationStack, BinaryMask, LabelMap, ProbabilityMap, Raster};
use crate::error::{Error, Result};

/// Integer-factor reduction of ground sampling density.
///
/// Continuous rasters take the block mean, categorical rasters the block
/// majority with the lowest label winning ties. Blocks at the right and bottom
/// edges are truncated when the size is not a multiple of `factor`.
pub trait Downsample: Sized {
    fn downsample(&self, factor: usize) -> Result<Self>;
}

fn check(factor: usize) -> Result<()> {
    if factor == 0 {
        return Err(Error::InvalidValue("downsampling factor must be >= 1".into()));
    }
    Ok(())
}

fn out_dims(w: usize, h: usize, factor: usize) -> (usize, usize) {
    (w.div_ceil(factor), h.div_ceil(factor))
}

fn block_mean(plane: &[f32], w: usize, h: usize, factor: usize) -> Vec<f32> {
    let (ow, oh) = out_dims(w, h, factor);
    let mut out = Vec::with_capacity(ow * oh);
    for by in 0..oh {
        for bx in 0..ow {
            let (mut sum, mut n) = (0.0f64, 0usize);
            for y in by * factor..((by + 1) * factor).min(h) {
                for x in bx * factor..((bx + 1) * factor).min(w) {
                    sum += plane[y * w + x] as f64;
                    n += 1;
                }
            }
            out.push((sum / n as f64) as f32);
        }
    }
    out
}

fn block_majority(raster: &Raster<u8>, factor: usize, num_labels: usize) -> Raster<u8> {
    let (w, h) = raster.dims();
    let (ow, oh) = out_dims(w, h, factor);
    let mut counts = vec![0usize; num_labels];
    Raster::from_fn(ow, oh, |bx, by| {
        counts.iter_mut().for_each(|c| *c = 0);
        for y in by * factor..((by + 1) * factor).min(h) {
            for x in bx * factor..((bx + 1) * factor).min(w) {
                counts[raster.get(x, y) as usize] += 1;
            }
        }
        // max_by_key keeps the last maximum; scan in reverse so the lowest label wins
        counts
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|(_, c)| **c)
            .map(|(l, _)| l as u8)
            .unwrap_or(0)
    })
}

impl Downsample for ProbabilityMap {
    fn downsample(&self, factor: usize) -> Result<Self> {
        check(factor)?;
        let (ow, oh) = out_dims(self.width(), self.height(), factor);
        let values = block_mean(self.values(), self.width(), self.height(), factor);
        ProbabilityMap::new(ow, oh, values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }
}

impl Downsample for ActivationStack {
    fn downsample(&self, factor: usize) -> Result<Self> {
        check(factor)?;
        let (ow, oh) = out_dims(self.width(), self.height(), factor);
        let mut values = Vec::with_capacity(self.maps() * ow * oh);
        for k in 0..self.maps() {
            values.extend(block_mean(self.plane(k), self.width(), self.height(), factor));
        }
        ActivationStack::new(self.maps(), ow, oh, values)
    }
}

impl Downsample for LabelMap {
    fn downsample(&self, factor: usize) -> Result<Self> {
        check(factor)?;
        LabelMap::from_raster(
            block_majority(self.raster(), factor, self.num_labels() as usize),
            self.num_labels(),
        )
    }
}

impl Downsample for BinaryMask {
    fn downsample(&self, factor: usize) -> Result<Self> {
        check(factor)?;
        let labels = block_majority(&self.raster().map(u8::from), factor, 2);
        Ok(BinaryMask::from_raster(labels.map(|l| l == 1)))
    }
}
