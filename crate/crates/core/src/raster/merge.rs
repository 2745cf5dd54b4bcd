use super::{ProbabilityMap, Raster};
use crate::error::{Error, Result};

/// A network output patch placed at `origin = (x, y)` within the tile.
#[derive(Debug, Clone)]
pub struct Patch {
    pub map: ProbabilityMap,
    pub origin: (usize, usize),
}

/// Linear ramp `min(1, d / band)` where `d` is the distance from the pixel
/// center to the nearest patch edge along one axis.
fn ramp(i: usize, n: usize, band: f64) -> f64 {
    if band <= 0.0 {
        return 1.0;
    }
    let d = (i as f64 + 0.5).min(n as f64 - i as f64 - 0.5);
    (d / band).min(1.0)
}

/// Blends overlapping patches into a `tile_size = (width, height)` map by a
/// weighted average whose weights fall off towards each patch border over a
/// band of `overlap_fraction * patch_size` pixels.
pub fn merge_patches(
    patches: &[Patch],
    tile_size: (usize, usize),
    overlap_fraction: f64,
) -> Result<ProbabilityMap> {
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::InvalidValue(format!(
            "overlap fraction {overlap_fraction} outside [0,1)"
        )));
    }
    let (tw, th) = tile_size;
    let mut num = Raster::filled(tw, th, 0.0f64);
    let mut den = Raster::filled(tw, th, 0.0f64);

    for patch in patches {
        let (pw, ph) = patch.map.dims();
        let (ox, oy) = patch.origin;
        let band_x = overlap_fraction * pw as f64;
        let band_y = overlap_fraction * ph as f64;
        let wx: Vec<f64> = (0..pw).map(|i| ramp(i, pw, band_x)).collect();
        let wy: Vec<f64> = (0..ph).map(|j| ramp(j, ph, band_y)).collect();
        for j in 0..ph {
            let ty = oy + j;
            if ty >= th {
                break;
            }
            for i in 0..pw {
                let tx = ox + i;
                if tx >= tw {
                    break;
                }
                let w = wx[i] * wy[j];
                let v = patch.map.get(i, j) as f64;
                num.set(tx, ty, num.get(tx, ty) + w * v);
                den.set(tx, ty, den.get(tx, ty) + w);
            }
        }
    }

    let mut values = Vec::with_capacity(tw * th);
    for y in 0..th {
        for x in 0..tw {
            let d = den.get(x, y);
            if d <= 0.0 {
                return Err(Error::UncoveredPixel { x, y });
            }
            values.push(((num.get(x, y) / d) as f32).clamp(0.0, 1.0));
        }
    }
    ProbabilityMap::new(tw, th, values)
}
