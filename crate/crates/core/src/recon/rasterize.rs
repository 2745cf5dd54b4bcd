use super::polygon::Polygon;
use crate::raster::BinaryMask;

/// Even-odd fill of a set of rings, sampled at pixel centers.
///
/// A pixel is set when its center lies strictly inside; holes subtract
/// because every ring contributes crossings to the same parity count.
pub fn rasterize<'a>(
    polys: impl IntoIterator<Item = &'a Polygon>,
    width: usize,
    height: usize,
) -> BinaryMask {
    let polys: Vec<&Polygon> = polys.into_iter().collect();
    let mut mask = BinaryMask::empty(width, height);
    let mut xs: Vec<f64> = Vec::new();
    for y in 0..height {
        let yc = y as f64 + 0.5;
        xs.clear();
        for poly in &polys {
            for (a, b) in poly.edges() {
                if (a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y) {
                    xs.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        for span in xs.chunks_exact(2) {
            let (x0, x1) = (span[0], span[1]);
            // centers x + 0.5 with x0 < x + 0.5 < x1
            let lo = ((x0 - 0.5).floor() + 1.0).max(0.0);
            let hi = ((x1 - 0.5).ceil() - 1.0).min(width as f64 - 1.0);
            if hi < lo {
                continue;
            }
            for x in lo as usize..=hi as usize {
                mask.set(x, y, true);
            }
        }
    }
    mask
}
