//! Traces a building outline and simplifies it at increasing tolerances.

use latentprobe::raster::BinaryMask;
use latentprobe::recon::{footprints_to_mask, iou_per_pixel, vectorize};

fn main() -> latentprobe::Result<()> {
    // An L-shaped building with a notched roof line and a courtyard.
    let mask = BinaryMask::from_fn(40, 30, |x, y| {
        let body = (4..30).contains(&x) && (4..26).contains(&y);
        let cutout = x >= 18 && y < 14;
        let notch = y == 14 && x % 3 == 0;
        let courtyard = (8..12).contains(&x) && (10..16).contains(&y);
        body && !cutout && !notch && !courtyard
    });
    for tol in [None, Some(0.5), Some(1.0), Some(2.0), Some(4.0)] {
        let fps = vectorize(&mask, tol);
        let back = footprints_to_mask(&fps, 40, 30);
        let vertices: usize = fps.iter().map(|f| f.vertex_count()).sum();
        println!(
            "tolerance {:>4}: {vertices:>3} vertices, IoU {:.4}",
            tol.map_or("none".to_string(), |t| t.to_string()),
            iou_per_pixel(&back, &mask)?
        );
    }
    Ok(())
}
