//! Finds the building threshold that maximizes per-pixel IoU.

use latentprobe::raster::ProbabilityMap;
use latentprobe::recon::{default_tau_grid, threshold_sweep};
use latentprobe::synth::{rect_mask, rectangle_city, rng};
use rand_distr::{Distribution, Normal};

fn main() -> latentprobe::Result<()> {
    let (w, h) = (96, 96);
    let gt = rect_mask(w, h, &rectangle_city(3, w, h, 10, (8, 20), 4));
    // Overconfident background and underconfident buildings.
    let mut r = rng(4);
    let noise = Normal::new(0.0, 0.15).expect("valid sigma");
    let values = gt
        .bits()
        .iter()
        .map(|&b| ((if b { 0.55f64 } else { 0.2 }) + noise.sample(&mut r)).clamp(0.0, 1.0) as f32)
        .collect();
    let p = ProbabilityMap::new(w, h, values)?;
    let sweep = threshold_sweep(&p, &gt, &default_tau_grid())?;
    for pt in &sweep {
        println!("tau {:.2}  IoU {:.4}  {}", pt.tau, pt.iou, "#".repeat((pt.iou * 50.0) as usize));
    }
    let best = sweep.iter().max_by(|a, b| a.iou.total_cmp(&b.iou)).expect("nonempty grid");
    println!("best tau {:.2} (IoU {:.4})", best.tau, best.iou);
    Ok(())
}
