//! Classification versus reconstruction accuracy on a noisy synthetic city.

use latentprobe::raster::ProbabilityMap;
use latentprobe::recon::{reconstruction_analysis, ReconParams};
use latentprobe::synth::{rect_mask, rectangle_city, rng, salt_noise};
use rand::Rng;

fn main() -> latentprobe::Result<()> {
    let (w, h) = (128, 128);
    let rects = rectangle_city(21, w, h, 14, (9, 26), 4);
    let gt = rect_mask(w, h, &rects);
    let mut r = rng(22);
    let soft: Vec<f32> = gt
        .bits()
        .iter()
        .map(|&b| if b { r.gen_range(0.45..1.0) } else { r.gen_range(0.0..0.35) })
        .collect();
    let clean = ProbabilityMap::new(w, h, soft)?;

    println!("salt  pix_cls  pix_rec  bldg_cls  bldg_rec  vertices");
    for rate in [0.0, 0.01, 0.03, 0.1] {
        let p = salt_noise(&clean, rate, 23);
        let rep = reconstruction_analysis(&p, &gt, &ReconParams::default())?;
        let vertices: usize = rep.footprints.iter().map(|f| f.vertex_count()).sum();
        println!(
            "{rate:<5} {:>8.4} {:>8.4} {:>9.4} {:>9.4} {vertices:>9}",
            rep.classification.per_pixel_iou,
            rep.reconstruction.per_pixel_iou,
            rep.classification.per_building_iou,
            rep.reconstruction.per_building_iou,
        );
    }
    Ok(())
}
