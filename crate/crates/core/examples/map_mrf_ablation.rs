//! MLC against MAP-MRF over the weight grid on a noisy planted image.

use std::time::Instant;

use latentprobe::probe::{
    fit_table, probe_image, Classifier, EvalImage, FitImage, MapMrfParams, ProbeConfig,
    DEFAULT_W_GRID,
};
use latentprobe::synth::{planted_fixture, PlantedConfig};

fn main() -> latentprobe::Result<()> {
    let base = PlantedConfig { separation: 0.6, maps: 8, width: 48, height: 48, ..PlantedConfig::default() };
    let fit = planted_fixture(&PlantedConfig { scene_seed: 1, ..base });
    let held = planted_fixture(&PlantedConfig { scene_seed: 2, ..base });
    let image = EvalImage {
        activations: held.activations,
        se_weights: held.se_weights,
        buildings: held.buildings,
        labels: Some(held.labels),
    };
    let table = fit_table(
        &[FitImage { activations: fit.activations, labels: fit.labels }],
        &ProbeConfig::default(),
    )?;
    let mut runs = vec![("mlc".to_string(), Classifier::Mlc)];
    for w in DEFAULT_W_GRID.into_iter().chain([0.5]) {
        runs.push((format!("w={w}"), Classifier::MapMrf(MapMrfParams::with_weight(w))));
    }
    println!("{:<10} {:>8} {:>8} {:>8}", "method", "mean F1", "acc", "seconds");
    for (name, classifier) in runs {
        let config = ProbeConfig { classifier, ..ProbeConfig::default() };
        let start = Instant::now();
        let out = probe_image(&table, &image, &config)?;
        let secs = start.elapsed().as_secs_f64();
        let r = out.report.expect("labels given");
        let mean = r.f1.iter().sum::<f64>() / r.f1.len() as f64;
        println!("{name:<10} {mean:>8.4} {:>8.4} {secs:>8.3}", r.pixel_accuracy);
    }
    Ok(())
}
