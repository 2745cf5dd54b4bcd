//! Fits class models on one image and sub-classifies a held-out one.

use latentprobe::probe::{probe_pipeline, EvalImage, FitImage, ProbeConfig};
use latentprobe::synth::{planted_fixture, PlantedConfig};

fn main() -> latentprobe::Result<()> {
    // Weakly separated classes: a single map is unreliable, the fused stack is not.
    let base = PlantedConfig { separation: 1.0, maps: 32, ..PlantedConfig::default() };
    let fit = planted_fixture(&PlantedConfig { scene_seed: 1, ..base });
    let held = planted_fixture(&PlantedConfig { scene_seed: 2, ..base });
    let config = ProbeConfig::default();
    let (table, outcomes) = probe_pipeline(
        &[FitImage { activations: fit.activations, labels: fit.labels }],
        &[EvalImage {
            activations: held.activations,
            se_weights: held.se_weights,
            buildings: held.buildings,
            labels: Some(held.labels),
        }],
        &config,
    )?;
    println!("valid (label, map) models: {}", table.valid_cell_count());
    let report = outcomes[0].report.as_ref().expect("held-out labels given");
    print!("{}", report.to_csv(&config.label_names)?);
    println!("pixel accuracy {:.4}", report.pixel_accuracy);
    Ok(())
}
