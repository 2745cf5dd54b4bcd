//! Writes a tile's tensors and label image, then reads them back through a manifest.

use latentprobe::raster::{
    load_label_png, load_manifest, load_npy_f32, merge_patches, ColorPalette, Downsample, Patch,
    ProbabilityMap,
};
use latentprobe::synth::{planted_fixture, write_manifest, PlantedConfig};

fn main() -> latentprobe::Result<()> {
    let dir = std::env::temp_dir().join("latentprobe_raster_io");
    std::fs::create_dir_all(&dir).map_err(|e| latentprobe::Error::InvalidValue(e.to_string()))?;

    let fixture = planted_fixture(&PlantedConfig { maps: 4, ..PlantedConfig::default() });
    let tile = fixture.write(&dir, "tile")?;
    write_manifest(&dir.join("manifest.json"), &[tile])?;

    let tiles = load_manifest(dir.join("manifest.json"))?;
    let acts = load_npy_f32(tiles[0].require("activations")?)?.into_activations()?;
    let labels = load_label_png(tiles[0].require("labels")?, &ColorPalette::isprs())?;
    println!("tile {}: {} maps of {}x{}", tiles[0].name(), acts.maps(), acts.width(), acts.height());
    println!("round trip exact: {}", acts == fixture.activations && labels == fixture.labels);

    let half = acts.downsample(2)?;
    println!("downsampled to {}x{}", half.width(), half.height());

    let left = ProbabilityMap::new(8, 1, vec![0.2; 8])?;
    let right = ProbabilityMap::new(8, 1, vec![0.8; 8])?;
    let merged = merge_patches(
        &[Patch { map: left, origin: (0, 0) }, Patch { map: right, origin: (4, 0) }],
        (12, 1),
        0.5,
    )?;
    println!("blended row: {:?}", merged.values());
    Ok(())
}
