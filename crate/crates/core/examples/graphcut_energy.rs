//! Denoises a binary image exactly with one min-cut and a three-label image
//! approximately with alpha-expansion.

use latentprobe::graphcut::{alpha_expansion, min_cut_binary, total_energy, EnergyModel, Pairwise};
use latentprobe::raster::Raster;
use latentprobe::synth::rng;
use rand::Rng;

fn show(f: &Raster<u8>) {
    for y in 0..f.height() {
        let row: String = (0..f.width()).map(|x| char::from(b'0' + f.get(x, y))).collect();
        println!("  {row}");
    }
}

fn main() -> latentprobe::Result<()> {
    let (w, h) = (16, 8);
    let mut r = rng(7);
    // Noisy observation of three vertical bands.
    let observed = Raster::from_fn(w, h, |x, _| {
        let truth = (x * 3 / w) as u8;
        if r.gen::<f64>() < 0.2 { r.gen_range(0..3) } else { truth }
    });
    println!("observed:");
    show(&observed);

    let unary = |labels: usize| {
        observed
            .data()
            .iter()
            .flat_map(|&o| (0..labels).map(move |l| if l as u8 == o { 0.0 } else { 10.0 }))
            .collect::<Vec<_>>()
    };

    let model = EnergyModel::new(w, h, 3, unary(3), Pairwise::Potts(8.0))?;
    let res = alpha_expansion(&model, &observed, 10)?;
    println!("alpha-expansion, energies per sweep {:?}:", res.sweep_energies);
    show(&res.labeling);

    let binary = observed.map(|l| u8::from(l > 0));
    let unary2: Vec<f64> = binary
        .data()
        .iter()
        .flat_map(|&o| [if o == 0 { 0.0 } else { 10.0 }, if o == 1 { 0.0 } else { 10.0 }])
        .collect();
    let model = EnergyModel::new(w, h, 2, unary2, Pairwise::Potts(8.0))?;
    let f = min_cut_binary(&model)?;
    println!("binary min-cut, energy {} -> {}:", total_energy(&model, &binary)?, total_energy(&model, &f)?);
    show(&f);
    Ok(())
}
