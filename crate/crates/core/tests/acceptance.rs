//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use latentprobe::graphcut::{alpha_expansion, min_cut_binary, EnergyModel, Label, Pairwise};
use latentprobe::probe::{
    evaluate_f1, fit_gaussians, fit_table, map_mrf_classify, mlc_classify, probe_pipeline,
    EvalImage, FitImage, FitParams, MapMrfParams, ProbeConfig, SampleSet,
};
use latentprobe::raster::{ProbabilityMap, Raster};
use latentprobe::recon::{
    default_tau_grid, footprints_to_mask, iou_per_pixel, reconstruction_analysis, refine_binary,
    simplify_chain_indices, threshold, threshold_sweep, vectorize, Point, ReconParams,
    RefineParams, DEFAULT_TAU,
};
use latentprobe::synth::{
    planted_fixture, rect_mask, rectangle_city, rng, write_manifest, write_recon_tile,
    PlantedConfig, Rect,
};
use rand::Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random submodular 3x3 binary models with integer costs against exhaustive search.
fn graphcut_exactness() -> Outcome {
    const TRIALS: usize = 250;
    let mut r = rng(1);
    let start = Instant::now();
    let mut models = Vec::with_capacity(TRIALS);
    for _ in 0..TRIALS {
        let unary: Vec<f64> = (0..18).map(|_| r.gen_range(0..20) as f64).collect();
        let mut table = Vec::with_capacity(12 * 4);
        for _ in 0..12 {
            let (a, b, c, d): (f64, f64, f64, f64) = (
                r.gen_range(0..10) as f64,
                r.gen_range(0..10) as f64,
                r.gen_range(0..10) as f64,
                r.gen_range(0..10) as f64,
            );
            let b = b.max(a + d - c);
            table.extend([a, b, c, d]);
        }
        models.push(EnergyModel::new(3, 3, 2, unary, Pairwise::Table(table)).map_err(|e| e.to_string())?);
    }
    let mut solved = Vec::with_capacity(TRIALS);
    for m in &models {
        solved.push(min_cut_binary(m).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed().as_secs_f64();
    for (i, (m, f)) in models.iter().zip(&solved).enumerate() {
        let got = common::energy(m, f.data());
        let (best, _) = common::brute_force(m);
        check(got == best, || format!("trial {i}: min-cut energy {got} vs optimum {best}"))?;
    }
    check(elapsed < 1.0, || format!("min-cut time {elapsed:.3}s >= 1s"))?;
    Ok(format!("{TRIALS} models exact, solve time {elapsed:.3}s"))
}

/// 2x2, three-label Potts models against the 81-labeling optimum.
fn expansion_quality() -> Outcome {
    const TRIALS: usize = 200;
    let mut r = rng(2);
    let (mut exact, mut worst, mut over) = (0, 0.0f64, 0);
    for i in 0..TRIALS {
        let unary: Vec<f64> = (0..12).map(|_| r.gen::<f64>() * 10.0).collect();
        let lambda = r.gen::<f64>() * 5.0;
        let init = Raster::from_fn(2, 2, |x, y| {
            let p = y * 2 + x;
            (0..3)
                .min_by(|&a, &b| unary[p * 3 + a].total_cmp(&unary[p * 3 + b]))
                .unwrap() as Label
        });
        let m = EnergyModel::new(2, 2, 3, unary, Pairwise::Potts(lambda)).map_err(|e| e.to_string())?;
        let res = alpha_expansion(&m, &init, 20).map_err(|e| e.to_string())?;
        check(res.sweep_energies.windows(2).all(|w| w[1] <= w[0]), || {
            format!("trial {i}: sweep energies increase: {:?}", res.sweep_energies)
        })?;
        let (best, _) = common::brute_force(&m);
        let got = common::energy(&m, res.labeling.data());
        if (got - best).abs() <= 1e-9 * best.abs().max(1.0) {
            exact += 1;
        }
        let excess = if best > 0.0 { got / best - 1.0 } else { got - best };
        if excess > 0.01 {
            over += 1;
        }
        worst = worst.max(excess);
    }
    let rate = exact as f64 / TRIALS as f64;
    check(rate >= 0.95, || format!("optimum reached in {:.1}% < 95%", rate * 100.0))?;
    check(worst <= 0.01, || {
        format!(
            "{over} of {TRIALS} trials end in an expansion local minimum more than 1% above the optimum \
             (worst {:.3}%; optimal in {:.1}%)",
            worst * 100.0,
            rate * 100.0
        )
    })?;
    Ok(format!("optimal in {:.1}%, worst excess {:.4}%, sweeps monotone", rate * 100.0, worst * 100.0))
}

/// MAP-MRF with zero pairwise weight reproduces MLC on every map.
fn map_mrf_reduction() -> Outcome {
    let mut mismatches = 0usize;
    let mut pixels = 0usize;
    for seed in 0..50u64 {
        let sep = 0.5 + (seed % 5) as f64 * 0.5;
        let fx = planted_fixture(&PlantedConfig {
            seed,
            width: 24,
            height: 24,
            maps: 4,
            separation: sep,
            block: 4,
            ..PlantedConfig::default()
        });
        let table = fit_table(
            &[FitImage { activations: fx.activations.clone(), labels: fx.labels.clone() }],
            &ProbeConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let mlc = mlc_classify(&fx.activations, &table).map_err(|e| e.to_string())?;
        let mrf = map_mrf_classify(&fx.activations, &table, &MapMrfParams::with_weight(0.0))
            .map_err(|e| e.to_string())?;
        for (a, b) in mlc.iter().zip(&mrf) {
            match (a, b) {
                (Some(a), Some(b)) => {
                    pixels += a.labels.len();
                    mismatches += a.labels.iter().zip(&b.labels).filter(|(x, y)| x != y).count();
                }
                (None, None) => {}
                _ => return Err(format!("seed {seed}: map validity differs")),
            }
        }
    }
    check(mismatches == 0, || format!("{mismatches} mismatching pixels"))?;
    Ok(format!("50 fixtures, {pixels} map-pixels, 0 mismatches"))
}

fn random_polyline(r: &mut impl Rng, n: usize) -> Vec<Point> {
    let mut p = Point::new(r.gen_range(-50.0..50.0), r.gen_range(-50.0..50.0));
    (0..n)
        .map(|_| {
            p = Point::new(p.x + r.gen_range(-5.0..5.0), p.y + r.gen_range(-5.0..5.0));
            p
        })
        .collect()
}

/// Subset and deviation properties on random chains, exact oracle match on short ones.
fn douglas_peucker_properties() -> Outcome {
    let mut r = rng(4);
    let mut oracle_checked = 0;
    for i in 0..1000 {
        let n = if i % 3 == 0 { r.gen_range(2..=12) } else { r.gen_range(2..=200) };
        let pts = random_polyline(&mut r, n);
        let tol = r.gen_range(0.05..8.0);
        let kept = simplify_chain_indices(&pts, tol);
        check(kept.first() == Some(&0) && kept.last() == Some(&(n - 1)), || {
            format!("case {i}: endpoints not kept")
        })?;
        check(kept.windows(2).all(|w| w[0] < w[1]), || format!("case {i}: not an ordered subset"))?;
        let dev = common::max_deviation(&pts, &kept);
        check(dev <= tol, || format!("case {i}: deviation {dev} > tol {tol}"))?;
        if n <= 12 {
            oracle_checked += 1;
            let expect = common::dp_recursive(&pts, tol);
            check(kept == expect, || format!("case {i}: {kept:?} vs oracle {expect:?}"))?;
        }
    }
    Ok(format!("1000 chains hold, {oracle_checked} short chains match the oracle"))
}

/// Rectangle masks survive the full vectorization path.
fn vectorization_round_trip() -> Outcome {
    let mut r = rng(5);
    let (w, h) = (64, 64);
    let mut worst = 1.0f64;
    for i in 0..100 {
        let (rw, rh) = (r.gen_range(10..=40), r.gen_range(10..=40));
        let rect: Rect = (r.gen_range(2..=w - rw - 2), r.gen_range(2..=h - rh - 2), rw, rh);
        let mask = rect_mask(w, h, &[rect]);
        let raw = footprints_to_mask(&vectorize(&mask, None), w, h);
        let exact = iou_per_pixel(&raw, &mask).map_err(|e| e.to_string())?;
        check(exact == 1.0, || format!("case {i} {rect:?}: unsimplified IoU {exact}"))?;

        let p = ProbabilityMap::from_mask(&mask);
        let refined = refine_binary(&threshold(&p, DEFAULT_TAU), &RefineParams::default())
            .map_err(|e| e.to_string())?;
        let out = footprints_to_mask(&vectorize(&refined, Some(0.5)), w, h);
        let iou = iou_per_pixel(&out, &mask).map_err(|e| e.to_string())?;
        worst = worst.min(iou);
        check(iou >= 0.98, || format!("case {i} {rect:?}: IoU {iou} < 0.98"))?;
    }
    Ok(format!("100 rectangles, worst IoU {worst:.6}, unsimplified IoU 1.0"))
}

/// Sample moments recover known Gaussians; small sets match the closed form.
fn gaussian_recovery() -> Outcome {
    let names = vec!["a".to_string()];
    let params = FitParams::default();
    let (mut worst_mu, mut worst_sigma) = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let mut r = rng(100 + seed);
        let mu = r.gen_range(-20.0..60.0);
        let sigma = r.gen_range(0.5..10.0);
        let normal = Normal::new(mu, sigma).unwrap();
        let mut s = SampleSet::new(1, 1);
        for _ in 0..100_000 {
            s.push(0, 0, normal.sample(&mut r) as f32);
        }
        let cell = *fit_gaussians(&s, names.clone(), &params).map_err(|e| e.to_string())?.cell(0, 0);
        let (emu, esig) = ((cell.mu - mu).abs() / sigma, (cell.sigma - sigma).abs() / sigma);
        worst_mu = worst_mu.max(emu);
        worst_sigma = worst_sigma.max(esig);
        check(emu <= 0.01, || format!("seed {seed}: mean off by {emu:.4} sigma"))?;
        check(esig <= 0.02, || format!("seed {seed}: sigma off by {:.3}%", esig * 100.0))?;

        let n = 10 + (seed as usize % 7);
        let small: Vec<f32> = (0..n).map(|_| r.gen_range(-100.0f32..100.0)).collect();
        let mut s = SampleSet::new(1, 1);
        small.iter().for_each(|&v| s.push(0, 0, v));
        let cell = *fit_gaussians(&s, names.clone(), &params).map_err(|e| e.to_string())?.cell(0, 0);
        let m = small.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
        let sd = (small.iter().map(|&v| (v as f64 - m).powi(2)).sum::<f64>() / n as f64).sqrt();
        check((cell.mu - m).abs() <= 1e-9 && (cell.sigma - sd).abs() <= 1e-9, || {
            format!("seed {seed}: small fit ({}, {}) vs closed form ({m}, {sd})", cell.mu, cell.sigma)
        })?;
    }
    Ok(format!(
        "20 seeds, worst mean error {worst_mu:.4} sigma, worst sigma error {:.3}%",
        worst_sigma * 100.0
    ))
}

/// Fit on one planted image, sub-classify a held-out one of the same classes.
fn probe_end_to_end() -> Outcome {
    let start = Instant::now();
    let base = PlantedConfig { separation: 10.0, maps: 16, num_labels: 6, ..PlantedConfig::default() };
    let fit = planted_fixture(&PlantedConfig { scene_seed: 1, ..base });
    let held = planted_fixture(&PlantedConfig { scene_seed: 2, ..base });
    let (_, outcomes) = probe_pipeline(
        &[FitImage { activations: fit.activations, labels: fit.labels }],
        &[EvalImage {
            activations: held.activations,
            se_weights: held.se_weights,
            buildings: held.buildings,
            labels: Some(held.labels.clone()),
        }],
        &ProbeConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let report = evaluate_f1(&outcomes[0].overlay, &held.labels).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    check(report.pixel_accuracy >= 0.99, || format!("accuracy {:.4} < 0.99", report.pixel_accuracy))?;
    let min_f1 = report.f1.iter().copied().fold(f64::INFINITY, f64::min);
    check(min_f1 > 1.0 / 6.0, || format!("class F1 {:?} not all above 1/6", report.f1))?;
    check(elapsed < 30.0, || format!("runtime {elapsed:.1}s >= 30s"))?;
    Ok(format!("accuracy {:.4}, min F1 {min_f1:.4}, {elapsed:.2}s", report.pixel_accuracy))
}

/// Ladder of building maps: level `d` drops the `d` smallest reference
/// buildings and adds `d` spurious 12x12 blocks.
fn ladder_level(gt_rects: &[Rect], spurious: &[Rect], d: usize, w: usize, h: usize) -> ProbabilityMap {
    let mut by_area: Vec<&Rect> = gt_rects.iter().collect();
    by_area.sort_by_key(|r| (r.2 * r.3, r.0, r.1));
    let kept: Vec<Rect> = by_area[d..].iter().map(|r| **r).collect();
    let mut rects = kept;
    rects.extend_from_slice(&spurious[..d]);
    let mask = rect_mask(w, h, &rects);
    let values = mask.bits().iter().map(|&b| if b { 0.9 } else { 0.1 }).collect();
    ProbabilityMap::new(w, h, values).expect("probabilities in range")
}

fn degradation_ladder() -> Outcome {
    let (w, h) = (160, 160);
    let all = rectangle_city(8, w, h, 18, (10, 24), 4);
    if all.len() < 18 {
        return Err(format!("fixture placed only {} rectangles", all.len()));
    }
    let (gt_rects, spurious) = all.split_at(12);
    let spurious: Vec<Rect> = spurious.iter().map(|&(x, y, _, _)| (x, y, 12, 12)).collect();
    let gt = rect_mask(w, h, gt_rects);
    let mut rows = Vec::new();
    for d in 0..6 {
        let p = ladder_level(gt_rects, &spurious, d, w, h);
        let rep = reconstruction_analysis(&p, &gt, &ReconParams::default()).map_err(|e| e.to_string())?;
        for m in [&rep.classification, &rep.reconstruction] {
            check(m.per_building_iou <= m.per_pixel_iou, || {
                format!("level {d}: per-building {} > per-pixel {}", m.per_building_iou, m.per_pixel_iou)
            })?;
        }
        rows.push((rep.classification, rep.reconstruction));
    }
    for d in 1..rows.len() {
        for (prev, cur) in [(&rows[d - 1].0, &rows[d].0), (&rows[d - 1].1, &rows[d].1)] {
            check(
                cur.per_pixel_iou <= prev.per_pixel_iou && cur.per_building_iou <= prev.per_building_iou,
                || format!("level {d}: scores increase with degradation"),
            )?;
        }
    }
    let summary: Vec<String> = rows
        .iter()
        .map(|(_, z)| format!("{:.3}/{:.3}", z.per_pixel_iou, z.per_building_iou))
        .collect();
    Ok(format!("6 levels, pixel/building IoU {}", summary.join(" ")))
}

/// Constant 0.5 probability: every pixel is building up to tau = 0.5, none after.
fn threshold_sweep_step() -> Outcome {
    let (w, h) = (48, 40);
    let gt = rect_mask(w, h, &rectangle_city(9, w, h, 4, (6, 14), 2));
    let p = ProbabilityMap::new(w, h, vec![0.5; w * h]).map_err(|e| e.to_string())?;
    let grid = default_tau_grid();
    let sweep = threshold_sweep(&p, &gt, &grid).map_err(|e| e.to_string())?;
    check(sweep.len() == 19, || format!("{} grid points", sweep.len()))?;
    let full = gt.count_ones() as f64 / (w * h) as f64;
    for pt in &sweep {
        let expect = if pt.tau <= 0.5 { full } else { 0.0 };
        check(pt.iou == expect, || format!("tau {}: IoU {} vs {expect}", pt.tau, pt.iou))?;
    }
    Ok(format!("19 points match the step ({full:.6} up to 0.5, 0 above)"))
}

fn read_outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).into_iter().flatten().flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        if name != "ablate_timing.csv" {
            files.insert(name, std::fs::read(entry.path()).unwrap_or_default());
        }
    }
    files
}

/// Every subcommand, run twice on the same inputs, writes identical files.
fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let (w, h) = (64, 64);
    let mut recon_tiles = Vec::new();
    for seed in 0..2u64 {
        let gt = rect_mask(w, h, &rectangle_city(seed, w, h, 5, (9, 18), 4));
        let noisy = latentprobe::synth::salt_noise(&ProbabilityMap::from_mask(&gt), 0.02, seed);
        recon_tiles.push(write_recon_tile(root, &format!("city{seed}"), &noisy, &gt).map_err(|e| e.to_string())?);
    }
    write_manifest(&root.join("recon.json"), &recon_tiles).map_err(|e| e.to_string())?;
    let base = PlantedConfig { width: 32, height: 32, maps: 6, separation: 2.0, ..PlantedConfig::default() };
    let fit = planted_fixture(&PlantedConfig { scene_seed: 1, ..base }).write(root, "fit").map_err(|e| e.to_string())?;
    let eval = planted_fixture(&PlantedConfig { scene_seed: 2, ..base }).write(root, "eval").map_err(|e| e.to_string())?;
    write_manifest(&root.join("fit.json"), &[fit]).map_err(|e| e.to_string())?;
    write_manifest(&root.join("eval.json"), &[eval]).map_err(|e| e.to_string())?;

    let s = |p: &str| root.join(p).to_string_lossy().into_owned();
    let probe_inputs = ["--fit-manifest".to_string(), s("fit.json"), "--eval-manifest".into(), s("eval.json")];
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("recon", vec!["--manifest".into(), s("recon.json")]),
        ("sweep", vec!["--manifest".into(), s("recon.json")]),
        ("probe", probe_inputs.to_vec()),
        ("probe", [&probe_inputs[..], &["--classifier".into(), "map-mrf".into(), "--refine".into(), "multilabel".into()]].concat()),
        ("ablate", probe_inputs.to_vec()),
    ];
    let mut compared = 0;
    for (i, (cmd, args)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = root.join(format!("out_{i}_{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_latentprobe"))
                .arg(cmd)
                .args(args)
                .arg("--out")
                .arg(&out)
                .env("LATENTPROBE_WORKERS", if rep == 0 { "1" } else { "4" })
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), || {
                format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr))
            })?;
            outputs.push(read_outputs(&out));
        }
        check(!outputs[0].is_empty(), || format!("{cmd} wrote no files"))?;
        check(outputs[0] == outputs[1], || format!("{cmd}: outputs differ between runs"))?;
        compared += outputs[0].len();
    }
    Ok(format!("recon, sweep, probe (mlc, map-mrf+refine), ablate: {compared} files identical across reruns"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("graph-cut exactness", graphcut_exactness),
        ("alpha-expansion quality", expansion_quality),
        ("MAP-MRF reduction to MLC", map_mrf_reduction),
        ("Douglas-Peucker properties", douglas_peucker_properties),
        ("vectorization round-trip", vectorization_round_trip),
        ("Gaussian recovery", gaussian_recovery),
        ("probe end-to-end", probe_end_to_end),
        ("degradation ladder", degradation_ladder),
        ("threshold sweep step", threshold_sweep_step),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
