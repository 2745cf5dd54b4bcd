//! Batch front-end: `recon`, `sweep`, `probe` and `ablate` over tile manifests.
//!
//! Input errors (unreadable files, malformed manifests, bad tiles) exit with
//! code 2 and a message naming the tile or path; usage errors are reported by
//! clap with the same code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::probe::{
    fit_table, probe_image, Classifier, EvalImage, FitImage, MapMrfParams, ProbeConfig,
    DEFAULT_W_GRID,
};
use crate::raster::{
    load_label_png, load_manifest, load_mask_png, load_npy_f32, save_label_png, BinaryMask,
    ColorPalette, ProbabilityMap, TileManifest,
};
use crate::recon::{
    default_tau_grid, reconstruction_analysis, threshold, threshold_sweep, ReconParams,
    RefineParams, DEFAULT_DP_TOLERANCE, DEFAULT_OVERLAP, DEFAULT_TAU,
};

/// Environment variable overriding `--workers`.
pub const WORKERS_ENV: &str = "LATENTPROBE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "latentprobe", version, about = "Building-map reconstruction analysis and latent-feature probing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold, refine, vectorize and score building maps per tile.
    Recon(ReconArgs),
    /// Per-pixel IoU over a grid of thresholds per tile.
    Sweep(SweepArgs),
    /// Fit class models and sub-classify the non-building area.
    Probe(ProbeArgs),
    /// Compare MLC against MAP-MRF over a grid of weights.
    Ablate(AblateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (0 = all cores). Overridden by LATENTPROBE_WORKERS.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MrfArgs {
    #[arg(long, default_value_t = 10.0, value_parser = non_negative)]
    pub data_cost: f64,
    #[arg(long, default_value_t = 20.0, value_parser = non_negative)]
    pub smooth_cost: f64,
    /// Charge smoothness only where the observed labels agree.
    #[arg(long)]
    pub literal_smoothness: bool,
}

impl MrfArgs {
    fn params(&self) -> RefineParams {
        RefineParams {
            data_cost: self.data_cost,
            smooth_cost: self.smooth_cost,
            literal_smoothness: self.literal_smoothness,
            ..RefineParams::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReconArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = unit_interval)]
    pub tau: f64,
    #[arg(long = "dp-tol", default_value_t = DEFAULT_DP_TOLERANCE, value_parser = non_negative)]
    pub dp_tolerance: f64,
    #[command(flatten)]
    pub mrf: MrfArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Thresholds as `a,b,c` or `start:step:end`; defaults to 0.05 steps.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<TauGrid>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Mlc,
    MapMrf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefineKind {
    None,
    Multilabel,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeInputs {
    /// Tiles with activations and multi-label references used for fitting.
    #[arg(long)]
    pub fit_manifest: PathBuf,
    /// Tiles to sub-classify: activations, SE weights and building probability.
    #[arg(long)]
    pub eval_manifest: PathBuf,
    /// Threshold turning the building probability into the overlay mask.
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = unit_interval)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = RefineKind::None)]
    pub refine: RefineKind,
    #[command(flatten)]
    pub mrf: MrfArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub inputs: ProbeInputs,
    #[arg(long, value_enum, default_value_t = ClassifierKind::Mlc)]
    pub classifier: ClassifierKind,
    /// MAP-MRF weight; the first value is used.
    #[arg(long, value_delimiter = ',', value_parser = non_negative)]
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub inputs: ProbeInputs,
    /// MAP-MRF weights, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = non_negative)]
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauGrid(pub Vec<f64>);

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be finite and nonnegative"))
    }
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let v = non_negative(s)?;
    if v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must lie in [0, 1]"))
    }
}

/// Parses `a,b,c` or `start:step:end` (inclusive end, half-step slack).
pub fn parse_grid(s: &str) -> std::result::Result<TauGrid, String> {
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, step, end] = parts[..] else {
            return Err(format!("'{s}': expected start:step:end"));
        };
        let (start, step, end) = (unit_interval(start)?, non_negative(step)?, unit_interval(end)?);
        if step == 0.0 || end < start {
            return Err(format!("'{s}': step must be positive and end >= start"));
        }
        let n = ((end - start) / step + 0.5).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        s.split(',').map(unit_interval).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(TauGrid(values))
}

/// Error tagged with the tile it came from.
#[derive(Debug, thiserror::Error)]
#[error("tile {tile}: {source}")]
struct TileError {
    tile: String,
    #[source]
    source: Error,
}

fn tagged<T>(tile: &TileManifest, r: Result<T>) -> std::result::Result<T, TileError> {
    r.map_err(|source| TileError {
        tile: tile.name(),
        source,
    })
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    run(Cli::parse())
}

pub fn run(cli: Cli) -> ExitCode {
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(messages) => {
            for m in messages {
                eprintln!("error: {m}");
            }
            ExitCode::from(2)
        }
    }
}

type Failures = Vec<String>;

fn fail(e: impl std::fmt::Display) -> Failures {
    vec![e.to_string()]
}

fn execute(cli: Cli) -> std::result::Result<(), Failures> {
    let common = match &cli.command {
        Command::Recon(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::Probe(a) => &a.inputs.common,
        Command::Ablate(a) => &a.inputs.common,
    };
    let workers = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|e| fail(format!("{WORKERS_ENV}='{v}': {e}")))?,
        Err(_) => common.workers,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(fail)?;
    let out = common.out.clone();
    fs::create_dir_all(&out).map_err(|e| fail(Error::io(&out, e)))?;
    pool.install(|| match cli.command {
        Command::Recon(a) => cmd_recon(&a, &out),
        Command::Sweep(a) => cmd_sweep(&a, &out),
        Command::Probe(a) => cmd_probe(&a, &out),
        Command::Ablate(a) => cmd_ablate(&a, &out),
    })
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> std::result::Result<(), Failures> {
    fs::write(path, contents).map_err(|e| fail(Error::io(path, e)))
}

fn load_probability(tile: &TileManifest) -> Result<ProbabilityMap> {
    load_npy_f32(tile.require("probability")?)?.into_probability()
}

fn load_reference_mask(tile: &TileManifest) -> Result<BinaryMask> {
    load_mask_png(tile.require("labels")?, &ColorPalette::isprs())
}

/// Runs `f` on every tile in parallel; keeps manifest order and collects all
/// failures.
fn per_tile<T: Send>(
    tiles: &[TileManifest],
    f: impl Fn(&TileManifest) -> Result<T> + Sync,
) -> std::result::Result<Vec<T>, Failures> {
    let results: Vec<_> = tiles.par_iter().map(|t| tagged(t, f(t))).collect();
    let mut values = Vec::with_capacity(results.len());
    let mut failures = Failures::new();
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(e) => failures.push(e.to_string()),
        }
    }
    if failures.is_empty() {
        Ok(values)
    } else {
        Err(failures)
    }
}

fn cmd_recon(a: &ReconArgs, out: &Path) -> std::result::Result<(), Failures> {
    let tiles = load_manifest(&a.manifest).map_err(fail)?;
    let params = ReconParams {
        tau: a.tau,
        dp_tolerance: a.dp_tolerance,
        overlap: DEFAULT_OVERLAP,
        refine: a.mrf.params(),
    };
    let reports = per_tile(&tiles, |t| {
        let p = load_probability(t)?;
        let gt = load_reference_mask(t)?;
        reconstruction_analysis(&p, &gt, &params)
    })?;
    let mut csv = String::from(
        "tile,tau,iou_pixel_cls,iou_pixel_recon,iou_bldg_cls,iou_bldg_recon,tp,fp,fn\n",
    );
    for (t, r) in tiles.iter().zip(&reports) {
        let (c, z) = (&r.classification, &r.reconstruction);
        let _ = writeln!(
            csv,
            "{},{:.4},{:.6},{:.6},{:.6},{:.6},{},{},{}",
            t.name(),
            a.tau,
            c.per_pixel_iou,
            z.per_pixel_iou,
            c.per_building_iou,
            z.per_building_iou,
            z.true_positives,
            z.false_positives,
            z.false_negatives
        );
    }
    write(&out.join("recon.csv"), csv)
}

fn cmd_sweep(a: &SweepArgs, out: &Path) -> std::result::Result<(), Failures> {
    let tiles = load_manifest(&a.manifest).map_err(fail)?;
    let grid = a.grid.clone().map_or_else(default_tau_grid, |g| g.0);
    let sweeps = per_tile(&tiles, |t| {
        threshold_sweep(&load_probability(t)?, &load_reference_mask(t)?, &grid)
    })?;
    let mut csv = String::from("tile,tau,iou\n");
    for (t, points) in tiles.iter().zip(&sweeps) {
        for pt in points {
            let _ = writeln!(csv, "{},{:.4},{:.6}", t.name(), pt.tau, pt.iou);
        }
    }
    write(&out.join("sweep.csv"), csv)
}

struct ProbeData {
    fit: Vec<FitImage>,
    eval: Vec<(String, EvalImage)>,
}

fn load_probe_data(a: &ProbeInputs) -> std::result::Result<ProbeData, Failures> {
    let palette = ColorPalette::isprs();
    let fit_tiles = load_manifest(&a.fit_manifest).map_err(fail)?;
    let fit = per_tile(&fit_tiles, |t| {
        Ok(FitImage {
            activations: load_npy_f32(t.require("activations")?)?.into_activations()?,
            labels: load_label_png(t.require("labels")?, &palette)?,
        })
    })?;
    let eval_tiles = load_manifest(&a.eval_manifest).map_err(fail)?;
    let eval = per_tile(&eval_tiles, |t| {
        let activations = load_npy_f32(t.require("activations")?)?.into_activations()?;
        let se_weights = load_npy_f32(t.require("se_weights")?)?.into_se_weights()?;
        let buildings = threshold(&load_probability(t)?, a.tau);
        let labels = t
            .labels
            .as_ref()
            .map(|p| load_label_png(p, &palette))
            .transpose()?;
        Ok((
            t.name(),
            EvalImage {
                activations,
                se_weights,
                buildings,
                labels,
            },
        ))
    })?;
    Ok(ProbeData { fit, eval })
}

fn probe_config(a: &ProbeInputs, classifier: Classifier) -> ProbeConfig {
    ProbeConfig {
        classifier,
        refine: match a.refine {
            RefineKind::None => None,
            RefineKind::Multilabel => Some(a.mrf.params()),
        },
        ..ProbeConfig::default()
    }
}

fn cmd_probe(a: &ProbeArgs, out: &Path) -> std::result::Result<(), Failures> {
    let data = load_probe_data(&a.inputs)?;
    let classifier = match a.classifier {
        ClassifierKind::Mlc => Classifier::Mlc,
        ClassifierKind::MapMrf => Classifier::MapMrf(
            a.w.first()
                .map_or_else(MapMrfParams::default, |&w| MapMrfParams::with_weight(w)),
        ),
    };
    let config = probe_config(&a.inputs, classifier);
    let table = fit_table(&data.fit, &config).map_err(fail)?;
    let path = out.join("pdf_table.json");
    table.save(&path).map_err(fail)?;

    let outcomes: Vec<_> = data
        .eval
        .par_iter()
        .map(|(name, img)| {
            probe_image(&table, img, &config).map_err(|e| format!("tile {name}: {e}"))
        })
        .collect();
    let palette = ColorPalette::isprs();
    let mut failures = Failures::new();
    for ((name, _), outcome) in data.eval.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(o) => o,
            Err(m) => {
                failures.push(m);
                continue;
            }
        };
        let saved = save_label_png(&outcome.sub_classification, &palette, out.join(format!("{name}_sub.png")))
            .and_then(|()| save_label_png(&outcome.overlay, &palette, out.join(format!("{name}_overlay.png"))));
        if let Err(e) = saved {
            failures.push(format!("tile {name}: {e}"));
            continue;
        }
        if let Some(report) = &outcome.report {
            let csvs = report
                .to_csv(&config.label_names)
                .and_then(|f1| Ok((f1, report.confusion_csv(&config.label_names)?)));
            match csvs {
                Ok((f1, confusion)) => {
                    write(&out.join(format!("{name}_f1.csv")), f1)?;
                    write(&out.join(format!("{name}_confusion.csv")), confusion)?;
                }
                Err(e) => failures.push(format!("tile {name}: {e}")),
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures)
    }
}

/// Mean per-class F1 over the scored eval images and the elapsed seconds.
fn ablation_row(
    data: &ProbeData,
    table: &crate::probe::ClassPdfTable,
    config: &ProbeConfig,
) -> std::result::Result<(Vec<f64>, f64), Failures> {
    let start = Instant::now();
    let reports = data
        .eval
        .par_iter()
        .map(|(name, img)| {
            probe_image(table, img, config)
                .map(|o| o.report)
                .map_err(|e| format!("tile {name}: {e}"))
        })
        .collect::<std::result::Result<Vec<_>, String>>()
        .map_err(|m| vec![m])?;
    let elapsed = start.elapsed().as_secs_f64();
    let scored: Vec<_> = reports.into_iter().flatten().collect();
    if scored.is_empty() {
        return Err(fail("no eval tile has a 'labels' reference to score against"));
    }
    let mut mean = vec![0.0; config.label_names.len()];
    for r in &scored {
        for (m, f) in mean.iter_mut().zip(&r.f1) {
            *m += f / scored.len() as f64;
        }
    }
    Ok((mean, elapsed))
}

fn cmd_ablate(a: &AblateArgs, out: &Path) -> std::result::Result<(), Failures> {
    let data = load_probe_data(&a.inputs)?;
    let grid = if a.w.is_empty() {
        DEFAULT_W_GRID.to_vec()
    } else {
        a.w.clone()
    };
    let mut runs = vec![("mlc", None, Classifier::Mlc)];
    runs.extend(
        grid.iter()
            .map(|&w| ("map-mrf", Some(w), Classifier::MapMrf(MapMrfParams::with_weight(w)))),
    );

    let base = probe_config(&a.inputs, Classifier::Mlc);
    let table = fit_table(&data.fit, &base).map_err(fail)?;
    let mut csv = format!("method,w,{}\n", base.label_names.join(","));
    let mut timing = String::from("method,w,seconds\n");
    for (method, w, classifier) in runs {
        let config = ProbeConfig {
            classifier,
            ..base.clone()
        };
        let (f1, seconds) = ablation_row(&data, &table, &config)?;
        let w = w.map(|w| format!("{w}")).unwrap_or_default();
        let cells: Vec<String> = f1.iter().map(|f| format!("{f:.6}")).collect();
        let _ = writeln!(csv, "{method},{w},{}", cells.join(","));
        let _ = writeln!(timing, "{method},{w},{seconds:.6}");
    }
    write(&out.join("ablate.csv"), csv)?;
    write(&out.join("ablate_timing.csv"), timing)
}
