use latentprobe::probe::{
    aggregate, evaluate_f1, fit_table, map_mrf_classify, mlc_classify, overlay_buildings,
    probe_image, probe_pipeline, ClassPdfTable, Classifier, EvalImage, FitImage, MapMrfParams,
    ProbeConfig,
};
use latentprobe::raster::{ActivationStack, BinaryMask, LabelMap, SeWeightVector};
use latentprobe::recon::RefineParams;
use latentprobe::synth::{planted_fixture, PlantedConfig, PlantedFixture};
use latentprobe::Error;

fn small(seed: u64, separation: f64) -> PlantedFixture {
    planted_fixture(&PlantedConfig {
        seed,
        width: 32,
        height: 32,
        maps: 5,
        separation,
        block: 4,
        ..PlantedConfig::default()
    })
}

fn fit(fx: &PlantedFixture) -> ClassPdfTable {
    fit_table(
        &[FitImage { activations: fx.activations.clone(), labels: fx.labels.clone() }],
        &ProbeConfig::default(),
    )
    .unwrap()
}

fn eval_image(fx: &PlantedFixture) -> EvalImage {
    EvalImage {
        activations: fx.activations.clone(),
        se_weights: fx.se_weights.clone(),
        buildings: fx.buildings.clone(),
        labels: Some(fx.labels.clone()),
    }
}

#[test]
fn zero_weight_map_mrf_equals_mlc_after_aggregation() {
    let fx = small(3, 1.0);
    let table = fit(&fx);
    let mlc = ProbeConfig::default();
    let mrf = ProbeConfig {
        classifier: Classifier::MapMrf(MapMrfParams::with_weight(0.0)),
        ..ProbeConfig::default()
    };
    let a = probe_image(&table, &eval_image(&fx), &mlc).unwrap();
    let b = probe_image(&table, &eval_image(&fx), &mrf).unwrap();
    assert_eq!(a.sub_classification, b.sub_classification);
    assert_eq!(a.overlay, b.overlay);
}

#[test]
fn positive_weight_smooths_noisy_maps() {
    let fx = small(4, 1.0);
    let table = fit(&fx);
    let mlc = mlc_classify(&fx.activations, &table).unwrap();
    let mrf = map_mrf_classify(&fx.activations, &table, &MapMrfParams::with_weight(0.1)).unwrap();
    let changes = |img: &Option<latentprobe::probe::ClassificationImage>| {
        let img = img.as_ref().unwrap();
        let mut n = 0;
        for y in 0..img.height {
            for x in 1..img.width {
                n += usize::from(img.labels[y * img.width + x] != img.labels[y * img.width + x - 1]);
            }
        }
        n
    };
    for (a, b) in mlc.iter().zip(&mrf) {
        assert!(changes(b) <= changes(a));
    }
}

#[test]
fn single_map_aggregation_reproduces_that_map() {
    let fx = small(5, 3.0);
    let table = fit(&fx);
    let images = mlc_classify(&fx.activations, &table).unwrap();
    let mut se = vec![0.0; 5];
    se[2] = 1.0;
    let agg = aggregate(&images, &SeWeightVector::new(se).unwrap(), 6).unwrap();
    assert_eq!(agg.labels(), &images[2].as_ref().unwrap().labels[..]);
}

#[test]
fn doubling_activations_keeps_labels() {
    let fx = small(6, 1.5);
    let doubled = ActivationStack::new(
        fx.activations.maps(),
        fx.activations.width(),
        fx.activations.height(),
        fx.activations.values().iter().map(|v| v * 2.0).collect(),
    )
    .unwrap();
    let a = mlc_classify(&fx.activations, &fit(&fx)).unwrap();
    let twin = PlantedFixture { activations: doubled.clone(), ..fx.clone() };
    let b = mlc_classify(&doubled, &fit(&twin)).unwrap();
    for (a, b) in a.iter().zip(&b) {
        assert_eq!(a.as_ref().unwrap().labels, b.as_ref().unwrap().labels);
    }
}

#[test]
fn overlay_marks_predicted_buildings() {
    let sub = LabelMap::new(2, 2, vec![1, 2, 3, 4], 6).unwrap();
    let mask = BinaryMask::new(2, 2, vec![true, false, false, true]).unwrap();
    assert_eq!(overlay_buildings(&sub, &mask, 0).unwrap().labels(), &[0, 2, 3, 0]);
}

#[test]
fn f1_report_by_hand() {
    let gt = LabelMap::new(4, 1, vec![0, 0, 1, 1], 2).unwrap();
    let pred = LabelMap::new(4, 1, vec![0, 1, 1, 1], 2).unwrap();
    let r = evaluate_f1(&pred, &gt).unwrap();
    assert_eq!(r.confusion, vec![vec![1, 1], vec![0, 2]]);
    assert!((r.f1[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.f1[1] - 0.8).abs() < 1e-12);
    let names = vec!["a".to_string(), "b".to_string()];
    assert_eq!(
        r.to_csv(&names).unwrap(),
        "class,precision,recall,f1\na,1.000000,0.500000,0.666667\nb,0.666667,1.000000,0.800000\n"
    );
    assert_eq!(r.confusion_csv(&names).unwrap(), "truth\\pred,a,b\na,1,1\nb,0,2\n");
}

#[test]
fn table_with_no_valid_cell_is_an_error() {
    // 3x3 image: every label has fewer than ten samples.
    let acts = ActivationStack::new(1, 3, 3, vec![1.0; 9]).unwrap();
    let labels = LabelMap::new(3, 3, vec![0; 9], 6).unwrap();
    let err = fit_table(&[FitImage { activations: acts, labels }], &ProbeConfig::default());
    assert!(matches!(err, Err(Error::InvalidTable(_))));
}

#[test]
fn table_json_round_trip() {
    let table = fit(&small(7, 2.0));
    let back = ClassPdfTable::from_json(&table.to_json()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn held_out_planted_image_is_recovered_with_refinement() {
    let base = PlantedConfig { width: 48, height: 48, maps: 8, separation: 4.0, ..PlantedConfig::default() };
    let fit_fx = planted_fixture(&PlantedConfig { scene_seed: 10, ..base });
    let held = planted_fixture(&PlantedConfig { scene_seed: 11, ..base });
    let config = ProbeConfig { refine: Some(RefineParams::default()), ..ProbeConfig::default() };
    let (_, out) = probe_pipeline(
        &[FitImage { activations: fit_fx.activations, labels: fit_fx.labels }],
        &[eval_image(&held)],
        &config,
    )
    .unwrap();
    let report = out[0].report.as_ref().unwrap();
    assert!(report.pixel_accuracy > 0.98, "{}", report.pixel_accuracy);
    assert!(report.f1.iter().all(|&f| f > 1.0 / 6.0));
}
