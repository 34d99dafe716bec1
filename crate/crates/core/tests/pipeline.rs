use fae_core::data::{
    load_series_csv, load_ucr_file, synth_generate, with_split, write_series_csv, write_ucr_file,
    CsvSchema, GapPolicy, SeriesRecord, Split, SplitSpec, SynthSpec,
};
use fae_core::detector::score_online;
use fae_core::export::{detection_csv, parse_detection_csv};
use fae_core::latent::{encode_series, pca_project};
use fae_core::model::{load_model, save_model, FaeHyperparams, FaeModel};
use fae_core::tensor::Tensor2;
use fae_core::trainer::{batch_gradient, train, TrainConfig};

fn seasonal(id: &str, seed: u64, len: usize) -> SeriesRecord {
    let spec = SynthSpec {
        id: id.into(),
        period: 16,
        noise_std: 0.05,
        ..SynthSpec::default()
    };
    let s = synth_generate(&spec, len, seed).unwrap();
    with_split(&s, SplitSpec::Fractions { train: 0.6, val: 0.2 }).unwrap()
}

fn small_model(data: &[SeriesRecord]) -> FaeModel {
    let cfg = TrainConfig {
        learning_rate: 2e-3,
        batch_size: 16,
        max_epochs: 4,
        seed: 3,
        ..TrainConfig::default()
    };
    let model = FaeModel::build(FaeHyperparams::new(16, 3, 4, 2), 3).unwrap();
    train(model, data, &cfg).unwrap().model
}

#[test]
fn series_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut stamped = seasonal("stamped", 1, 50);
    stamped.timestamps = Some((0..50).map(|t| 1_600_000_000 + 300 * t).collect());
    stamped.split = None;
    let mut plain = seasonal("plain", 2, 30);
    plain.split = None;
    let path = dir.path().join("s.csv");
    write_series_csv(&path, &[stamped.clone(), plain.clone()]).unwrap();
    let schema = CsvSchema::default();
    let back = load_series_csv(&path, &schema, GapPolicy::Reject).unwrap();
    assert_eq!(back, vec![plain, stamped]);
}

#[test]
fn ucr_round_trip_keeps_span_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = seasonal("demo", 4, 200);
    s.split = Some(Split {
        train_end: 120,
        val_end: 120,
    });
    s.anomaly_span = Some((150, 160));
    s.labels = Some((0..200).map(|t| u8::from((150..=160).contains(&t))).collect());
    let path = write_ucr_file(dir.path(), &s).unwrap();
    let back = load_ucr_file(&path).unwrap();
    assert_eq!(back.values, s.values);
    assert_eq!(back.split.unwrap().train_end, 120);
    assert_eq!(back.anomaly_span, Some((150, 160)));
    assert_eq!(back.labels, s.labels);
}

#[test]
fn saved_model_scores_identically() {
    let data = vec![seasonal("a", 1, 160), seasonal("b", 2, 160)];
    let model = small_model(&data);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.fae");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded.flat_weights(), model.flat_weights());
    for s in &data {
        let a = score_online(&model, s, 3.0).unwrap();
        let b = score_online(&loaded, s, 3.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), s.len() - 16 + 1);
        let parsed = parse_detection_csv(&detection_csv(&a)).unwrap();
        assert!(parsed.iter().zip(&a.rows).all(|((_, p), r)| p == r));
    }
}

#[test]
fn training_is_reproducible() {
    let data = vec![seasonal("a", 1, 120)];
    let a = small_model(&data);
    let b = small_model(&data);
    assert_eq!(a.flat_weights(), b.flat_weights());
}

#[test]
fn batch_gradient_is_the_ordered_mean() {
    let model = FaeModel::build(FaeHyperparams::new(8, 2, 3, 2), 5).unwrap();
    let s = seasonal("a", 7, 40);
    let xs: Vec<Tensor2> = (0..6)
        .map(|i| Tensor2::row(&s.values[i * 4..i * 4 + 8]).unwrap())
        .collect();
    let refs: Vec<&Tensor2> = xs.iter().collect();
    let eps: Vec<Vec<f64>> = (0..6).map(|i| vec![0.1 * i as f64, -0.2]).collect();
    let (loss, grads) = batch_gradient(&model, &refs, &eps).unwrap();
    let mut total = 0.0;
    let mut sum = vec![0.0; model.param_count()];
    for (x, e) in xs.iter().zip(&eps) {
        let ev = model.forward_backward(x, e).unwrap();
        total += ev.terms.loss;
        for (a, g) in sum.iter_mut().zip(ev.grads.flatten()) {
            *a += g;
        }
    }
    // summed in batch order, so the parallel build must agree bit for bit
    assert_eq!(loss, total * (1.0 / 6.0));
    let expected: Vec<f64> = sum.iter().map(|g| g * (1.0 / 6.0)).collect();
    assert_eq!(grads.flatten(), expected);
}

#[test]
fn latent_projection_of_a_trained_model() {
    let data = vec![seasonal("a", 1, 160), seasonal("b", 2, 160)];
    let model = small_model(&data);
    let matrix = encode_series(&model, &data, 2).unwrap();
    // ends 15, 17, ..., 159 per series
    assert_eq!(matrix.len(), 2 * 73);
    let (pca, proj) = pca_project(&matrix, 3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let d: f64 = pca.components[i].iter().zip(&pca.components[j]).map(|(a, b)| a * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((d - expected).abs() < 1e-8);
        }
        let n = proj.len() as f64;
        let mean = proj.iter().map(|p| p[i]).sum::<f64>() / n;
        let var = proj.iter().map(|p| (p[i] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - pca.explained_variance[i]).abs() < 1e-8);
    }
    assert!(pca.explained_variance.windows(2).all(|w| w[0] >= w[1]));
    assert!(pca.explained_variance.iter().sum::<f64>() <= pca.total_variance + 1e-8);
    let (full, _) = pca_project(&matrix, model.latent_dim()).unwrap();
    assert!((full.explained_variance.iter().sum::<f64>() - full.total_variance).abs() < 1e-8);
}
