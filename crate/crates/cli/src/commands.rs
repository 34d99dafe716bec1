use std::fs;
use std::path::{Path, PathBuf};

use fae_core::data::{
    load_series_csv, load_ucr_file, synth_generate, with_split, write_series_csv, SeriesRecord,
    SplitSpec,
};
use fae_core::detector::{
    calibrate_alpha, evaluate_pointwise, score_online, zero_shot_run, EvalReport,
};
use fae_core::export::{self, write_atomic};
use fae_core::latent::{annotate_projections, encode_series, pca_project};
use fae_core::model::{load_model, param_count_for, save_model, FaeModel};
use fae_core::trainer::{hyperparameter_search, train as fit};
use fae_core::{FaeError, Result};

use crate::config::RunConfig;

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn emit(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Loads every `data` file and attaches split boundaries.
fn load_data(cfg: &RunConfig) -> Result<Vec<SeriesRecord>> {
    let paths = cfg.list("data");
    if paths.is_empty() {
        return Err(FaeError::Config("key 'data' is required".into()));
    }
    let format: String = cfg.require("format", "csv or ucr")?;
    let mut series = Vec::new();
    for p in &paths {
        let path = Path::new(p);
        if !path.exists() {
            return Err(FaeError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("input file not found: {p}"),
            )));
        }
        match format.as_str() {
            "csv" => {
                let spec = SplitSpec::Fractions {
                    train: cfg.require("split.train", "a fraction")?,
                    val: cfg.require("split.val", "a fraction")?,
                };
                for s in load_series_csv(path, &cfg.schema(), cfg.gaps()?)? {
                    series.push(with_split(&s, spec)?);
                }
            }
            "ucr" => series.push(with_split(&load_ucr_file(path)?, SplitSpec::UcrCarve)?),
            other => {
                return Err(FaeError::Config(format!(
                    "key 'format' expects csv or ucr, got '{other}'"
                )))
            }
        }
    }
    let mut ids: Vec<&str> = series.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(FaeError::Data(format!("series id '{}' appears twice", w[0])));
    }
    Ok(series)
}

fn load_configured_model(cfg: &RunConfig) -> Result<FaeModel> {
    let path: String = cfg.require("model", "a path")?;
    load_model(Path::new(&path))
}

pub fn synth(cfg: &RunConfig) -> Result<()> {
    let length = cfg.require("synth.length", "a positive integer")?;
    let seed: u64 = cfg.require("synth.seed", "an unsigned integer")?;
    let series = cfg
        .synth_specs()?
        .iter()
        .enumerate()
        .map(|(i, spec)| synth_generate(spec, length, seed + i as u64))
        .collect::<Result<Vec<_>>>()?;
    let path = out_dir(cfg)?.join("series.csv");
    write_series_csv(&path, &series)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let data = load_data(cfg)?;
    let train_cfg = cfg.train_config()?;
    let model = FaeModel::build(cfg.hyperparams()?, train_cfg.seed)?;
    let outcome = fit(model, &data, &train_cfg)?;
    let dir = out_dir(cfg)?;
    let model_path = dir.join("model.fae");
    save_model(&outcome.model, &model_path)?;
    println!("wrote {}", model_path.display());
    emit(&dir.join("history.csv"), &export::history_csv(&outcome.history))?;
    println!(
        "epochs={} best_epoch={} stopped_early={}",
        outcome.history.epochs(),
        outcome.best_epoch,
        outcome.stopped_early
    );
    Ok(())
}

pub fn search(cfg: &RunConfig) -> Result<()> {
    let data = load_data(cfg)?;
    let outcome = hyperparameter_search(&cfg.search_space()?, &data, &cfg.train_config()?)?;
    emit(&out_dir(cfg)?.join("leaderboard.csv"), &export::leaderboard_csv(&outcome.leaderboard))?;
    let b = &outcome.best.hyper;
    println!(
        "best T={} J={} gamma={} m={} U={} val_loss={}",
        b.window, b.latent, b.learning_rate, b.batch_size, b.filters, outcome.best.val_loss
    );
    Ok(())
}

/// Alpha per series: calibrated on validation when requested, else `alpha`.
fn alphas(cfg: &RunConfig, model: &FaeModel, data: &[SeriesRecord]) -> Result<Vec<f64>> {
    if cfg.require::<bool>("calibrate", "true or false")? {
        let choices = calibrate_alpha(model, data, &cfg.alpha_grid()?)?;
        Ok(choices.iter().map(|c| c.alpha as f64).collect())
    } else {
        let alpha: u32 = cfg.require("alpha", "a positive integer")?;
        Ok(vec![alpha as f64; data.len()])
    }
}

pub fn detect(cfg: &RunConfig) -> Result<()> {
    let model = load_configured_model(cfg)?;
    let data = load_data(cfg)?;
    let alphas = alphas(cfg, &model, &data)?;
    let dir = out_dir(cfg)?;
    for (s, alpha) in data.iter().zip(alphas) {
        let result = score_online(&model, s, alpha)?;
        let path = dir.join(format!("scores_{}.csv", s.id));
        emit(&path, &export::detection_csv(&result))?;
    }
    Ok(())
}

pub fn eval(cfg: &RunConfig) -> Result<()> {
    let model = load_configured_model(cfg)?;
    let data = load_data(cfg)?;
    let alphas = alphas(cfg, &model, &data)?;
    let mut rows = Vec::new();
    for (s, alpha) in data.iter().zip(alphas) {
        if s.labels.is_none() {
            return Err(FaeError::Data(format!("series '{}' has no labels", s.id)));
        }
        let result = score_online(&model, s, alpha)?;
        let test = result.rows_in(s.effective_split().val_end, s.len());
        let flags: Vec<u8> = test.iter().map(|r| r.flag).collect();
        let labels: Vec<u8> = test.iter().map(|r| s.label(r.t)).collect();
        rows.push((s.id.clone(), Some(alpha), evaluate_pointwise(&flags, &labels)?));
    }
    let pooled = EvalReport::pooled(rows.iter().map(|(_, _, r)| r));
    rows.push(("*".to_string(), None, pooled));
    emit(&out_dir(cfg)?.join("metrics.csv"), &export::metrics_csv(&rows))?;
    println!(
        "precision={} recall={} f1={}",
        pooled.precision, pooled.recall, pooled.f1
    );
    Ok(())
}

pub fn latent(cfg: &RunConfig) -> Result<()> {
    let model = load_configured_model(cfg)?;
    let data = load_data(cfg)?;
    let matrix = encode_series(&model, &data, cfg.require("latent.stride", "a positive integer")?)?;
    let (pca, projections) = pca_project(&matrix, cfg.require("k", "a positive integer")?)?;
    let rows = annotate_projections(&projections, &matrix.meta, cfg.clock()?)?;
    emit(&out_dir(cfg)?.join("projections.csv"), &export::projection_csv(&rows))?;
    let explained: f64 = pca.explained_variance.iter().sum();
    println!(
        "windows={} explained_variance_ratio={}",
        matrix.len(),
        if pca.total_variance > 0.0 { explained / pca.total_variance } else { 0.0 }
    );
    Ok(())
}

pub fn zeroshot(cfg: &RunConfig) -> Result<()> {
    let data = load_data(cfg)?;
    let report = zero_shot_run(&data, &cfg.list("leave_out"), &cfg.hyperparams()?, &cfg.train_config()?)?;
    emit(&out_dir(cfg)?.join("zeroshot.csv"), &export::zero_shot_csv(&report.rows))
}

pub fn info(cfg: &RunConfig) -> Result<()> {
    match cfg.raw("model") {
        Some(path) => {
            let model = load_model(Path::new(path))?;
            let h = model.hyper();
            println!(
                "T={} J={} U={} F={} beta={} series={}",
                h.window,
                h.latent,
                h.filters,
                h.filter_len,
                h.beta,
                model.normalizer.len()
            );
            println!("N={} params={}", model.depth(), model.param_count());
        }
        None => {
            let h = cfg.hyperparams()?;
            println!("N={} params={}", h.depth()?, param_count_for(&h)?);
        }
    }
    Ok(())
}
