//! Mini-batch ELBO optimization over pooled multi-series windows.

mod adam;
mod search;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{fit_normalizer, windows_ending_in, SeriesRecord};
use crate::error::{FaeError, Result};
use crate::model::{FaeModel, Gradients};
use crate::par;
use crate::tensor::Tensor2;

pub use adam::{adam_step, OptimizerState, BETA1, BETA2, EPSILON};
pub use search::{hyperparameter_search, SearchOutcome, SearchSpace, StepRange, Trial};

/// Optimization settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub beta: f64,
    pub stride_train: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 6e-5,
            batch_size: 32,
            max_epochs: 100,
            patience: 10,
            seed: 0,
            beta: 1.0,
            stride_train: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(FaeError::Config(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size < 1 || self.patience < 1 || self.stride_train < 1 {
            return Err(FaeError::Config(
                "batch size, patience and stride must all be >= 1".into(),
            ));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(FaeError::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Per-epoch mean per-window losses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub train: Vec<f64>,
    pub val: Vec<f64>,
}

impl History {
    pub fn epochs(&self) -> usize {
        self.train.len()
    }

    /// Epoch with the lowest validation loss (first on ties).
    pub fn best_epoch(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.val.iter().enumerate() {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| i)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Weights from the best validation epoch.
    pub model: FaeModel,
    pub history: History,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

/// A normalized window tagged with the index of its source series.
#[derive(Debug, Clone)]
pub(crate) struct TaggedWindow {
    pub series: usize,
    pub x: Tensor2,
}

fn collect_windows(
    model: &FaeModel,
    dataset: &[SeriesRecord],
    stride: usize,
    range: impl Fn(&SeriesRecord) -> (usize, usize),
) -> Result<Vec<Vec<TaggedWindow>>> {
    let window = model.window();
    dataset
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            let stats = model.normalizer.get(&s.id).ok_or_else(|| {
                FaeError::Data(format!("no normalizer statistics for series '{}'", s.id))
            })?;
            let normalized = SeriesRecord::new(s.id.clone(), stats.apply_all(&s.values));
            let (first, end) = range(s);
            windows_ending_in(&normalized, window, stride, first, end)?
                .samples
                .into_iter()
                .map(|w| {
                    Ok(TaggedWindow {
                        series: idx,
                        x: Tensor2::row(&w.window)?,
                    })
                })
                .collect()
        })
        .collect()
}

/// Mean loss over `windows` with `ε = 0`.
pub(crate) fn deterministic_loss(model: &FaeModel, windows: &[TaggedWindow]) -> Result<f64> {
    let zero = vec![0.0; model.latent_dim()];
    let losses = par::map(windows, |w| model.loss(&w.x, &zero).map(|t| t.loss));
    let mut total = 0.0;
    for l in losses {
        total += l?;
    }
    Ok(total / windows.len() as f64)
}

/// Mean loss and mean gradient over one mini-batch. Per-window gradients
/// are evaluated (possibly in parallel) and then summed in batch order.
pub fn batch_gradient(
    model: &FaeModel,
    windows: &[&Tensor2],
    epsilons: &[Vec<f64>],
) -> Result<(f64, Gradients)> {
    if windows.is_empty() || windows.len() != epsilons.len() {
        return Err(FaeError::Shape(format!(
            "batch has {} windows and {} noise draws",
            windows.len(),
            epsilons.len()
        )));
    }
    let pairs: Vec<(&Tensor2, &Vec<f64>)> = windows.iter().copied().zip(epsilons).collect();
    let evals = par::map(&pairs, |(x, e)| model.forward_backward(x, e));
    let mut grads = Gradients::zeros_like(model);
    let mut loss = 0.0;
    for ev in evals {
        let ev = ev?;
        loss += ev.terms.loss;
        grads.add_assign(&ev.grads);
    }
    let scale = 1.0 / windows.len() as f64;
    grads.scale(scale);
    Ok((loss * scale, grads))
}

/// Trains `model` on every series of `dataset` simultaneously.
///
/// Normalizers are fit on each series' training partition and stored in the
/// returned model. Training windows end inside the training partition,
/// validation windows end inside the validation partition (reading earlier
/// samples as context). Without any validation windows the epoch's training
/// loss stands in for the validation loss.
pub fn train(model: FaeModel, dataset: &[SeriesRecord], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(FaeError::Config("training dataset is empty".into()));
    }
    for s in dataset {
        s.validate()?;
    }
    let mut model = model;
    model.set_beta(config.beta);
    model.normalizer = fit_normalizer(dataset)?;

    let window = model.window();
    let train_sets = collect_windows(&model, dataset, config.stride_train, |s| {
        (window - 1, s.effective_split().train_end)
    })?;
    for (s, w) in dataset.iter().zip(&train_sets) {
        if w.is_empty() {
            return Err(FaeError::Config(format!(
                "series '{}' yields no training windows (train partition {} < window {window})",
                s.id,
                s.effective_split().train_end
            )));
        }
    }
    let val_windows: Vec<TaggedWindow> = collect_windows(&model, dataset, 1, |s| {
        let sp = s.effective_split();
        (sp.train_end, sp.val_end)
    })?
    .into_iter()
    .flatten()
    .collect();
    let train_windows: Vec<TaggedWindow> = train_sets.into_iter().flatten().collect();
    if val_windows.is_empty() {
        log::warn!("no validation windows; early stopping uses the training loss");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train_windows.len()).collect();
    let mut optimizer = OptimizerState::new(model.param_count());
    let mut weights = model.flat_weights();
    let mut history = History::default();
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut since_best = 0;
    let mut stopped_early = false;
    let latent = model.latent_dim();

    for epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in order.chunks(config.batch_size).enumerate() {
            let xs: Vec<&Tensor2> = batch.iter().map(|&i| &train_windows[i].x).collect();
            let eps: Vec<Vec<f64>> = batch
                .iter()
                .map(|_| (0..latent).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let (loss, grads) = batch_gradient(&model, &xs, &eps)?;
            if !loss.is_finite() {
                let offending = batch
                    .iter()
                    .map(|&i| dataset[train_windows[i].series].id.as_str())
                    .collect::<Vec<_>>()
                    .join(",");
                return Err(FaeError::Numeric(format!(
                    "non-finite loss at epoch {epoch}, batch {batch_idx} (series: {offending})"
                )));
            }
            epoch_loss += loss * batch.len() as f64;
            adam_step(&mut weights, &grads.flatten(), &mut optimizer, config.learning_rate)?;
            model.set_flat_weights(&weights)?;
        }
        let train_loss = epoch_loss / train_windows.len() as f64;
        let val_loss = if val_windows.is_empty() {
            train_loss
        } else {
            deterministic_loss(&model, &val_windows)?
        };
        if !val_loss.is_finite() {
            return Err(FaeError::Numeric(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        log::debug!("epoch {epoch}: train {train_loss:.6} val {val_loss:.6}");
        history.train.push(train_loss);
        history.val.push(val_loss);

        if best.as_ref().is_none_or(|(b, _, _)| val_loss < *b) {
            best = Some((val_loss, weights.clone(), epoch));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                stopped_early = epoch + 1 < config.max_epochs;
                break;
            }
        }
    }

    let best_epoch = match best {
        Some((_, w, epoch)) => {
            model.set_flat_weights(&w)?;
            epoch
        }
        None => 0,
    };
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthSpec};
    use crate::model::FaeHyperparams;

    fn sine(len: usize) -> SeriesRecord {
        synth_generate(
            &SynthSpec {
                id: "sine".into(),
                period: 16,
                ..SynthSpec::default()
            },
            len,
            0,
        )
        .unwrap()
    }

    fn toy_model() -> FaeModel {
        FaeModel::build(FaeHyperparams::new(16, 2, 4, 2), 3).unwrap()
    }

    #[test]
    fn loss_decreases_on_noiseless_sine() {
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            batch_size: 16,
            max_epochs: 15,
            patience: 15,
            ..TrainConfig::default()
        };
        let out = train(toy_model(), &[sine(200)], &cfg).unwrap();
        let h = &out.history;
        assert!(h.train.last().unwrap() < &h.train[0], "{:?}", h.train);
    }

    #[test]
    fn same_seed_same_history() {
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            batch_size: 8,
            max_epochs: 3,
            ..TrainConfig::default()
        };
        let a = train(toy_model(), &[sine(120)], &cfg).unwrap();
        let b = train(toy_model(), &[sine(120)], &cfg).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn patience_stops_on_constant_windows() {
        let flat = SeriesRecord::new("flat", vec![2.0; 80]);
        let cfg = TrainConfig {
            learning_rate: 1e-2,
            batch_size: 16,
            max_epochs: 100,
            patience: 1,
            ..TrainConfig::default()
        };
        let out = train(toy_model(), &[flat], &cfg).unwrap();
        assert!(out.history.epochs() < 100, "ran {} epochs", out.history.epochs());
        assert!(out.stopped_early);
    }

    #[test]
    fn retains_best_validation_epoch() {
        let mut s = sine(240);
        s.split = Some(crate::data::Split { train_end: 160, val_end: 200 });
        let cfg = TrainConfig {
            learning_rate: 3e-2,
            batch_size: 8,
            max_epochs: 8,
            patience: 8,
            ..TrainConfig::default()
        };
        let out = train(toy_model(), std::slice::from_ref(&s), &cfg).unwrap();
        assert_eq!(Some(out.best_epoch), out.history.best_epoch());
        let val_windows = collect_windows(&out.model, std::slice::from_ref(&s), 1, |_| (160, 200))
            .unwrap()
            .concat();
        let retained = deterministic_loss(&out.model, &val_windows).unwrap();
        assert_eq!(retained, out.history.val[out.best_epoch]);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            train(toy_model(), &[], &TrainConfig::default()),
            Err(FaeError::Config(_))
        ));
        let short = SeriesRecord::new("s", vec![0.0; 10]);
        assert!(matches!(
            train(toy_model(), &[short], &TrainConfig::default()),
            Err(FaeError::Config(_))
        ));
    }

    #[test]
    fn single_step_descends() {
        let model = toy_model();
        let s = sine(64);
        let xs: Vec<Tensor2> = (15..47).map(|t| Tensor2::row(&s.values[t - 15..=t]).unwrap()).collect();
        let refs: Vec<&Tensor2> = xs.iter().collect();
        let eps = vec![vec![0.3, -0.8]; refs.len()];
        let (before, grads) = batch_gradient(&model, &refs, &eps).unwrap();
        assert!(grads.norm() > 1e-6);
        let mut w = model.flat_weights();
        let mut st = OptimizerState::new(w.len());
        adam_step(&mut w, &grads.flatten(), &mut st, 1e-4).unwrap();
        let mut stepped = model.clone();
        stepped.set_flat_weights(&w).unwrap();
        let (after, _) = batch_gradient(&stepped, &refs, &eps).unwrap();
        assert!(after < before, "{after} !< {before}");
    }
}
