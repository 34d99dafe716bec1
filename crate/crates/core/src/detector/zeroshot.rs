//! Hold-out experiments: train without some series, then score every series
//! on its test partition.

use crate::data::SeriesRecord;
use crate::detector::{evaluate_pointwise, score_online, select_alpha, DEFAULT_ALPHA_GRID};
use crate::error::{FaeError, Result};
use crate::model::{FaeHyperparams, FaeModel};
use crate::trainer::{train, History, TrainConfig};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroShotRow {
    pub series_id: String,
    pub held_out: bool,
    /// Mean Gaussian negative log-likelihood per test sample, original units.
    pub test_nll: f64,
    /// Fraction of test samples inside `μ ± 3σ`.
    pub coverage3: f64,
    pub alpha: u32,
    pub f1: f64,
}

#[derive(Debug, Clone)]
pub struct ZeroShotReport {
    pub rows: Vec<ZeroShotRow>,
    pub model: FaeModel,
    pub history: History,
}

impl ZeroShotReport {
    pub fn row(&self, id: &str) -> Option<&ZeroShotRow> {
        self.rows.iter().find(|r| r.series_id == id)
    }
}

/// Trains on `dataset` minus `leave_out` and reports test metrics for every
/// series. Held-out series are normalized with statistics of their own
/// training partition; no weights ever see them.
pub fn zero_shot_run(
    dataset: &[SeriesRecord],
    leave_out: &[String],
    hyper: &FaeHyperparams,
    config: &TrainConfig,
) -> Result<ZeroShotReport> {
    for id in leave_out {
        if !dataset.iter().any(|s| &s.id == id) {
            return Err(FaeError::Config(format!("leave-out id '{id}' is not in the dataset")));
        }
    }
    let included: Vec<SeriesRecord> = dataset
        .iter()
        .filter(|s| !leave_out.contains(&s.id))
        .cloned()
        .collect();
    if included.is_empty() {
        return Err(FaeError::Config("no series left for training after exclusion".into()));
    }
    let model = FaeModel::build(hyper.clone(), config.seed)?;
    let outcome = train(model, &included, config)?;
    let model = outcome.model;

    let rows = dataset
        .iter()
        .map(|s| test_row(&model, s, leave_out.contains(&s.id)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroShotReport {
        rows,
        model,
        history: outcome.history,
    })
}

fn test_row(model: &FaeModel, series: &SeriesRecord, held_out: bool) -> Result<ZeroShotRow> {
    let split = series.effective_split();
    let default_alpha = model.hyper().alpha_default;
    let scored = score_online(model, series, default_alpha as f64)?;

    let alpha = if series.labels.is_some() {
        let val = scored.rows_in(split.train_end, split.val_end);
        let scores: Vec<f64> = val.iter().map(|r| r.score).collect();
        let labels: Vec<u8> = val.iter().map(|r| series.label(r.t)).collect();
        select_alpha(&scores, &labels, &DEFAULT_ALPHA_GRID, default_alpha)?.0
    } else {
        default_alpha
    };

    let test = scored.rows_in(split.val_end, series.len());
    if test.is_empty() {
        return Err(FaeError::Data(format!("series '{}' has no scored test samples", series.id)));
    }
    let n = test.len() as f64;
    let nll = test
        .iter()
        .map(|r| {
            let z = (r.x - r.mu) / r.sigma;
            HALF_LN_2PI + r.sigma.ln() + 0.5 * z * z
        })
        .sum::<f64>()
        / n;
    let coverage3 = test.iter().filter(|r| r.score <= 3.0).count() as f64 / n;
    let flags: Vec<u8> = test.iter().map(|r| u8::from(r.score > alpha as f64)).collect();
    let labels: Vec<u8> = test.iter().map(|r| series.label(r.t)).collect();
    let f1 = evaluate_pointwise(&flags, &labels)?.f1;
    Ok(ZeroShotRow {
        series_id: series.id.clone(),
        held_out,
        test_nll: nll,
        coverage3,
        alpha,
        f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, with_split, SplitSpec, SynthSpec};

    fn series(id: &str, period: usize, seed: u64) -> SeriesRecord {
        let s = synth_generate(
            &SynthSpec {
                id: id.into(),
                period,
                noise_std: 0.1,
                ..SynthSpec::default()
            },
            160,
            seed,
        )
        .unwrap();
        with_split(&s, SplitSpec::Fractions { train: 0.5, val: 0.2 }).unwrap()
    }

    fn quick() -> (FaeHyperparams, TrainConfig) {
        (
            FaeHyperparams::new(16, 2, 4, 2),
            TrainConfig {
                learning_rate: 3e-3,
                batch_size: 16,
                max_epochs: 3,
                ..TrainConfig::default()
            },
        )
    }

    #[test]
    fn empty_leave_out_is_ordinary_training() {
        let data = vec![series("a", 8, 1), series("b", 12, 2)];
        let (h, c) = quick();
        let rep = zero_shot_run(&data, &[], &h, &c).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| !r.held_out));
        assert!(rep.rows.iter().all(|r| r.test_nll.is_finite()));
        assert!(rep.rows.iter().all(|r| (0.0..=1.0).contains(&r.coverage3)));
        assert_eq!(rep.model.normalizer.len(), 2);
    }

    #[test]
    fn held_out_series_is_tagged_and_unseen() {
        let data = vec![series("a", 8, 1), series("b", 12, 2)];
        let (h, c) = quick();
        let rep = zero_shot_run(&data, &["b".to_string()], &h, &c).unwrap();
        assert!(rep.row("b").unwrap().held_out);
        assert!(!rep.row("a").unwrap().held_out);
        assert!(!rep.model.normalizer.contains("b"));
    }

    #[test]
    fn exclusion_errors() {
        let data = vec![series("a", 8, 1)];
        let (h, c) = quick();
        assert!(matches!(
            zero_shot_run(&data, &["a".to_string()], &h, &c),
            Err(FaeError::Config(_))
        ));
        assert!(matches!(
            zero_shot_run(&data, &["zz".to_string()], &h, &c),
            Err(FaeError::Config(_))
        ));
    }
}
