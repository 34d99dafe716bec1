//! α·σ anomaly scoring, threshold calibration and point-wise evaluation.

mod eval;
mod zeroshot;

use crate::data::{stats_of, SeriesRecord, SeriesStats};
use crate::error::{FaeError, Result};
use crate::model::FaeModel;
use crate::par;
use crate::tensor::Tensor2;

pub use eval::{evaluate_pointwise, EvalReport};
pub use zeroshot::{zero_shot_run, ZeroShotReport, ZeroShotRow};

/// Predicted σ never drops below this (normalized units) before scoring.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// Default calibration grid.
pub const DEFAULT_ALPHA_GRID: [u32; 6] = [1, 2, 3, 4, 5, 6];

/// One scored time step, in the series' original units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRow {
    pub t: usize,
    pub timestamp: Option<i64>,
    pub x: f64,
    pub mu: f64,
    pub sigma: f64,
    pub score: f64,
    pub flag: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub series_id: String,
    pub alpha: f64,
    /// The model had no statistics for this id; a fallback normalizer fit
    /// on the series' own training partition was used.
    pub used_fallback: bool,
    pub rows: Vec<DetectionRow>,
}

impl DetectionResult {
    pub fn scores(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.score).collect()
    }

    pub fn flags(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.flag).collect()
    }

    /// Re-thresholds the stored scores.
    pub fn with_alpha(&self, alpha: f64) -> DetectionResult {
        let mut out = self.clone();
        out.alpha = alpha;
        for r in &mut out.rows {
            r.flag = u8::from(r.score > alpha);
        }
        out
    }

    /// Rows whose time index lies in `[start, end)`.
    pub fn rows_in(&self, start: usize, end: usize) -> &[DetectionRow] {
        let lo = self.rows.partition_point(|r| r.t < start);
        let hi = self.rows.partition_point(|r| r.t < end);
        &self.rows[lo..hi.max(lo)]
    }
}

/// Statistics the model uses for `series`, and whether they are a fallback.
pub fn series_stats(model: &FaeModel, series: &SeriesRecord) -> Result<(SeriesStats, bool)> {
    match model.normalizer.get(&series.id) {
        Some(s) => Ok((s, false)),
        None => {
            let (stats, _) = stats_of(series.train_values())?;
            Ok((stats, true))
        }
    }
}

/// Scores every time step `t ≥ T−1`: the window ending at `t` is encoded
/// through the posterior mean, decoded, and position `T−1` of `(μ_X, σ_X)`
/// is compared with `x_t`.
pub fn score_online(model: &FaeModel, series: &SeriesRecord, alpha: f64) -> Result<DetectionResult> {
    let (stats, used_fallback) = series_stats(model, series)?;
    if used_fallback {
        log::info!("series '{}' unknown to the model; using its own statistics", series.id);
    }
    let mut out = score_with_stats(model, series, stats, alpha)?;
    out.used_fallback = used_fallback;
    Ok(out)
}

pub fn score_with_stats(
    model: &FaeModel,
    series: &SeriesRecord,
    stats: SeriesStats,
    alpha: f64,
) -> Result<DetectionResult> {
    let window = model.window();
    if series.len() < window {
        return Err(FaeError::TooShort {
            id: series.id.clone(),
            length: series.len(),
            window,
        });
    }
    let normalized = stats.apply_all(&series.values);
    let ends: Vec<usize> = (window - 1..series.len()).collect();
    let predictions = par::map(&ends, |&t| -> Result<(f64, f64)> {
        let x = Tensor2::row(&normalized[t + 1 - window..=t])?;
        let (mu_x, sigma_x) = model.reconstruct(&x)?;
        Ok((mu_x.get(0, window - 1), sigma_x.get(0, window - 1)))
    });
    let mut rows = Vec::with_capacity(ends.len());
    for (&t, pred) in ends.iter().zip(predictions) {
        let (mu_n, sigma_n) = pred?;
        let sigma_n = sigma_n.max(SIGMA_FLOOR);
        let score = (normalized[t] - mu_n).abs() / sigma_n;
        rows.push(DetectionRow {
            t,
            timestamp: series.timestamp(t),
            x: series.values[t],
            mu: stats.invert(mu_n),
            sigma: sigma_n * stats.std,
            score,
            flag: u8::from(score > alpha),
        });
    }
    Ok(DetectionResult {
        series_id: series.id.clone(),
        alpha,
        used_fallback: false,
        rows,
    })
}

/// Outcome of [`select_alpha`] / [`calibrate_alpha`] for one series.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaChoice {
    pub series_id: String,
    pub alpha: u32,
    pub f1: f64,
    /// `false` when validation had no positive labels and the default was
    /// returned.
    pub calibrated: bool,
}

/// Picks the grid value with the best point-wise F1; ties go to the larger
/// α.
pub fn select_alpha(scores: &[f64], labels: &[u8], grid: &[u32], default: u32) -> Result<(u32, f64, bool)> {
    if scores.len() != labels.len() {
        return Err(FaeError::Shape(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if grid.is_empty() {
        return Err(FaeError::Config("alpha grid is empty".into()));
    }
    if !labels.contains(&1) {
        return Ok((default, 0.0, false));
    }
    let mut best: Option<(u32, f64)> = None;
    for &alpha in grid {
        let flags: Vec<u8> = scores.iter().map(|&s| u8::from(s > alpha as f64)).collect();
        let f1 = evaluate_pointwise(&flags, labels)?.f1;
        let better = match best {
            None => true,
            Some((a, f)) => f1 > f || (f1 == f && alpha > a),
        };
        if better {
            best = Some((alpha, f1));
        }
    }
    let (alpha, f1) = best.expect("non-empty grid");
    Ok((alpha, f1, true))
}

/// Per-series α maximizing point-wise F1 on the validation partition (the
/// whole scored range when a series has no split).
pub fn calibrate_alpha(
    model: &FaeModel,
    validation: &[SeriesRecord],
    grid: &[u32],
) -> Result<Vec<AlphaChoice>> {
    let default = model.hyper().alpha_default;
    validation
        .iter()
        .map(|s| {
            if s.labels.is_none() {
                return Err(FaeError::Data(format!("series '{}' has no labels", s.id)));
            }
            let result = score_online(model, s, default as f64)?;
            let (start, end) = match s.split {
                Some(sp) => (sp.train_end, sp.val_end),
                None => (0, s.len()),
            };
            let rows = result.rows_in(start, end);
            let scores: Vec<f64> = rows.iter().map(|r| r.score).collect();
            let labels: Vec<u8> = rows.iter().map(|r| s.label(r.t)).collect();
            let (alpha, f1, calibrated) = select_alpha(&scores, &labels, grid, default)?;
            if !calibrated {
                log::warn!("series '{}' has no validation anomalies; alpha not calibrated", s.id);
            }
            Ok(AlphaChoice {
                series_id: s.id.clone(),
                alpha,
                f1,
                calibrated,
            })
        })
        .collect()
}
