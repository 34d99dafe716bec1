//! Latent-space analysis: encode windows to posterior means, project onto
//! principal axes, and tag each point with calendar attributes.

mod pca;

use chrono::{DateTime, Datelike, Timelike};

use crate::data::{windows_ending_in, SeriesRecord, WindowSample};
use crate::detector::series_stats;
use crate::error::{FaeError, Result};
use crate::model::FaeModel;
use crate::par;
use crate::tensor::Tensor2;

pub use pca::{covariance, pca_fit, symmetric_eigen, PcaResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RowMeta {
    pub series_id: String,
    pub end_index: usize,
    pub timestamp: Option<i64>,
}

/// One posterior mean per encoded window.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentMatrix {
    pub rows: Vec<Vec<f64>>,
    pub meta: Vec<RowMeta>,
}

impl LatentMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Encodes already-normalized windows, preserving order.
pub fn encode_dataset(model: &FaeModel, windows: &[WindowSample]) -> Result<LatentMatrix> {
    let encoded = par::map(windows, |w| -> Result<Vec<f64>> {
        let x = Tensor2::row(&w.window)?;
        Ok(model.encode(&x)?.0)
    });
    let rows = encoded.into_iter().collect::<Result<Vec<_>>>()?;
    let meta = windows
        .iter()
        .map(|w| RowMeta {
            series_id: w.series_id.clone(),
            end_index: w.end_index,
            timestamp: None,
        })
        .collect();
    Ok(LatentMatrix { rows, meta })
}

/// Normalizes each series with the model's statistics (or its own training
/// statistics when unknown), windows it with `stride` and encodes.
pub fn encode_series(model: &FaeModel, series: &[SeriesRecord], stride: usize) -> Result<LatentMatrix> {
    let mut windows = Vec::new();
    let mut stamps = Vec::new();
    for s in series {
        let (stats, _) = series_stats(model, s)?;
        let normalized = SeriesRecord::new(s.id.clone(), stats.apply_all(&s.values));
        let w = windows_ending_in(&normalized, model.window(), stride, 0, s.len())?;
        if w.too_short {
            log::warn!("series '{}' shorter than the window; skipped", s.id);
        }
        stamps.extend(w.samples.iter().map(|x| s.timestamp(x.end_index)));
        windows.extend(w.samples);
    }
    let mut m = encode_dataset(model, &windows)?;
    for (meta, ts) in m.meta.iter_mut().zip(stamps) {
        meta.timestamp = ts;
    }
    Ok(m)
}

/// PCA over the rows of `matrix`; returns the fit and the `n × k`
/// projections.
pub fn pca_project(matrix: &LatentMatrix, k: usize) -> Result<(PcaResult, Vec<Vec<f64>>)> {
    pca_fit(&matrix.rows, k)
}

/// Sampling clock for index-only series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clock {
    pub samples_per_day: usize,
    pub days_per_week: usize,
}

impl Default for Clock {
    fn default() -> Self {
        Self {
            samples_per_day: 288,
            days_per_week: 7,
        }
    }
}

/// Hour-of-day bins of three hours each.
pub const HOUR_BUCKETS: usize = 8;

/// One plot-ready row.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionRow {
    pub series_id: String,
    pub t: usize,
    pub timestamp: Option<i64>,
    pub pcs: Vec<f64>,
    pub hour_bucket: usize,
    pub weekend: bool,
    /// Day of month for timestamped data, `1 + day index` otherwise.
    pub day: usize,
    /// Euclidean norm of the first (up to) three projections.
    pub radius: f64,
}

/// Calendar attributes `(hour_bucket, weekend, day)` of one point.
pub fn calendar(t: usize, timestamp: Option<i64>, clock: Option<Clock>) -> Result<(usize, bool, usize)> {
    match timestamp {
        Some(ts) => {
            let dt = DateTime::from_timestamp(ts, 0)
                .ok_or_else(|| FaeError::Data(format!("timestamp {ts} out of range")))?;
            let bucket = dt.hour() as usize / 3;
            let weekend = dt.weekday().num_days_from_monday() >= 5;
            Ok((bucket, weekend, dt.day() as usize))
        }
        None => {
            let clock = clock.ok_or_else(|| {
                FaeError::Config("index-only data needs a clock (samples_per_day)".into())
            })?;
            if clock.samples_per_day == 0 || clock.days_per_week == 0 {
                return Err(FaeError::Config("clock fields must be >= 1".into()));
            }
            let day_index = t / clock.samples_per_day;
            let bucket = (t % clock.samples_per_day) * HOUR_BUCKETS / clock.samples_per_day;
            let weekend = day_index % clock.days_per_week >= 5;
            Ok((bucket, weekend, day_index + 1))
        }
    }
}

pub fn annotate_projections(
    projections: &[Vec<f64>],
    meta: &[RowMeta],
    clock: Option<Clock>,
) -> Result<Vec<ProjectionRow>> {
    if projections.len() != meta.len() {
        return Err(FaeError::Shape(format!(
            "{} projections vs {} metadata rows",
            projections.len(),
            meta.len()
        )));
    }
    projections
        .iter()
        .zip(meta)
        .map(|(p, m)| {
            let (hour_bucket, weekend, day) = calendar(m.end_index, m.timestamp, clock)?;
            let radius = p.iter().take(3).map(|v| v * v).sum::<f64>().sqrt();
            Ok(ProjectionRow {
                series_id: m.series_id.clone(),
                t: m.end_index,
                timestamp: m.timestamp,
                pcs: p.clone(),
                hour_bucket,
                weekend,
                day,
                radius,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_windows;
    use crate::model::FaeHyperparams;

    fn windows(n: usize) -> Vec<WindowSample> {
        let s = SeriesRecord::new("w", (0..n + 7).map(|t| (t as f64 * 0.3).sin()).collect());
        make_windows(&s, 8, 1).unwrap().samples
    }

    #[test]
    fn zero_model_gives_zero_matrix() {
        let m = FaeModel::zeros(FaeHyperparams::new(8, 3, 2, 2)).unwrap();
        let lm = encode_dataset(&m, &windows(5)).unwrap();
        assert_eq!(lm.len(), 5);
        assert!(lm.rows.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn order_and_duplicates_preserved() {
        let m = FaeModel::build(FaeHyperparams::new(8, 3, 2, 2), 8).unwrap();
        let mut w = windows(6);
        w.push(w[2].clone());
        let lm = encode_dataset(&m, &w).unwrap();
        assert_eq!(lm.len(), 7);
        assert_eq!(lm.rows[6], lm.rows[2]);
        let ends: Vec<usize> = lm.meta.iter().map(|r| r.end_index).collect();
        assert_eq!(ends, w.iter().map(|s| s.end_index).collect::<Vec<_>>());
    }

    #[test]
    fn five_minute_clock() {
        let c = Some(Clock::default());
        assert_eq!(calendar(0, None, c).unwrap().0, 0);
        assert_eq!(calendar(144, None, c).unwrap().0, 4);
        assert_eq!(calendar(36, None, c).unwrap().0, 1);
        for day in 0..14 {
            let (_, weekend, d) = calendar(day * 288 + 10, None, c).unwrap();
            assert_eq!(weekend, day % 7 >= 5);
            assert_eq!(d, day + 1);
        }
        assert!(matches!(calendar(3, None, None), Err(FaeError::Config(_))));
    }

    #[test]
    fn month_of_index_data() {
        let c = Some(Clock::default());
        let len = 30 * 288;
        let days: Vec<usize> = (0..len).map(|t| calendar(t, None, c).unwrap().2).collect();
        for (t, d) in days.iter().enumerate() {
            assert_eq!(*d, t / 288 + 1);
        }
        assert_eq!(*days.last().unwrap(), len / 288);
    }

    #[test]
    fn timestamped_calendar() {
        // 2021-03-06 (a Saturday) 13:30 UTC
        let ts = 1_615_037_400;
        let (bucket, weekend, day) = calendar(0, Some(ts), None).unwrap();
        assert_eq!((bucket, weekend, day), (4, true, 6));
        // Monday 2021-03-01 00:00 UTC
        assert_eq!(calendar(0, Some(1_614_556_800), None).unwrap(), (0, false, 1));
    }

    #[test]
    fn annotation_radius_and_shape_check() {
        let proj = vec![vec![3.0, 4.0, 0.0, 100.0]];
        let meta = vec![RowMeta {
            series_id: "a".into(),
            end_index: 0,
            timestamp: None,
        }];
        let rows = annotate_projections(&proj, &meta, Some(Clock::default())).unwrap();
        assert_eq!(rows[0].radius, 5.0);
        assert!(annotate_projections(&proj, &[], None).is_err());
    }
}
