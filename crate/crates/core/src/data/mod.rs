//! Series records, loaders, synthetic generation, normalization, temporal
//! splits and sliding windows.

mod csv_io;
mod normalize;
mod synth;
mod ucr;

pub use csv_io::{load_series_csv, write_series_csv, CsvSchema, GapPolicy};
pub use normalize::{fit_normalizer, stats_of, Normalizer, SeriesStats, STD_FLOOR};
pub use synth::{synth_generate, SynthSpec};
pub use ucr::{load_ucr_file, parse_ucr_name, ucr_file_name, write_ucr_file};

use crate::error::{FaeError, Result};

/// Partition boundaries: train is `[0, train_end)`, validation
/// `[train_end, val_end)`, test `[val_end, len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub train_end: usize,
    pub val_end: usize,
}

/// One univariate series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub id: String,
    /// Seconds since the epoch, constant step. `None` means implicit index.
    pub timestamps: Option<Vec<i64>>,
    pub values: Vec<f64>,
    pub labels: Option<Vec<u8>>,
    pub split: Option<Split>,
    /// Inclusive anomaly interval, UCR style.
    pub anomaly_span: Option<(usize, usize)>,
}

impl SeriesRecord {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            timestamps: None,
            values,
            labels: None,
            split: None,
            anomaly_span: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(FaeError::Data(format!("series '{}' has no values", self.id)));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.values.len() {
                return Err(FaeError::Data(format!(
                    "series '{}' has {} labels for {} values",
                    self.id,
                    labels.len(),
                    self.values.len()
                )));
            }
            if labels.iter().any(|&l| l > 1) {
                return Err(FaeError::Data(format!("series '{}' has non-binary labels", self.id)));
            }
        }
        if let Some(ts) = &self.timestamps {
            if ts.len() != self.values.len() {
                return Err(FaeError::Data(format!(
                    "series '{}' has {} timestamps for {} values",
                    self.id,
                    ts.len(),
                    self.values.len()
                )));
            }
            if ts.len() >= 2 {
                let step = ts[1] - ts[0];
                if step <= 0 || ts.windows(2).any(|w| w[1] - w[0] != step) {
                    return Err(FaeError::Data(format!(
                        "series '{}' timestamps are not strictly increasing with a constant step",
                        self.id
                    )));
                }
            }
        }
        if let Some(s) = self.split {
            if s.train_end > s.val_end || s.val_end > self.values.len() {
                return Err(FaeError::Data(format!(
                    "series '{}' split ({}, {}) invalid for length {}",
                    self.id,
                    s.train_end,
                    s.val_end,
                    self.values.len()
                )));
            }
        }
        Ok(())
    }

    /// Split boundaries, treating an unsplit series as all-train.
    pub fn effective_split(&self) -> Split {
        self.split.unwrap_or(Split {
            train_end: self.values.len(),
            val_end: self.values.len(),
        })
    }

    pub fn train_values(&self) -> &[f64] {
        &self.values[..self.effective_split().train_end]
    }

    pub fn timestamp(&self, t: usize) -> Option<i64> {
        self.timestamps.as_ref().map(|ts| ts[t])
    }

    pub fn label(&self, t: usize) -> u8 {
        self.labels.as_ref().map_or(0, |l| l[t])
    }

    /// Copy of `[start, end)` as its own record.
    pub fn slice(&self, start: usize, end: usize) -> SeriesRecord {
        SeriesRecord {
            id: self.id.clone(),
            timestamps: self.timestamps.as_ref().map(|t| t[start..end].to_vec()),
            values: self.values[start..end].to_vec(),
            labels: self.labels.as_ref().map(|l| l[start..end].to_vec()),
            split: None,
            anomaly_span: self.anomaly_span.and_then(|(b, e)| {
                if e < start || b >= end {
                    None
                } else {
                    Some((b.max(start) - start, e.min(end - 1) - start))
                }
            }),
        }
    }
}

/// A length-`T` window ending at `end_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub series_id: String,
    pub end_index: usize,
    pub window: Vec<f64>,
}

/// Output of [`make_windows`].
#[derive(Debug, Clone, PartialEq)]
pub struct Windows {
    pub samples: Vec<WindowSample>,
    /// The series was shorter than the window; `samples` is empty.
    pub too_short: bool,
}

/// Windows ending at `T−1, T−1+stride, …`.
pub fn make_windows(series: &SeriesRecord, window: usize, stride: usize) -> Result<Windows> {
    windows_ending_in(series, window, stride, 0, series.len())
}

/// Windows whose end index lies in `[first_end, end)`, starting at the
/// first admissible end `max(first_end, T−1)` and stepping by `stride`.
pub fn windows_ending_in(
    series: &SeriesRecord,
    window: usize,
    stride: usize,
    first_end: usize,
    end: usize,
) -> Result<Windows> {
    if window == 0 || stride == 0 {
        return Err(FaeError::Config("window and stride must be >= 1".into()));
    }
    let len = series.len();
    if len < window {
        return Ok(Windows {
            samples: Vec::new(),
            too_short: true,
        });
    }
    let end = end.min(len);
    let start = first_end.max(window - 1);
    let samples = (start..end)
        .step_by(stride)
        .map(|t| WindowSample {
            series_id: series.id.clone(),
            end_index: t,
            window: series.values[t + 1 - window..=t].to_vec(),
        })
        .collect();
    Ok(Windows {
        samples,
        too_short: false,
    })
}

/// How to carve train/validation/test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    /// Fractions of the length for train and validation; test takes the rest.
    Fractions { train: f64, val: f64 },
    /// Explicit `(train_end, val_end)`.
    Indices { train_end: usize, val_end: usize },
    /// Keep the record's train boundary and carve the last 20% of it as
    /// validation. For archive files that ship only a train/test pair.
    UcrCarve,
}

/// Fraction of an archive train partition reserved for validation.
pub const UCR_VALIDATION_FRACTION: usize = 5; // 1/5

/// Resolves `spec` against `series` into concrete boundaries.
pub fn resolve_split(series: &SeriesRecord, spec: SplitSpec) -> Result<Split> {
    let len = series.len();
    let split = match spec {
        SplitSpec::Fractions { train, val } => {
            if !(train > 0.0 && train < 1.0 && val > 0.0 && val < 1.0 && train + val < 1.0) {
                return Err(FaeError::Config(format!(
                    "split fractions must lie in (0,1) with sum < 1, got ({train}, {val})"
                )));
            }
            let train_end = (len as f64 * train).round() as usize;
            let val_end = ((len as f64 * (train + val)).round() as usize).max(train_end);
            Split { train_end, val_end }
        }
        SplitSpec::Indices { train_end, val_end } => Split { train_end, val_end },
        SplitSpec::UcrCarve => {
            let train_end = series.split.map_or(len, |s| s.train_end);
            let val_len = train_end / UCR_VALIDATION_FRACTION;
            Split {
                train_end: train_end - val_len,
                val_end: train_end,
            }
        }
    };
    if split.train_end > split.val_end || split.val_end > len {
        return Err(FaeError::Config(format!(
            "split ({}, {}) invalid for series '{}' of length {len}",
            split.train_end, split.val_end, series.id
        )));
    }
    Ok(split)
}

/// The three contiguous segments of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitViews {
    pub train: SeriesRecord,
    pub val: SeriesRecord,
    pub test: SeriesRecord,
    /// Per segment (train, val, test): shorter than the window.
    pub degenerate: [bool; 3],
}

pub fn temporal_split(series: &SeriesRecord, spec: SplitSpec, window: usize) -> Result<SplitViews> {
    let s = resolve_split(series, spec)?;
    let len = series.len();
    let train = series.slice(0, s.train_end);
    let val = series.slice(s.train_end, s.val_end);
    let test = series.slice(s.val_end, len);
    let degenerate = [train.len() < window, val.len() < window, test.len() < window];
    Ok(SplitViews {
        train,
        val,
        test,
        degenerate,
    })
}

/// Copy of `series` with its split boundaries set from `spec`.
pub fn with_split(series: &SeriesRecord, spec: SplitSpec) -> Result<SeriesRecord> {
    let split = resolve_split(series, spec)?;
    let mut out = series.clone();
    out.split = Some(split);
    Ok(out)
}
