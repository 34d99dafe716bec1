use std::collections::{BTreeMap, BTreeSet};

use crate::data::SeriesRecord;
use crate::error::{FaeError, Result};

/// Lower bound on a stored standard deviation.
pub const STD_FLOOR: f64 = 1e-8;

/// Mean and population standard deviation of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    pub std: f64,
}

impl SeriesStats {
    pub const UNIT: SeriesStats = SeriesStats { mean: 0.0, std: 1.0 };

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    pub fn invert(&self, v: f64) -> f64 {
        v * self.std + self.mean
    }

    pub fn apply_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.apply(v)).collect()
    }

    pub fn invert_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.invert(v)).collect()
    }
}

/// Returns the z-score statistics of `values` and whether the standard
/// deviation had to be floored.
pub fn stats_of(values: &[f64]) -> Result<(SeriesStats, bool)> {
    if values.is_empty() {
        return Err(FaeError::Data("cannot fit normalizer on an empty partition".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < STD_FLOOR {
        Ok((SeriesStats { mean, std: STD_FLOOR }, true))
    } else {
        Ok((SeriesStats { mean, std }, false))
    }
}

/// Per-series z-score statistics fit on training partitions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Normalizer {
    stats: BTreeMap<String, SeriesStats>,
    floored: BTreeSet<String>,
}

impl Normalizer {
    pub fn insert(&mut self, id: &str, stats: SeriesStats) {
        self.stats.insert(id.to_string(), stats);
    }

    pub fn get(&self, id: &str) -> Option<SeriesStats> {
        self.stats.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.stats.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SeriesStats)> {
        self.stats.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Ids whose training partition was constant.
    pub fn floored(&self) -> impl Iterator<Item = &str> {
        self.floored.iter().map(String::as_str)
    }

    pub fn is_floored(&self, id: &str) -> bool {
        self.floored.contains(id)
    }

    pub fn apply(&self, id: &str, values: &[f64]) -> Result<Vec<f64>> {
        Ok(self.require(id)?.apply_all(values))
    }

    pub fn invert(&self, id: &str, values: &[f64]) -> Result<Vec<f64>> {
        Ok(self.require(id)?.invert_all(values))
    }

    fn require(&self, id: &str) -> Result<SeriesStats> {
        self.get(id)
            .ok_or_else(|| FaeError::Data(format!("no normalizer statistics for series '{id}'")))
    }
}

/// Fits one `(mean, std)` per series on its training partition.
pub fn fit_normalizer(series: &[SeriesRecord]) -> Result<Normalizer> {
    let mut out = Normalizer::default();
    for s in series {
        let (stats, floored) = stats_of(s.train_values())?;
        if floored {
            log::warn!("series '{}' has a constant training partition; std floored", s.id);
            out.floored.insert(s.id.clone());
        }
        out.insert(&s.id, stats);
    }
    Ok(out)
}
