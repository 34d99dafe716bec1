//! Anomaly-archive single-series files: one number per line (or several
//! whitespace-separated per line), with the train boundary and the anomaly
//! interval encoded as the last three `_`-separated integers of the name.

use std::path::{Path, PathBuf};

use crate::data::{SeriesRecord, Split};
use crate::error::{FaeError, Result};
use crate::export::write_atomic;

/// `(prefix, train_end, anomaly_begin, anomaly_end)` from a file name such
/// as `001_UCR_Anomaly_x_35000_52000_52620.txt`.
pub fn parse_ucr_name(path: &Path) -> Result<(String, usize, usize, usize)> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| FaeError::Format(format!("{} has no usable file name", path.display())))?;
    let parts: Vec<&str> = stem.rsplitn(4, '_').collect();
    let bad = || {
        FaeError::Format(format!(
            "file name '{stem}' does not end in _<train_end>_<anomaly_begin>_<anomaly_end>"
        ))
    };
    if parts.len() < 4 {
        // allow a bare `<train_end>_<begin>_<end>` name
        if parts.len() == 3 {
            let nums: Vec<usize> =
                parts.iter().rev().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            return Ok((String::new(), nums[0], nums[1], nums[2]));
        }
        return Err(bad());
    }
    let end: usize = parts[0].parse().map_err(|_| bad())?;
    let begin: usize = parts[1].parse().map_err(|_| bad())?;
    let train_end: usize = parts[2].parse().map_err(|_| bad())?;
    Ok((parts[3].to_string(), train_end, begin, end))
}

pub fn ucr_file_name(series: &SeriesRecord) -> Result<String> {
    let train_end = series.split.map(|s| s.train_end).ok_or_else(|| {
        FaeError::Format(format!("series '{}' has no train boundary", series.id))
    })?;
    let (b, e) = series.anomaly_span.ok_or_else(|| {
        FaeError::Format(format!("series '{}' has no anomaly span", series.id))
    })?;
    Ok(format!("{}_{train_end}_{b}_{e}.txt", series.id))
}

pub fn load_ucr_file(path: &Path) -> Result<SeriesRecord> {
    let (id, train_end, begin, end) = parse_ucr_name(path)?;
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| FaeError::Data(format!("line {}: bad value '{tok}'", i + 1)))?;
            values.push(v);
        }
    }
    let len = values.len();
    if len == 0 {
        return Err(FaeError::Data(format!("{} contains no values", path.display())));
    }
    if begin > end || end >= len {
        return Err(FaeError::Data(format!(
            "anomaly span [{begin}, {end}] outside series of length {len}"
        )));
    }
    if train_end > len {
        return Err(FaeError::Data(format!(
            "train boundary {train_end} beyond series of length {len}"
        )));
    }
    let labels = (0..len).map(|t| u8::from(t >= begin && t <= end)).collect();
    let id = if id.is_empty() { "ucr".to_string() } else { id };
    Ok(SeriesRecord {
        id,
        timestamps: None,
        values,
        labels: Some(labels),
        split: Some(Split {
            train_end,
            val_end: train_end,
        }),
        anomaly_span: Some((begin, end)),
    })
}

/// Writes `series` into `dir` under the archive naming convention.
pub fn write_ucr_file(dir: &Path, series: &SeriesRecord) -> Result<PathBuf> {
    let path = dir.join(ucr_file_name(series)?);
    let mut body = String::with_capacity(series.len() * 20);
    for v in &series.values {
        body.push_str(&format!("{v:?}\n"));
    }
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}
