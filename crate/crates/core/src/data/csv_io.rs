use std::collections::BTreeMap;
use std::path::Path;

use crate::data::SeriesRecord;
use crate::error::{FaeError, Result};
use crate::export::{fmt_f64, write_atomic};

/// Column names of a long-format series CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub timestamp: String,
    /// Series id column. Without it the whole file is one series named
    /// `default_id`.
    pub id: Option<String>,
    pub value: String,
    pub label: Option<String>,
    pub default_id: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            id: Some("series_id".into()),
            value: "value".into(),
            label: Some("label".into()),
            default_id: "series".into(),
        }
    }
}

/// What to do when a series skips timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapPolicy {
    #[default]
    Reject,
    /// Fill missing steps by linear interpolation, labelled normal.
    Interpolate,
}

impl std::str::FromStr for GapPolicy {
    type Err = FaeError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(GapPolicy::Reject),
            "interpolate" => Ok(GapPolicy::Interpolate),
            other => Err(FaeError::Config(format!(
                "gap policy must be 'reject' or 'interpolate', got '{other}'"
            ))),
        }
    }
}

struct Row {
    line: u64,
    ts: Option<i64>,
    value: f64,
    label: u8,
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| FaeError::Schema(format!("missing column '{name}'")))
}

/// Reads a long-format CSV into one record per distinct id, each sorted by
/// timestamp and checked for a constant step.
pub fn load_series_csv(path: &Path, schema: &CsvSchema, gaps: GapPolicy) -> Result<Vec<SeriesRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => FaeError::Io(io),
            other => FaeError::Data(format!("{other:?}")),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| FaeError::Schema(format!("cannot read header row: {e}")))?
        .clone();
    let ts_col = column(&headers, &schema.timestamp)?;
    let val_col = column(&headers, &schema.value)?;
    let id_col = schema.id.as_deref().map(|n| column(&headers, n)).transpose()?;
    let label_col = schema.label.as_deref().map(|n| column(&headers, n)).transpose()?;

    let mut groups: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| FaeError::Data(format!("malformed CSV: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |col: usize| rec.get(col).unwrap_or("");
        let ts = match field(ts_col) {
            "" => None,
            raw => Some(raw.parse::<i64>().map_err(|_| {
                FaeError::Data(format!("line {line}: bad timestamp '{raw}'"))
            })?),
        };
        let value: f64 = field(val_col)
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| FaeError::Data(format!("line {line}: bad value '{}'", field(val_col))))?;
        let label = match label_col {
            Some(c) => match field(c) {
                "0" | "" => 0,
                "1" => 1,
                other => {
                    return Err(FaeError::Data(format!("line {line}: bad label '{other}'")));
                }
            },
            None => 0,
        };
        let id = id_col.map_or_else(|| schema.default_id.clone(), |c| field(c).to_string());
        groups.entry(id).or_default().push(Row {
            line,
            ts,
            value,
            label,
        });
    }

    groups
        .into_iter()
        .map(|(id, mut rows)| {
            if rows.iter().all(|r| r.ts.is_none()) {
                return Ok(index_only(id, rows, label_col.is_some()));
            }
            if let Some(r) = rows.iter().find(|r| r.ts.is_none()) {
                return Err(FaeError::Data(format!(
                    "series '{id}': missing timestamp at line {}",
                    r.line
                )));
            }
            rows.sort_by_key(|r| r.ts);
            assemble(id, rows, gaps, label_col.is_some())
        })
        .collect()
}

/// A series whose timestamp column is blank keeps file order.
fn index_only(id: String, rows: Vec<Row>, has_labels: bool) -> SeriesRecord {
    SeriesRecord {
        id,
        timestamps: None,
        values: rows.iter().map(|r| r.value).collect(),
        labels: has_labels.then(|| rows.iter().map(|r| r.label).collect()),
        split: None,
        anomaly_span: None,
    }
}

fn assemble(id: String, rows: Vec<Row>, gaps: GapPolicy, has_labels: bool) -> Result<SeriesRecord> {
    // callers guarantee every row is stamped
    let at = |r: &Row| r.ts.unwrap_or_default();
    let step = rows
        .windows(2)
        .map(|w| at(&w[1]) - at(&w[0]))
        .filter(|&d| d > 0)
        .min()
        .unwrap_or(1);
    let mut timestamps = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            let prev = &rows[i - 1];
            let diff = at(row) - at(prev);
            if diff == 0 {
                return Err(FaeError::Data(format!(
                    "series '{id}': duplicate timestamp {} at line {}",
                    at(row), row.line
                )));
            }
            if diff != step {
                if gaps == GapPolicy::Reject || diff % step != 0 {
                    return Err(FaeError::Data(format!(
                        "series '{id}': irregular timestamp step {diff} (expected {step}) at line {}",
                        row.line
                    )));
                }
                let missing = diff / step;
                for k in 1..missing {
                    let frac = k as f64 / missing as f64;
                    timestamps.push(at(prev) + k * step);
                    values.push(prev.value + frac * (row.value - prev.value));
                    labels.push(0);
                }
            }
        }
        timestamps.push(at(row));
        values.push(row.value);
        labels.push(row.label);
    }
    let rec = SeriesRecord {
        id,
        timestamps: Some(timestamps),
        values,
        labels: has_labels.then_some(labels),
        split: None,
        anomaly_span: None,
    };
    rec.validate()?;
    Ok(rec)
}

/// Writes records as `series_id,t,timestamp,value,label`. Index-only
/// series get a blank timestamp column.
pub fn write_series_csv(path: &Path, series: &[SeriesRecord]) -> Result<()> {
    let mut out = String::from("series_id,t,timestamp,value,label\n");
    for s in series {
        for t in 0..s.len() {
            let ts = s.timestamp(t).map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{t},{ts},{},{}\n",
                s.id,
                fmt_f64(s.values[t]),
                s.label(t)
            ));
        }
    }
    write_atomic(path, out.as_bytes())
}
