//! CSV tables for scores, projections, histories and reports, and the
//! atomic file writer every output goes through.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::detector::{DetectionResult, DetectionRow, EvalReport, ZeroShotRow};
use crate::error::{FaeError, Result};
use crate::latent::ProjectionRow;
use crate::trainer::{History, Trial};

pub const DETECTION_HEADER: &str = "series_id,t,timestamp,x,mu,sigma,score,flag";
pub const PROJECTION_HEADER: &str = "series_id,t,timestamp,pc1,pc2,pc3,hour_bucket,weekend,day,radius";
pub const HISTORY_HEADER: &str = "epoch,train_loss,val_loss";
pub const LEADERBOARD_HEADER: &str = "rank,T,J,gamma,m,U,val_loss,params";
pub const ZERO_SHOT_HEADER: &str = "series_id,held_out,test_nll,coverage3,alpha,f1";
pub const METRICS_HEADER: &str = "series_id,alpha,tp,fp,fn,tn,precision,recall,f1";

/// 17 significant digits: parses back to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a sibling temporary file, syncs it and renames it over
/// `path`, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| FaeError::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn opt_i64(v: Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn detection_csv(result: &DetectionResult) -> String {
    let mut out = format!("{DETECTION_HEADER}\n");
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            result.series_id,
            r.t,
            opt_i64(r.timestamp),
            fmt_f64(r.x),
            fmt_f64(r.mu),
            fmt_f64(r.sigma),
            fmt_f64(r.score),
            r.flag
        ));
    }
    out
}

pub fn write_detection_csv(path: &Path, result: &DetectionResult) -> Result<()> {
    write_atomic(path, detection_csv(result).as_bytes())
}

/// Parses a score table back into `(series_id, rows)` pairs, in file order.
pub fn parse_detection_csv(text: &str) -> Result<Vec<(String, DetectionRow)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == DETECTION_HEADER => {}
        other => {
            return Err(FaeError::Schema(format!(
                "expected header '{DETECTION_HEADER}', found '{}'",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let line_no = i + 2;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(FaeError::Data(format!(
                    "line {line_no}: expected 8 fields, found {}",
                    fields.len()
                )));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| FaeError::Data(format!("line {line_no}: bad number '{s}'")))
            };
            let int = |s: &str| -> Result<i64> {
                s.parse()
                    .map_err(|_| FaeError::Data(format!("line {line_no}: bad integer '{s}'")))
            };
            let row = DetectionRow {
                t: int(fields[1])? as usize,
                timestamp: if fields[2].is_empty() { None } else { Some(int(fields[2])?) },
                x: num(fields[3])?,
                mu: num(fields[4])?,
                sigma: num(fields[5])?,
                score: num(fields[6])?,
                flag: int(fields[7])? as u8,
            };
            Ok((fields[0].to_string(), row))
        })
        .collect()
}

pub fn projection_csv(rows: &[ProjectionRow]) -> String {
    let mut out = format!("{PROJECTION_HEADER}\n");
    for r in rows {
        let pc = |i: usize| r.pcs.get(i).map(|&v| fmt_f64(v)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.series_id,
            r.t,
            opt_i64(r.timestamp),
            pc(0),
            pc(1),
            pc(2),
            r.hour_bucket,
            u8::from(r.weekend),
            r.day,
            fmt_f64(r.radius)
        ));
    }
    out
}

pub fn history_csv(history: &History) -> String {
    let mut out = format!("{HISTORY_HEADER}\n");
    for (e, (tr, va)) in history.train.iter().zip(&history.val).enumerate() {
        out.push_str(&format!("{e},{},{}\n", fmt_f64(*tr), fmt_f64(*va)));
    }
    out
}

pub fn leaderboard_csv(trials: &[Trial]) -> String {
    let mut out = format!("{LEADERBOARD_HEADER}\n");
    for t in trials {
        let h = &t.hyper;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t.rank,
            h.window,
            h.latent,
            fmt_f64(h.learning_rate),
            h.batch_size,
            h.filters,
            fmt_f64(t.val_loss),
            t.params
        ));
    }
    out
}

pub fn zero_shot_csv(rows: &[ZeroShotRow]) -> String {
    let mut out = format!("{ZERO_SHOT_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.series_id,
            u8::from(r.held_out),
            fmt_f64(r.test_nll),
            fmt_f64(r.coverage3),
            r.alpha,
            fmt_f64(r.f1)
        ));
    }
    out
}

/// Per-series metrics; `None` alpha (e.g. a pooled row) prints blank.
pub fn metrics_csv(rows: &[(String, Option<f64>, EvalReport)]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for (id, alpha, r) in rows {
        out.push_str(&format!(
            "{id},{},{},{},{},{},{},{},{}\n",
            alpha.map(fmt_f64).unwrap_or_default(),
            r.tp,
            r.fp,
            r.fn_,
            r.tn,
            fmt_f64(r.precision),
            fmt_f64(r.recall),
            fmt_f64(r.f1)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result() -> DetectionResult {
        DetectionResult {
            series_id: "s1".into(),
            alpha: 3.0,
            used_fallback: false,
            rows: vec![
                DetectionRow {
                    t: 4,
                    timestamp: None,
                    x: 0.1,
                    mu: 1.0 / 3.0,
                    sigma: 2.0f64.sqrt(),
                    score: 1e-300,
                    flag: 0,
                },
                DetectionRow {
                    t: 5,
                    timestamp: Some(1_600_000_000),
                    x: -7.25e12,
                    mu: f64::MIN_POSITIVE,
                    sigma: 0.3,
                    score: 12.5,
                    flag: 1,
                },
            ],
        }
    }

    #[test]
    fn empty_result_is_header_only() {
        let r = DetectionResult {
            rows: vec![],
            ..result()
        };
        assert_eq!(detection_csv(&r), format!("{DETECTION_HEADER}\n"));
    }

    #[test]
    fn detection_round_trip_is_exact() {
        let r = result();
        let parsed = parse_detection_csv(&detection_csv(&r)).unwrap();
        assert_eq!(parsed.len(), 2);
        for ((id, row), orig) in parsed.iter().zip(&r.rows) {
            assert_eq!(id, "s1");
            assert_eq!(row, orig);
        }
    }

    #[test]
    fn parse_rejects_wrong_header() {
        assert!(matches!(parse_detection_csv("a,b\n"), Err(FaeError::Schema(_))));
        let bad = format!("{DETECTION_HEADER}\ns,1,,x,1,1,1,0\n");
        assert!(matches!(parse_detection_csv(&bad), Err(FaeError::Data(_))));
    }

    #[test]
    fn atomic_write_replaces_and_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("missing").join("x.csv");
        assert!(matches!(write_atomic(&p, b"x"), Err(FaeError::Io(_))));
    }

    #[test]
    fn projection_table_layout() {
        let rows = vec![ProjectionRow {
            series_id: "a".into(),
            t: 7,
            timestamp: None,
            pcs: vec![1.0, -2.0],
            hour_bucket: 3,
            weekend: true,
            day: 2,
            radius: 5f64.sqrt(),
        }];
        let text = projection_csv(&rows);
        let line = text.lines().nth(1).unwrap();
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 10);
        assert_eq!(f[5], "");
        assert_eq!(&f[6..9], &["3", "1", "2"]);
        assert_eq!(f[3].parse::<f64>().unwrap(), 1.0);
    }
}
