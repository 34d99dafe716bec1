//! Model file: `FAE1`, a `key=value` text header closed by a blank line,
//! then every weight array in layout order as little-endian `f64`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::data::{Normalizer, SeriesStats};
use crate::error::{FaeError, Result};
use crate::export::write_atomic;
use crate::model::{layer_shapes, FaeHyperparams, FaeModel};
use crate::tensor::ConvParams;

pub const MAGIC: &[u8; 4] = b"FAE1";

pub fn write_model<W: Write>(model: &FaeModel, mut out: W) -> Result<()> {
    let h = model.hyper();
    let mut header = String::new();
    header.push_str(&format!("T={}\n", h.window));
    header.push_str(&format!("J={}\n", h.latent));
    header.push_str(&format!("U={}\n", h.filters));
    header.push_str(&format!("F={}\n", h.filter_len));
    header.push_str(&format!("N={}\n", model.depth()));
    header.push_str(&format!("beta={:?}\n", h.beta));
    header.push_str(&format!("gamma={:?}\n", h.learning_rate));
    header.push_str(&format!("m={}\n", h.batch_size));
    header.push_str(&format!("alpha={}\n", h.alpha_default));
    for (id, stats) in model.normalizer.iter() {
        if id.contains(['=', '\n', '\r']) || id.is_empty() {
            return Err(FaeError::Format(format!(
                "series id {id:?} cannot be stored in a model header"
            )));
        }
        header.push_str(&format!("norm.{id}={:?},{:?}\n", stats.mean, stats.std));
    }
    header.push('\n');

    out.write_all(MAGIC)?;
    out.write_all(header.as_bytes())?;
    for layer in model.layers() {
        for w in &layer.weights {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Writes the model to `path` via a temporary file and rename.
pub fn save_model(model: &FaeModel, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    write_atomic(path, &buf)
}

pub fn load_model(path: &Path) -> Result<FaeModel> {
    let bytes = std::fs::read(path)?;
    read_model(&bytes)
}

fn header_value<'a>(map: &BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str> {
    map.get(key)
        .copied()
        .ok_or_else(|| FaeError::Format(format!("model header lacks '{key}'")))
}

fn parse_num<T: std::str::FromStr>(map: &BTreeMap<&str, &str>, key: &str) -> Result<T> {
    let raw = header_value(map, key)?;
    raw.parse()
        .map_err(|_| FaeError::Format(format!("model header '{key}={raw}' is not a valid number")))
}

pub fn read_model(bytes: &[u8]) -> Result<FaeModel> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(FaeError::Format("bad magic bytes, not an FAE1 model file".into()));
    }
    let rest = &bytes[MAGIC.len()..];
    let end = rest
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| FaeError::Corruption("model header is not terminated".into()))?;
    let header = std::str::from_utf8(&rest[..end + 1])
        .map_err(|_| FaeError::Format("model header is not UTF-8".into()))?;
    let payload = &rest[end + 2..];

    let mut map = BTreeMap::new();
    let mut normalizer = Normalizer::default();
    for line in header.lines() {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| FaeError::Format(format!("malformed header line {line:?}")))?;
        if let Some(id) = key.strip_prefix("norm.") {
            let (mean, std) = value
                .split_once(',')
                .ok_or_else(|| FaeError::Format(format!("malformed normalizer line {line:?}")))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| FaeError::Format(format!("bad number in {line:?}")))
            };
            normalizer.insert(
                id,
                SeriesStats {
                    mean: parse(mean)?,
                    std: parse(std)?,
                },
            );
        } else {
            map.insert(key, value);
        }
    }

    let hyper = FaeHyperparams {
        window: parse_num(&map, "T")?,
        latent: parse_num(&map, "J")?,
        filters: parse_num(&map, "U")?,
        filter_len: parse_num(&map, "F")?,
        beta: parse_num(&map, "beta")?,
        learning_rate: map.get("gamma").map_or(Ok(FaeHyperparams::default().learning_rate), |_| {
            parse_num(&map, "gamma")
        })?,
        batch_size: map
            .get("m")
            .map_or(Ok(FaeHyperparams::default().batch_size), |_| parse_num(&map, "m"))?,
        alpha_default: map
            .get("alpha")
            .map_or(Ok(FaeHyperparams::default().alpha_default), |_| parse_num(&map, "alpha"))?,
    };
    let depth: usize = parse_num(&map, "N")?;
    let shapes = layer_shapes(&hyper).map_err(|e| FaeError::Format(e.to_string()))?;
    if hyper.depth()? != depth {
        return Err(FaeError::Format(format!(
            "header N={depth} disagrees with T={} F={}",
            hyper.window, hyper.filter_len
        )));
    }

    let expected: usize = shapes.iter().map(|(o, i, k, _)| o * i * k).sum::<usize>() * 8;
    if payload.len() != expected {
        return Err(FaeError::Corruption(format!(
            "weight payload is {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let layers = shapes
        .into_iter()
        .map(|(o, i, k, d)| ConvParams::new(o, i, k, d, values.by_ref().take(o * i * k).collect()))
        .collect::<Result<Vec<_>>>()?;
    FaeModel::from_parts(hyper, layers, normalizer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor2;

    fn sample_model() -> FaeModel {
        let mut m = FaeModel::build(FaeHyperparams::new(16, 3, 4, 2), 17).unwrap();
        m.normalizer.insert("a", SeriesStats { mean: 1.25, std: 0.1 });
        m.normalizer.insert("b-2", SeriesStats { mean: -3.0, std: 7.0 / 3.0 });
        m
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = sample_model();
        let mut first = Vec::new();
        write_model(&m, &mut first).unwrap();
        let back = read_model(&first).unwrap();
        assert_eq!(back, m);
        let mut second = Vec::new();
        write_model(&back, &mut second).unwrap();
        assert_eq!(first, second);

        let x = Tensor2::row(&(0..16).map(|t| (t as f64).cos()).collect::<Vec<_>>()).unwrap();
        let (mu_a, _) = m.encode(&x).unwrap();
        let (mu_b, _) = back.encode(&x).unwrap();
        assert_eq!(mu_a, mu_b);
        assert_eq!(m.decode(&mu_a).unwrap(), back.decode(&mu_b).unwrap());
    }

    #[test]
    fn truncated_payload_is_corruption() {
        let mut buf = Vec::new();
        write_model(&sample_model(), &mut buf).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(matches!(read_model(&buf), Err(FaeError::Corruption(_))));
    }

    #[test]
    fn bad_magic_is_format_error() {
        let mut buf = Vec::new();
        write_model(&sample_model(), &mut buf).unwrap();
        buf[3] = b'2';
        assert!(matches!(read_model(&buf), Err(FaeError::Format(_))));
        assert!(matches!(read_model(b"FA"), Err(FaeError::Format(_))));
    }

    #[test]
    fn inconsistent_depth_is_format_error() {
        let mut buf = Vec::new();
        write_model(&sample_model(), &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf).replacen("N=4", "N=5", 1);
        let start = text.find("N=5").unwrap();
        buf[start + 2] = b'5';
        assert!(matches!(read_model(&buf), Err(FaeError::Format(_))));
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_model(&sample_model(), &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf[4..]);
        let header: Vec<&str> = text.split("\n\n").next().unwrap().lines().collect();
        assert_eq!(&header[..5], &["T=16", "J=3", "U=4", "F=2", "N=4"]);
        assert!(header.contains(&"norm.a=1.25,0.1"));
    }
}
