//! Flat `key=value` run configuration.
//!
//! One setting per line, `#` starts a comment. Command-line `key=value`
//! overrides win over the file; documented defaults fill the rest. Keys of
//! the form `synth.<id>.<field>` describe synthetic series and are checked
//! against the generator's fields.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fae_core::data::{CsvSchema, GapPolicy, SynthSpec};
use fae_core::latent::Clock;
use fae_core::model::FaeHyperparams;
use fae_core::trainer::{SearchSpace, TrainConfig};
use fae_core::{FaeError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FAE_OUT_DIR";

/// `(key, default, description)`; an empty default means "unset".
pub const SCHEMA: &[(&str, &str, &str)] = &[
    ("data", "", "input series: CSV file(s) or UCR archive file(s), comma separated"),
    ("format", "csv", "input format: csv | ucr"),
    ("schema.timestamp", "timestamp", "timestamp column (blank cells = index-only)"),
    ("schema.id", "series_id", "series id column; empty = single series"),
    ("schema.value", "value", "value column"),
    ("schema.label", "label", "label column; empty = unlabelled"),
    ("gaps", "reject", "missing-timestamp policy: reject | interpolate"),
    ("split.train", "0.6", "training fraction (csv input)"),
    ("split.val", "0.2", "validation fraction (csv input)"),
    ("model", "", "model file to read (detect, eval, latent, info)"),
    ("T", "256", "window length"),
    ("J", "48", "latent dimension"),
    ("U", "128", "filters per hidden layer"),
    ("F", "2", "filter length"),
    ("gamma", "6e-5", "learning rate"),
    ("m", "32", "batch size"),
    ("beta", "1", "KL weight"),
    ("alpha", "3", "anomaly threshold multiplier"),
    ("alpha_grid", "1,2,3,4,5,6", "calibration grid"),
    ("calibrate", "false", "pick alpha per series on the validation partition"),
    ("epochs", "100", "maximum epochs"),
    ("patience", "10", "early-stopping patience"),
    ("seed", "0", "seed for initialization, shuffling and sampling"),
    ("stride", "1", "training window stride"),
    ("budget", "50", "number of search trials"),
    ("leave_out", "", "series ids excluded from training (zeroshot)"),
    ("k", "3", "principal components to keep"),
    ("latent.stride", "1", "window stride for latent encoding"),
    ("clock.samples_per_day", "", "samples per day for index-only series"),
    ("clock.days_per_week", "7", "days per week for index-only series"),
    ("synth.series", "synth", "ids of synthetic series, comma separated"),
    ("synth.length", "2880", "samples per synthetic series"),
    ("synth.seed", "0", "noise seed (series i uses seed + i)"),
    ("out", "", "output directory (default: $FAE_OUT_DIR, else ./out)"),
];

const SYNTH_FIELDS: &[&str] = &[
    "period",
    "amplitude",
    "weekend_scale",
    "trend_per_period",
    "noise_std",
    "spikes",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    if SCHEMA.iter().any(|(k, _, _)| *k == key) {
        return true;
    }
    match key.strip_prefix("synth.").and_then(|r| r.rsplit_once('.')) {
        Some((id, field)) => !id.is_empty() && SYNTH_FIELDS.contains(&field),
        None => false,
    }
}

fn parse_line(line: &str, origin: &str) -> Result<Option<(String, String)>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| FaeError::Config(format!("{origin}: expected key=value, got '{line}'")))?;
    let k = k.trim();
    if !known(k) {
        return Err(FaeError::Config(format!("{origin}: unknown key '{k}'")));
    }
    Ok(Some((k.to_string(), v.trim().to_string())))
}

impl RunConfig {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if let Some((k, v)) = parse_line(line, &format!("line {}", i + 1))? {
                values.insert(k, v);
            }
        }
        for o in overrides {
            match parse_line(o, "override")? {
                Some((k, v)) => {
                    values.insert(k, v);
                }
                None => return Err(FaeError::Config(format!("empty override '{o}'"))),
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)?,
            None => String::new(),
        };
        Self::parse(&text, overrides)
    }

    /// Raw value with the schema default applied; `None` when unset.
    pub fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key).map(String::as_str).or_else(|| {
            SCHEMA
                .iter()
                .find(|(k, _, _)| *k == key)
                .map(|(_, d, _)| *d)
        });
        v.filter(|s| !s.is_empty())
    }

    pub fn get<T: FromStr>(&self, key: &str, expected: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    FaeError::Config(format!("key '{key}' expects {expected}, got '{v}'"))
                })
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str, expected: &str) -> Result<T> {
        self.get(key, expected)?
            .ok_or_else(|| FaeError::Config(format!("key '{key}' is required")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.require(key, "a non-negative integer")
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.require(key, "a number")
    }

    pub fn list(&self, key: &str) -> Vec<String> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn hyperparams(&self) -> Result<FaeHyperparams> {
        let alpha: u32 = self.require("alpha", "a positive integer")?;
        Ok(FaeHyperparams {
            window: self.usize("T")?,
            latent: self.usize("J")?,
            filters: self.usize("U")?,
            filter_len: self.usize("F")?,
            learning_rate: self.f64("gamma")?,
            batch_size: self.usize("m")?,
            alpha_default: alpha,
            beta: self.f64("beta")?,
        })
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            learning_rate: self.f64("gamma")?,
            batch_size: self.usize("m")?,
            max_epochs: self.usize("epochs")?,
            patience: self.usize("patience")?,
            seed: self.require("seed", "an unsigned integer")?,
            beta: self.f64("beta")?,
            stride_train: self.usize("stride")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn search_space(&self) -> Result<SearchSpace> {
        let space = SearchSpace {
            budget: self.usize("budget")?,
            ..SearchSpace::default()
        };
        space.check()?;
        Ok(space)
    }

    pub fn alpha_grid(&self) -> Result<Vec<u32>> {
        let grid = self
            .list("alpha_grid")
            .iter()
            .map(|v| {
                v.parse().map_err(|_| {
                    FaeError::Config(format!("key 'alpha_grid' expects integers, got '{v}'"))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        if grid.is_empty() || grid.contains(&0) {
            return Err(FaeError::Config("alpha_grid must hold integers >= 1".into()));
        }
        Ok(grid)
    }

    pub fn schema(&self) -> CsvSchema {
        let col = |k: &str| self.raw(k).map(String::from);
        CsvSchema {
            timestamp: col("schema.timestamp").unwrap_or_default(),
            id: col("schema.id"),
            value: col("schema.value").unwrap_or_default(),
            label: col("schema.label"),
            ..CsvSchema::default()
        }
    }

    pub fn gaps(&self) -> Result<GapPolicy> {
        self.require::<String>("gaps", "a policy name")?.parse()
    }

    pub fn clock(&self) -> Result<Option<Clock>> {
        self.get("clock.samples_per_day", "a positive integer")?
            .map(|spd| -> Result<Clock> {
                Ok(Clock {
                    samples_per_day: spd,
                    days_per_week: self.usize("clock.days_per_week")?,
                })
            })
            .transpose()
    }

    pub fn synth_specs(&self) -> Result<Vec<SynthSpec>> {
        let ids = self.list("synth.series");
        for key in self.values.keys() {
            if let Some((id, _)) = key.strip_prefix("synth.").and_then(|r| r.rsplit_once('.')) {
                if !ids.iter().any(|i| i == id) {
                    return Err(FaeError::Config(format!(
                        "key '{key}' names a series missing from synth.series"
                    )));
                }
            }
        }
        ids.iter()
            .map(|id| {
                let mut spec = SynthSpec {
                    id: id.clone(),
                    ..SynthSpec::default()
                };
                for field in SYNTH_FIELDS {
                    if let Some(v) = self.values.get(&format!("synth.{id}.{field}")) {
                        spec.set(field, v)?;
                    }
                }
                Ok(spec)
            })
            .collect()
    }

    pub fn out_dir(&self) -> PathBuf {
        match self.raw("out") {
            Some(d) => PathBuf::from(d),
            None => std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out")),
        }
    }
}

/// Reference page for `fae help config`.
pub fn schema_reference() -> String {
    let mut out = String::new();
    for (k, d, desc) in SCHEMA {
        let d = if d.is_empty() { "-" } else { d };
        out.push_str(&format!("{k:<24} {d:<14} {desc}\n"));
    }
    out.push_str(&format!(
        "{:<24} {:<14} synthetic series field ({})\n",
        "synth.<id>.<field>",
        "-",
        SYNTH_FIELDS.join(", ")
    ));
    out
}
