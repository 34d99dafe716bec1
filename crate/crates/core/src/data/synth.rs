use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::SeriesRecord;
use crate::error::{FaeError, Result};

/// Components of a synthetic seasonal series.
///
/// `value(t) = amplitude·scale(t)·sin(2πt/period) + trend_per_period·t/period
///             + noise + spikes`, where `scale(t)` is `weekend_scale` on the
/// 6th and 7th "day" (one day = `period` samples) of every week.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub id: String,
    pub period: usize,
    pub amplitude: f64,
    pub weekend_scale: f64,
    pub trend_per_period: f64,
    pub noise_std: f64,
    /// `(index, magnitude)` additive spikes; labelled anomalous.
    pub spikes: Vec<(usize, f64)>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            id: "synth".into(),
            period: 288,
            amplitude: 1.0,
            weekend_scale: 1.0,
            trend_per_period: 0.0,
            noise_std: 0.0,
            spikes: Vec::new(),
        }
    }
}

impl SynthSpec {
    /// Applies one `key=value` setting. Spikes are written as
    /// `index:magnitude` pairs separated by `;`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| FaeError::Config(format!("'{key}' expects a number, got '{v}'")))
        };
        match key {
            "id" => self.id = value.trim().to_string(),
            "period" => {
                self.period = value.trim().parse().map_err(|_| {
                    FaeError::Config(format!("'period' expects an integer, got '{value}'"))
                })?
            }
            "amplitude" => self.amplitude = num(value)?,
            "weekend_scale" => self.weekend_scale = num(value)?,
            "trend_per_period" => self.trend_per_period = num(value)?,
            "noise_std" => self.noise_std = num(value)?,
            "spikes" => {
                self.spikes = value
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|pair| {
                        let (t, m) = pair.split_once(':').ok_or_else(|| {
                            FaeError::Config(format!("spike '{pair}' is not index:magnitude"))
                        })?;
                        let t = t.trim().parse().map_err(|_| {
                            FaeError::Config(format!("spike index '{t}' is not an integer"))
                        })?;
                        Ok((t, num(m)?))
                    })
                    .collect::<Result<_>>()?
            }
            other => return Err(FaeError::Config(format!("unknown synthetic key '{other}'"))),
        }
        Ok(())
    }

    pub fn is_weekend(&self, t: usize) -> bool {
        (t / self.period) % 7 >= 5
    }
}

pub fn synth_generate(spec: &SynthSpec, length: usize, seed: u64) -> Result<SeriesRecord> {
    if spec.period < 2 {
        return Err(FaeError::Config(format!("period must be >= 2, got {}", spec.period)));
    }
    if length < 1 {
        return Err(FaeError::Config("length must be >= 1".into()));
    }
    if spec.noise_std.is_nan() || spec.noise_std < 0.0 {
        return Err(FaeError::Config("noise_std must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = spec.period as f64;
    let mut values: Vec<f64> = (0..length)
        .map(|t| {
            let tf = t as f64;
            let scale = if spec.is_weekend(t) { spec.weekend_scale } else { 1.0 };
            let noise: f64 = StandardNormal.sample(&mut rng);
            spec.amplitude * scale * (std::f64::consts::TAU * tf / period).sin()
                + spec.trend_per_period * (tf / period)
                + spec.noise_std * noise
        })
        .collect();
    let mut labels = vec![0u8; length];
    for &(t, magnitude) in &spec.spikes {
        if t >= length {
            return Err(FaeError::Config(format!("spike at {t} beyond length {length}")));
        }
        values[t] += magnitude;
        labels[t] = 1;
    }
    Ok(SeriesRecord {
        id: spec.id.clone(),
        timestamps: None,
        values,
        labels: Some(labels),
        split: None,
        anomaly_span: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_sine() {
        let spec = SynthSpec {
            period: 4,
            ..SynthSpec::default()
        };
        let r = synth_generate(&spec, 4, 0).unwrap();
        for (a, b) in r.values.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spike_labels() {
        let spec = SynthSpec {
            period: 8,
            spikes: vec![(10, 5.0)],
            ..SynthSpec::default()
        };
        let r = synth_generate(&spec, 32, 0).unwrap();
        let labels = r.labels.unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 1);
        assert_eq!(labels[10], 1);
        assert!((r.values[10] - (5.0 + (std::f64::consts::TAU * 10.0 / 8.0).sin())).abs() < 1e-12);
    }

    #[test]
    fn seeded_noise() {
        let spec = SynthSpec {
            period: 16,
            noise_std: 0.3,
            ..SynthSpec::default()
        };
        let a = synth_generate(&spec, 100, 9).unwrap();
        let b = synth_generate(&spec, 100, 9).unwrap();
        let c = synth_generate(&spec, 100, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn weekend_scaling_and_trend() {
        let spec = SynthSpec {
            period: 4,
            weekend_scale: 0.5,
            trend_per_period: 2.0,
            ..SynthSpec::default()
        };
        let r = synth_generate(&spec, 40, 0).unwrap();
        // day 5 starts at t=20; t=21 is a sine peak
        assert!((r.values[1] - (1.0 + 2.0 * 0.25)).abs() < 1e-12);
        assert!((r.values[21] - (0.5 + 2.0 * 21.0 / 4.0)).abs() < 1e-12);
        assert!((r.values[29] - (1.0 + 2.0 * 29.0 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn parses_settings() {
        let mut s = SynthSpec::default();
        s.set("period", "32").unwrap();
        s.set("spikes", "10:5.0; 40:-3").unwrap();
        assert_eq!(s.period, 32);
        assert_eq!(s.spikes, vec![(10, 5.0), (40, -3.0)]);
        assert!(s.set("perod", "3").is_err());
        assert!(s.set("amplitude", "x").is_err());
    }
}
