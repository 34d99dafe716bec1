//! Seeded random search over the calibration grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::SeriesRecord;
use crate::error::{FaeError, Result};
use crate::model::{param_count_for, FaeHyperparams, FaeModel};
use crate::par;
use crate::trainer::{train, TrainConfig};

/// Inclusive integer range `{min, min+step, …, ≤ max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl StepRange {
    pub const fn new(min: usize, max: usize, step: usize) -> Self {
        Self { min, max, step }
    }

    pub fn values(&self) -> Vec<usize> {
        if self.step == 0 || self.min > self.max {
            return Vec::new();
        }
        (self.min..=self.max).step_by(self.step).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= self.min && v <= self.max && (v - self.min).is_multiple_of(self.step)
    }
}

/// Search ranges. `latent.max` is ignored in favour of the `J ≤ T/4`
/// coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub window: StepRange,
    pub latent: StepRange,
    pub learning_rate: (f64, f64),
    pub batch_size: StepRange,
    pub filters: StepRange,
    pub filter_len: usize,
    pub budget: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            window: StepRange::new(128, 512, 32),
            latent: StepRange::new(16, usize::MAX, 16),
            learning_rate: (1e-5, 5e-4),
            batch_size: StepRange::new(16, 96, 16),
            filters: StepRange::new(16, 128, 16),
            filter_len: 2,
            budget: 50,
        }
    }
}

impl SearchSpace {
    /// Latent sizes admissible for window `t`.
    pub fn latent_values(&self, window: usize) -> Vec<usize> {
        let upper = self.latent.max.min(window / 4);
        StepRange::new(self.latent.min, upper, self.latent.step)
            .values()
            .into_iter()
            .filter(|&j| j >= 1 && j < window)
            .collect()
    }

    fn feasible_windows(&self) -> Vec<usize> {
        self.window
            .values()
            .into_iter()
            .filter(|&t| !self.latent_values(t).is_empty())
            .collect()
    }

    pub fn check(&self) -> Result<()> {
        let (lo, hi) = self.learning_rate;
        if self.feasible_windows().is_empty()
            || self.batch_size.values().is_empty()
            || self.filters.values().is_empty()
            || !(lo > 0.0 && lo <= hi && hi.is_finite())
        {
            return Err(FaeError::Config("search space is empty".into()));
        }
        if self.budget < 1 {
            return Err(FaeError::Config("search budget must be >= 1".into()));
        }
        Ok(())
    }

    /// Draws one configuration uniformly: `T` first, then `J` from the
    /// values admissible for that `T`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> FaeHyperparams {
        let windows = self.feasible_windows();
        let window = windows[rng.random_range(0..windows.len())];
        let latents = self.latent_values(window);
        let latent = latents[rng.random_range(0..latents.len())];
        let batches = self.batch_size.values();
        let filters = self.filters.values();
        let (lo, hi) = self.learning_rate;
        FaeHyperparams {
            window,
            latent,
            filters: filters[rng.random_range(0..filters.len())],
            filter_len: self.filter_len,
            learning_rate: if lo == hi { lo } else { rng.random_range(lo..=hi) },
            batch_size: batches[rng.random_range(0..batches.len())],
            ..FaeHyperparams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub rank: usize,
    pub hyper: FaeHyperparams,
    /// Best validation loss; `+∞` when the trial could not be trained.
    pub val_loss: f64,
    pub params: usize,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Trial,
    /// Trials sorted by ascending validation loss.
    pub leaderboard: Vec<Trial>,
}

/// Trains `space.budget` sampled configurations (in parallel when enabled)
/// with `base`'s epoch cap and ranks them by best validation loss.
pub fn hyperparameter_search(
    space: &SearchSpace,
    dataset: &[SeriesRecord],
    base: &TrainConfig,
) -> Result<SearchOutcome> {
    space.check()?;
    if dataset.is_empty() {
        return Err(FaeError::Config("search dataset is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(base.seed);
    let candidates: Vec<(usize, FaeHyperparams)> =
        (0..space.budget).map(|i| (i, space.sample(&mut rng))).collect();

    let mut trials: Vec<(usize, Trial)> = par::map(&candidates, |(i, hyper)| {
        let seed = base.seed.wrapping_add(*i as u64 + 1);
        let config = TrainConfig {
            learning_rate: hyper.learning_rate,
            batch_size: hyper.batch_size,
            seed,
            ..base.clone()
        };
        let val_loss = FaeModel::build(hyper.clone(), seed)
            .and_then(|m| train(m, dataset, &config))
            .map(|out| out.history.val[out.best_epoch])
            .unwrap_or_else(|e| {
                log::warn!("trial {i} failed: {e}");
                f64::INFINITY
            });
        let params = param_count_for(hyper).unwrap_or(0);
        (
            *i,
            Trial {
                rank: 0,
                hyper: hyper.clone(),
                val_loss,
                params,
            },
        )
    });
    trials.sort_by(|a, b| a.1.val_loss.total_cmp(&b.1.val_loss).then(a.0.cmp(&b.0)));
    let leaderboard: Vec<Trial> = trials
        .into_iter()
        .enumerate()
        .map(|(rank, (_, mut t))| {
            t.rank = rank + 1;
            t
        })
        .collect();
    Ok(SearchOutcome {
        best: leaderboard[0].clone(),
        leaderboard,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthSpec};

    #[test]
    fn default_space_is_the_calibration_grid() {
        let s = SearchSpace::default();
        assert_eq!(s.window.values(), (128..=512).step_by(32).collect::<Vec<_>>());
        assert_eq!(s.latent_values(256), vec![16, 32, 48, 64]);
        assert_eq!(s.latent_values(128), vec![16, 32]);
        assert_eq!(s.batch_size.values(), vec![16, 32, 48, 64, 80, 96]);
        assert_eq!(s.filters.values(), (16..=128).step_by(16).collect::<Vec<_>>());
        assert_eq!(s.learning_rate, (1e-5, 5e-4));
        assert_eq!(s.budget, 50);
    }

    #[test]
    fn samples_respect_grid_and_coupling() {
        let s = SearchSpace::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let h = s.sample(&mut rng);
            assert!(s.window.contains(h.window));
            assert!(h.latent <= h.window / 4 && h.latent >= 16 && h.latent % 16 == 0);
            assert!(s.batch_size.contains(h.batch_size));
            assert!(s.filters.contains(h.filters));
            assert!(h.learning_rate >= 1e-5 && h.learning_rate <= 5e-4);
        }
    }

    #[test]
    fn empty_space_is_config_error() {
        let s = SearchSpace {
            window: StepRange::new(32, 60, 32),
            ..SearchSpace::default()
        };
        assert!(matches!(s.check(), Err(FaeError::Config(_))));
    }

    #[test]
    fn budget_one_leaderboard() {
        let space = SearchSpace {
            window: StepRange::new(16, 16, 1),
            latent: StepRange::new(2, 4, 2),
            batch_size: StepRange::new(8, 8, 1),
            filters: StepRange::new(4, 4, 1),
            budget: 1,
            ..SearchSpace::default()
        };
        let data = synth_generate(
            &SynthSpec {
                period: 8,
                ..SynthSpec::default()
            },
            80,
            0,
        )
        .unwrap();
        let base = TrainConfig {
            max_epochs: 2,
            ..TrainConfig::default()
        };
        let out = hyperparameter_search(&space, &[data], &base).unwrap();
        assert_eq!(out.leaderboard.len(), 1);
        assert_eq!(out.best, out.leaderboard[0]);
        assert_eq!(out.best.rank, 1);
        assert!(out.best.val_loss.is_finite());
    }
}
