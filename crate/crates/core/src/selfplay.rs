//! Strictly best-response and weakly better-response self-play.
//!
//! The learning step is replaced by an exact candidate set computed from the
//! payoff matrix; the mover picks uniformly among qualifying strategies.
//! Randomness comes from ChaCha8 seeded with a 64-bit seed, so a
//! `(game, variant, config)` triple always yields the same trace.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{JointStrategy, Player, SymmetricGame};
use crate::response::Variant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelfPlayError {
    #[error("invalid self-play configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfPlayConfig {
    pub tau_max: usize,
    pub memory_length: usize,
    pub seed: u64,
    /// Starting joint strategy; sampled uniformly from `S x S` when absent.
    pub initial: Option<JointStrategy>,
}

impl Default for SelfPlayConfig {
    fn default() -> Self {
        SelfPlayConfig {
            tau_max: 300,
            memory_length: 10,
            seed: 0,
            initial: None,
        }
    }
}

impl SelfPlayConfig {
    pub fn validate(&self, n: usize) -> Result<(), SelfPlayError> {
        if self.tau_max == 0 {
            return Err(SelfPlayError::InvalidConfig("tau_max must be positive".into()));
        }
        if self.memory_length == 0 {
            return Err(SelfPlayError::InvalidConfig("memory length must be positive".into()));
        }
        if self.memory_length > self.tau_max {
            return Err(SelfPlayError::InvalidConfig(format!(
                "memory length {} exceeds tau_max {}",
                self.memory_length, self.tau_max
            )));
        }
        if let Some(init) = self.initial {
            if init.row >= n || init.col >= n {
                return Err(SelfPlayError::InvalidConfig(format!(
                    "initial joint strategy ({}, {}) out of range for {} strategies",
                    init.row, init.col, n
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Episode {
    pub player: Player,
    pub pre: JointStrategy,
    pub post: JointStrategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfPlayTrace {
    pub variant: Variant,
    pub initial: JointStrategy,
    pub episodes: Vec<Episode>,
    /// Post-states of the last `memory_length` episodes.
    pub final_memory: Vec<JointStrategy>,
    pub learnt_strategies: BTreeSet<usize>,
}

/// Mover's next strategy; stays on `own` when nothing qualifies.
fn next_strategy(
    game: &SymmetricGame,
    variant: Variant,
    own: usize,
    opponent: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let candidates = match variant {
        Variant::Strict => game.strict_improvements(own, opponent),
        Variant::Weak => game.weak_improvements(own, opponent),
    };
    *candidates.choose(rng).unwrap_or(&own)
}

pub fn run_self_play(
    game: &SymmetricGame,
    variant: Variant,
    config: &SelfPlayConfig,
) -> Result<SelfPlayTrace, SelfPlayError> {
    let n = game.n();
    config.validate(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = match config.initial {
        Some(j) => j,
        None => JointStrategy::new(rng.gen_range(0..n), rng.gen_range(0..n)),
    };

    let mut state = initial;
    let mut episodes = Vec::with_capacity(config.tau_max);
    for _ in 0..config.tau_max {
        let player = if rng.gen_bool(0.5) { Player::One } else { Player::Two };
        let own = state.strategy_of(player);
        let opponent = state.strategy_of(player.other());
        let chosen = next_strategy(game, variant, own, opponent, &mut rng);
        let post = state.with(player, chosen);
        episodes.push(Episode {
            player,
            pre: state,
            post,
        });
        state = post;
    }

    let final_memory: Vec<JointStrategy> = episodes[config.tau_max - config.memory_length..]
        .iter()
        .map(|e| e.post)
        .collect();
    let learnt_strategies = final_memory.iter().flat_map(|j| [j.row, j.col]).collect();
    Ok(SelfPlayTrace {
        variant,
        initial,
        episodes,
        final_memory,
        learnt_strategies,
    })
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_index` in a batch: `splitmix64(base ^ splitmix64(run_index))`.
pub fn derive_run_seed(base_seed: u64, run_index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(run_index))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchFrequencies {
    pub variant: Variant,
    pub runs: usize,
    /// Number of runs whose learnt set contains each strategy.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

/// Runs `runs` independent self-plays and reports, per strategy, the share of
/// runs whose final memory contains it.
///
/// Each run gets seed [`derive_run_seed`]`(base.seed, i)` and, unless
/// `base.initial` pins a start, its own uniformly sampled initial joint
/// strategy. Runs execute in parallel; counting is order independent.
pub fn batch_frequencies(
    game: &SymmetricGame,
    variant: Variant,
    base: &SelfPlayConfig,
    runs: usize,
) -> Result<BatchFrequencies, SelfPlayError> {
    if runs == 0 {
        return Err(SelfPlayError::InvalidConfig("runs must be positive".into()));
    }
    let n = game.n();
    base.validate(n)?;
    let counts = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let config = SelfPlayConfig {
                seed: derive_run_seed(base.seed, i),
                ..base.clone()
            };
            let trace = run_self_play(game, variant, &config)?;
            let mut hit = vec![0u64; n];
            for s in trace.learnt_strategies {
                hit[s] = 1;
            }
            Ok(hit)
        })
        .try_reduce(
            || vec![0u64; n],
            |mut acc, hit| {
                acc.iter_mut().zip(hit).for_each(|(a, h)| *a += h);
                Ok(acc)
            },
        )?;
    let frequencies = counts.iter().map(|&c| c as f64 / runs as f64).collect();
    Ok(BatchFrequencies {
        variant,
        runs,
        counts,
        frequencies,
    })
}
