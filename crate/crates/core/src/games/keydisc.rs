//! Key discovery game.
//!
//! Each of `p` players picks a `lambda`-bit string. A hidden negotiator
//! visits one player per iteration, cycling through a fixed permutation. A
//! visited player whose iteration profile lies in the discovery table gets
//! the key, and announces it next iteration by playing a member of its public
//! announcement set, which forfeits its public payoff and is therefore
//! publicly deviant.

use std::collections::BTreeSet;

use rand::seq::{index::sample, SliceRandom};
use rand::Rng;

use crate::engine::{self, HonestPlay, RunConfig, RunTrace, Verdict};
use crate::error::{Error, Result};
use crate::model::{ActionSet, BitString, IntentionGameSpec, PrivateBonus, PublicPayoff, Schedule};
use crate::rng::{self, Stream};
use crate::sweep::{self, Execution};

pub const MAX_LAMBDA: u8 = 20;
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct KeyDiscConfig {
    pub lambda: u8,
    pub players: usize,
    /// Full profiles that are not in the discovery table.
    pub kappa_complement: Vec<Vec<BitString>>,
    /// Size of each generated announcement set; defaults to `lambda`.
    pub announce_size: Option<usize>,
    /// Explicit announcement sets, overriding generation.
    pub announce_sets: Option<Vec<Vec<BitString>>>,
    /// Visit order; a seeded permutation when absent.
    pub negotiator_order: Option<Vec<usize>>,
    /// Number of discoverers required before the run stops.
    pub required: usize,
    pub seed: u64,
    pub honest_play: HonestPlay,
    pub iteration_cap: u64,
}

impl KeyDiscConfig {
    pub fn new(lambda: u8, players: usize, required: usize, seed: u64) -> Self {
        KeyDiscConfig {
            lambda,
            players,
            kappa_complement: Vec::new(),
            announce_size: None,
            announce_sets: None,
            negotiator_order: None,
            required,
            seed,
            honest_play: HonestPlay::default(),
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyDiscGame {
    pub spec: IntentionGameSpec,
    pub schedule: Schedule,
    pub order: Vec<usize>,
}

impl KeyDiscGame {
    pub fn announce_set(&self, player: usize) -> &[BitString] {
        match self.spec.action_set(player) {
            ActionSet::BitSpace { announce, .. } => announce,
            _ => unreachable!(),
        }
    }
}

pub fn make_keydisc(config: &KeyDiscConfig) -> Result<KeyDiscGame> {
    let KeyDiscConfig { lambda, players: p, .. } = *config;
    if lambda == 0 || lambda > MAX_LAMBDA {
        return Err(Error::InvalidConfig(format!("lambda {lambda} not in 1..={MAX_LAMBDA}")));
    }
    if p < 2 {
        return Err(Error::InvalidConfig(format!("key game needs at least 2 players, got {p}")));
    }
    if config.required > p {
        return Err(Error::InvalidConfig(format!(
            "{} required discoverers exceeds {p} players",
            config.required
        )));
    }
    let space = 1usize << lambda;

    let announce_sets: Vec<Vec<BitString>> = match &config.announce_sets {
        Some(sets) => {
            if sets.len() != p {
                return Err(Error::InvalidConfig(format!("{} announcement sets for {p} players", sets.len())));
            }
            sets.clone()
        }
        None => {
            let size = config.announce_size.unwrap_or(lambda as usize);
            if size >= space {
                return Err(Error::InvalidConfig(format!(
                    "announcement set of {size} leaves no public best response in a space of {space}"
                )));
            }
            (0..p)
                .map(|i| {
                    let mut r = rng::stream(config.seed, Stream::Setup, 0, i as u64);
                    let mut values: Vec<u32> = sample(&mut r, space, size).into_iter().map(|v| v as u32).collect();
                    values.sort_unstable();
                    values.into_iter().map(|v| BitString::new(lambda, v)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        }
    };

    let order = match &config.negotiator_order {
        Some(order) => {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (0..p).collect::<Vec<_>>() {
                return Err(Error::InvalidConfig(format!("negotiator order {order:?} is not a permutation of 0..{p}")));
            }
            order.clone()
        }
        None => {
            let mut order: Vec<usize> = (0..p).collect();
            order.shuffle(&mut rng::stream(config.seed, Stream::Setup, 1, 0));
            order
        }
    };

    for entry in &config.kappa_complement {
        if entry.len() != p || entry.iter().any(|b| b.len() != lambda) {
            return Err(Error::InvalidConfig(format!(
                "key table complement entries need {p} strings of {lambda} bits"
            )));
        }
    }
    let kappa_complement: BTreeSet<Vec<BitString>> = config.kappa_complement.iter().cloned().collect();

    let spec = IntentionGameSpec::new(
        "keydisc",
        announce_sets
            .into_iter()
            .map(|announce| ActionSet::BitSpace { len: lambda, announce })
            .collect(),
        PublicPayoff::KeyIndicator,
        PrivateBonus::KeyContract { kappa_complement },
    )?;
    Ok(KeyDiscGame { spec, schedule: Schedule::Cyclic { order: order.clone() }, order })
}

/// Run until the honesty counter reaches the number of required discoverers.
/// Returns the stopping iteration and the full trace.
pub fn run_keydisc_to_honesty(config: &KeyDiscConfig) -> Result<(u64, RunTrace)> {
    let game = make_keydisc(config)?;
    let run_config = RunConfig {
        tau_max: config.iteration_cap,
        seed: config.seed,
        delta_0: None,
        mu_0: None,
        target_delta: Some(config.required as u64),
        honest_play: config.honest_play,
    };
    let trace = engine::run(&game.spec, &game.schedule, &run_config)?;
    match trace.verdict {
        Verdict::TargetReached => Ok((trace.records.len() as u64, trace)),
        _ => Err(Error::IterationCap { cap: config.iteration_cap, trace: Box::new(trace) }),
    }
}

const SAMPLE_BLOCK: u64 = 10_000;

/// Fraction of `samples` uniform draws from the player's bitstring space that
/// land in its announcement set. Deterministic in `seed` whatever `exec` is.
pub fn false_announcement_rate(
    spec: &IntentionGameSpec,
    player: usize,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    spec.check_player(player)?;
    let ActionSet::BitSpace { len, announce } = spec.action_set(player) else {
        return Err(Error::Unsupported("announcement sampling needs bitstring actions".into()));
    };
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let mut sorted: Vec<u32> = announce.iter().map(BitString::value).collect();
    sorted.sort_unstable();
    let space = 1u64 << len;
    let blocks = samples.div_ceil(SAMPLE_BLOCK);
    let hits: u64 = sweep::map_range(0..blocks, exec, |b| {
        let n = SAMPLE_BLOCK.min(samples - b * SAMPLE_BLOCK);
        let mut r = rng::stream(seed, Stream::Sampling, b, player as u64);
        (0..n)
            .filter(|_| sorted.binary_search(&(r.random_range(0..space) as u32)).is_ok())
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(hits as f64 / samples as f64)
}
