use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Which players the hidden party contacts in each iteration.
///
/// Iterations are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Schedule {
    Never,
    Always { player: usize },
    /// Entry `t - 1` lists the players contacted at iteration `t`; no
    /// contact after the list ends.
    Explicit { contacts: Vec<Vec<usize>> },
    /// Mutually exclusive per-iteration contact probabilities, one per player.
    Bernoulli { probs: Vec<f64> },
    /// Visit `order[(t - 1) % len]`.
    Cyclic { order: Vec<usize> },
}

impl Schedule {
    pub fn validate(&self, players: usize) -> Result<()> {
        let check = |p: usize| {
            if p >= players {
                Err(Error::InvalidConfig(format!(
                    "schedule names player {p} in a {players}-player game"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            Schedule::Never => Ok(()),
            Schedule::Always { player } => check(*player),
            Schedule::Explicit { contacts } => contacts.iter().flatten().try_for_each(|&p| check(p)),
            Schedule::Bernoulli { probs } => {
                if probs.len() != players {
                    return Err(Error::InvalidConfig(format!(
                        "bernoulli schedule needs {players} probabilities, got {}",
                        probs.len()
                    )));
                }
                if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::InvalidConfig("contact probability outside [0, 1]".into()));
                }
                if probs.iter().sum::<f64>() > 1.0 + 1e-12 {
                    return Err(Error::InvalidConfig(
                        "mutually exclusive contact probabilities sum above 1".into(),
                    ));
                }
                Ok(())
            }
            Schedule::Cyclic { order } => {
                if order.is_empty() {
                    return Err(Error::InvalidConfig("cyclic schedule order is empty".into()));
                }
                order.iter().try_for_each(|&p| check(p))
            }
        }
    }

    /// Players contacted at iteration `t` (1-based), sorted, deduplicated.
    pub fn contacts(&self, t: u64, seed: u64) -> Vec<usize> {
        debug_assert!(t >= 1);
        let mut out = match self {
            Schedule::Never => vec![],
            Schedule::Always { player } => vec![*player],
            Schedule::Explicit { contacts } => {
                contacts.get((t - 1) as usize).cloned().unwrap_or_default()
            }
            Schedule::Bernoulli { probs } => {
                let draw: f64 = rng::stream(seed, Stream::Schedule, t, 0).random();
                let mut acc = 0.0;
                let mut hit = vec![];
                for (player, p) in probs.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        hit.push(player);
                        break;
                    }
                }
                hit
            }
            Schedule::Cyclic { order } => vec![order[((t - 1) % order.len() as u64) as usize]],
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}
