//! Two firms supplying one market, with a hidden second market that buys
//! from at most one contacted firm per iteration.
//!
//! Public payoff `u_i = q_i (1 - q_1 - q_2) - q_i^2 / 2` on `q_i in [0, 1]`.
//! A contacted firm also earns `rate * q_i` privately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionSet, IntentionGameSpec, PrivateBonus, PublicPayoff, Schedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotConfig {
    pub schedule: Schedule,
    pub iterations: u64,
    pub bonus_rate: f64,
}

impl Default for CournotConfig {
    fn default() -> Self {
        CournotConfig { schedule: Schedule::Never, iterations: 100, bonus_rate: 0.5 }
    }
}

pub fn make_cournot(config: &CournotConfig) -> Result<IntentionGameSpec> {
    if !(config.bonus_rate.is_finite() && config.bonus_rate >= 0.0) {
        return Err(Error::InvalidConfig(format!("bonus rate {} must be >= 0", config.bonus_rate)));
    }
    config.schedule.validate(2)?;
    if let Schedule::Explicit { contacts } = &config.schedule {
        if let Some(t) = contacts.iter().position(|c| c.len() > 1) {
            return Err(Error::KIntention { t: t as u64 + 1, players: contacts[t].clone() });
        }
    }
    let bonus = if config.bonus_rate > 0.0 {
        PrivateBonus::Proportional { rate: config.bonus_rate }
    } else {
        PrivateBonus::None
    };
    IntentionGameSpec::new(
        "cournot",
        vec![ActionSet::Interval { lo: 0.0, hi: 1.0 }; 2],
        PublicPayoff::CournotQuadratic,
        bonus,
    )
}

/// `u_i(q_i, q_other)`.
pub fn payoff(q_self: f64, q_other: f64) -> f64 {
    q_self * (1.0 - q_self - q_other) - 0.5 * q_self * q_self
}

/// Public best response `(1 - q_other) / 3`.
pub fn public_best_response(q_other: f64) -> f64 {
    ((1.0 - q_other) / 3.0).clamp(0.0, 1.0)
}

/// Best response of a contacted firm, `(1 + rate - q_other) / 3`.
pub fn reflection_best_response(q_other: f64, rate: f64) -> f64 {
    ((1.0 + rate - q_other) / 3.0).clamp(0.0, 1.0)
}
