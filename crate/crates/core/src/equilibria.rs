//! Running honesty and deviation audits.
//!
//! The honesty counter `delta` counts iterations whose realized profile is
//! publicly deviant for at least one player. Every iteration also adds each
//! player's forgone public gain to a running sum, from which an observer
//! estimates the deviation bound as `sum / tau`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{scan_public_deviation, ActionProfile, DeviationScan, IntentionGameSpec, Round};
use crate::solvers::MixedProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditState {
    pub tau: u64,
    pub delta: u64,
    pub c_sum: Vec<f64>,
    pub c_count: u64,
    /// Contractual honesty bound; `None` is unbounded.
    pub delta_0: Option<u64>,
    /// Contractual deviation bound; `None` is unbounded.
    pub mu_0: Option<f64>,
}

impl AuditState {
    pub fn new(players: usize, delta_0: Option<u64>, mu_0: Option<f64>) -> Self {
        AuditState { tau: 0, delta: 0, c_sum: vec![0.0; players], c_count: 0, delta_0, mu_0 }
    }

    /// Fold one iteration's per-player deviation scans.
    pub fn absorb(&self, scans: &[DeviationScan]) -> AuditState {
        let mut next = self.clone();
        next.tau += 1;
        next.c_count += 1;
        let mut any = false;
        for (sum, scan) in next.c_sum.iter_mut().zip(scans) {
            if scan.deviance().is_deviant() {
                any = true;
                *sum += scan.gain();
            }
        }
        if any {
            next.delta += 1;
        }
        next
    }
}

/// Per-player public deviation scans of a realized profile.
pub fn scan_profile(spec: &IntentionGameSpec, realized: &ActionProfile) -> Vec<DeviationScan> {
    (0..spec.players()).map(|i| scan_public_deviation(spec, i, realized)).collect()
}

/// Advance the audit by one realized profile.
pub fn honesty_update(state: &AuditState, spec: &IntentionGameSpec, realized: &ActionProfile) -> Result<AuditState> {
    spec.validate_profile(realized)?;
    if state.c_sum.len() != spec.players() {
        return Err(Error::InvalidConfig(format!(
            "audit state tracks {} players, game has {}",
            state.c_sum.len(),
            spec.players()
        )));
    }
    Ok(state.absorb(&scan_profile(spec, realized)))
}

pub fn check_honesty(state: &AuditState, delta_bound: u64) -> bool {
    state.delta <= delta_bound
}

/// Expected private-minus-public payoff of `player` under a reflection mixture.
pub fn mu_self(
    spec: &IntentionGameSpec,
    player: usize,
    reflection_mix: &MixedProfile,
    round: &Round<'_>,
) -> Result<f64> {
    spec.check_player(player)?;
    let mut total = 0.0;
    for (profile, prob) in &reflection_mix.support {
        spec.validate_profile(profile)?;
        total += prob * spec.private_bonus(player, profile, round);
    }
    Ok(total)
}

/// Observer-side lower bounds on each player's expected payoff deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationEstimate {
    pub per_player_mu: Vec<f64>,
    /// Aggregate used by the termination contract.
    pub mu_max: f64,
    /// Bound that holds for every player simultaneously.
    pub mu_min: f64,
}

pub fn mu_observer(state: &AuditState) -> Result<DeviationEstimate> {
    if state.tau == 0 {
        return Err(Error::UndefinedEstimate);
    }
    let tau = state.tau as f64;
    let per_player_mu: Vec<f64> = state.c_sum.iter().map(|s| s / tau).collect();
    let mu_max = per_player_mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mu_min = per_player_mu.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DeviationEstimate { per_player_mu, mu_max, mu_min })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Breach {
    Honesty,
    Deviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Continue,
    Terminate(Breach),
}

/// Contract check; an honesty breach wins when both bounds are exceeded.
pub fn termination_check(state: &AuditState) -> Termination {
    if state.delta_0.is_some_and(|d0| state.delta > d0) {
        return Termination::Terminate(Breach::Honesty);
    }
    if let (Some(mu_0), Ok(est)) = (state.mu_0, mu_observer(state)) {
        if est.mu_max > mu_0 {
            return Termination::Terminate(Breach::Deviation);
        }
    }
    Termination::Continue
}
