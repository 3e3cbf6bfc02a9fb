//! Seeded repeated-game runs.
//!
//! Each iteration realizes one profile, evaluates public and private
//! payoffs, runs the public deviation scan for every player and folds the
//! result into the audit state. A run stops early as soon as a contractual
//! bound is exceeded; the breaching iteration stays in the trace.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equilibria::{scan_profile, termination_check, AuditState, Breach, Termination};
use crate::error::{Error, Result};
use crate::model::{
    all_maximizers, Action, ActionProfile, ActionSet, BitString, DeviationScan, GameView, IntentionGameSpec,
    PublicPayoff, Round, Schedule,
};
use crate::rng::{self, Stream};
use crate::solvers::public_pure_nash;

/// How players without a private bonus sample in the key discovery game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HonestPlay {
    /// Uniform over the public best responses (everything outside the
    /// announcement set).
    #[default]
    BestResponse,
    /// Uniform over the whole bitstring space.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tau_max: u64,
    pub seed: u64,
    pub delta_0: Option<u64>,
    pub mu_0: Option<f64>,
    /// Stop as soon as the honesty counter reaches this value.
    pub target_delta: Option<u64>,
    pub honest_play: HonestPlay,
}

impl RunConfig {
    /// Defaults: `delta_0 = ceil(tau_max / 10)`, unbounded `mu_0`.
    pub fn new(tau_max: u64, seed: u64) -> Self {
        RunConfig {
            tau_max,
            seed,
            delta_0: Some(tau_max.div_ceil(10)),
            mu_0: None,
            target_delta: None,
            honest_play: HonestPlay::default(),
        }
    }

    pub fn unbounded(tau_max: u64, seed: u64) -> Self {
        RunConfig { delta_0: None, ..RunConfig::new(tau_max, seed) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub player: usize,
    pub witness: Action,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: u64,
    pub realized: ActionProfile,
    pub contacted: Option<usize>,
    pub deviant: Option<Deviation>,
    pub payoffs_public: Vec<f64>,
    pub payoffs_private: Vec<f64>,
    pub delta_after: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Ran all `tau_max` iterations without a breach.
    Completed,
    /// Honesty counter reached the configured target.
    TargetReached,
    Terminated(Breach),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub game: String,
    pub players: usize,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
    pub final_state: AuditState,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KCheck {
    Ok,
    Violation { t: u64, players: Vec<usize> },
}

/// First iteration in `1..=tau_max` where more than `k` players would hold a
/// private bonus.
pub fn validate_k_intention(spec: &IntentionGameSpec, schedule: &Schedule, tau_max: u64, seed: u64) -> KCheck {
    // bonus holders depend only on the previous and current contacts, and
    // those pairs repeat once a deterministic schedule completes a period
    let horizon = match schedule {
        Schedule::Never | Schedule::Always { .. } => 2,
        Schedule::Cyclic { order } => order.len() as u64 + 1,
        Schedule::Explicit { contacts } => contacts.len() as u64 + 2,
        Schedule::Bernoulli { .. } => tau_max,
    };
    let mut prev: Vec<usize> = Vec::new();
    for t in 1..=tau_max.min(horizon) {
        let now = schedule.contacts(t, seed);
        let holders = spec.bonus().potential_holders(&now, &prev);
        if holders.len() > spec.k() {
            return KCheck::Violation { t, players: holders };
        }
        prev = now;
    }
    KCheck::Ok
}

enum Policy {
    /// Everyone plays the canonical public Nash profile; a bonus holder
    /// switches to its private best response against it.
    Anchor(ActionProfile),
    /// Key discovery: bonus holders announce from their announcement set,
    /// everyone else samples.
    KeySampling(HonestPlay),
}

impl Policy {
    fn for_spec(spec: &IntentionGameSpec, honest: HonestPlay) -> Result<Self> {
        if matches!(spec.public(), PublicPayoff::KeyIndicator) {
            return Ok(Policy::KeySampling(honest));
        }
        let anchor = public_pure_nash(spec)?.into_iter().next().ok_or(Error::NoPureNash)?;
        Ok(Policy::Anchor(anchor))
    }

    fn realize(&self, spec: &IntentionGameSpec, round: &Round<'_>, seed: u64) -> ActionProfile {
        match self {
            Policy::Anchor(anchor) => {
                let Some(i) = (0..spec.players()).find(|&i| spec.bonus_active(i, round)) else {
                    return anchor.clone();
                };
                let (best, _) = all_maximizers(spec, GameView::SelfReflection(i), i, anchor, round);
                // stay put when the anchor action is still a private best response
                let own = anchor.get(i);
                let choice = best
                    .iter()
                    .find(|a| a.total_cmp(own).is_eq())
                    .or_else(|| best.first())
                    .cloned()
                    .unwrap_or_else(|| own.clone());
                anchor.with_action(i, choice)
            }
            Policy::KeySampling(honest) => ActionProfile::new(
                (0..spec.players())
                    .map(|i| {
                        let ActionSet::BitSpace { len, announce } = spec.action_set(i) else {
                            unreachable!("key games use bitstring actions")
                        };
                        if spec.bonus_active(i, round) && !announce.is_empty() {
                            let mut r = rng::stream(seed, Stream::Announce, round.t, i as u64);
                            Action::Bits(*announce.choose(&mut r).expect("non-empty"))
                        } else {
                            let mut r = rng::stream(seed, Stream::Play, round.t, i as u64);
                            Action::Bits(sample_honest(&mut r, *len, announce, *honest))
                        }
                    })
                    .collect(),
            ),
        }
    }
}

fn sample_honest<R: Rng>(rng: &mut R, len: u8, announce: &[BitString], honest: HonestPlay) -> BitString {
    let space = 1u64 << len;
    let rejecting = honest == HonestPlay::BestResponse && (announce.len() as u64) < space;
    loop {
        let v = rng.random_range(0..space) as u32;
        let b = BitString::new(len, v).expect("in range");
        if !rejecting || !announce.contains(&b) {
            return b;
        }
    }
}

/// Player with the largest public gain among deviant scans, lowest id on ties.
pub fn attribute(scans: &[DeviationScan]) -> Option<Deviation> {
    let mut best: Option<Deviation> = None;
    for (player, scan) in scans.iter().enumerate() {
        if let crate::model::Deviance::Deviant { witness, gain } = scan.deviance() {
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(Deviation { player, witness, gain });
            }
        }
    }
    best
}

/// Run the game under `schedule` for at most `config.tau_max` iterations.
pub fn run(spec: &IntentionGameSpec, schedule: &Schedule, config: &RunConfig) -> Result<RunTrace> {
    if spec.k() != 1 {
        return Err(Error::Unsupported(format!("runs are analysed for k = 1, game has k = {}", spec.k())));
    }
    schedule.validate(spec.players())?;
    if let KCheck::Violation { t, players } = validate_k_intention(spec, schedule, config.tau_max, config.seed) {
        return Err(Error::KIntention { t, players });
    }
    let policy = Policy::for_spec(spec, config.honest_play)?;
    let p = spec.players();

    let mut state = AuditState::new(p, config.delta_0, config.mu_0);
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut prev_contacts: Vec<usize> = Vec::new();
    let mut verdict = Verdict::Completed;
    let reached = |s: &AuditState| config.target_delta.is_some_and(|d| s.delta >= d);

    if reached(&state) {
        verdict = Verdict::TargetReached;
    } else {
        for t in 1..=config.tau_max {
            let contacts = schedule.contacts(t, config.seed);
            let mut round = Round::new(t, &contacts);
            if let Some(last) = records.last() {
                round = round.with_previous(&prev_contacts, &last.realized);
            }
            let realized = policy.realize(spec, &round, config.seed);
            let payoffs_public: Vec<f64> = (0..p).map(|i| spec.public_payoff(i, &realized)).collect();
            let payoffs_private: Vec<f64> = (0..p)
                .map(|i| payoffs_public[i] + spec.private_bonus(i, &realized, &round))
                .collect();
            let scans = scan_profile(spec, &realized);
            state = state.absorb(&scans);
            log::debug!("t={t} realized={realized} delta={}", state.delta);

            records.push(IterationRecord {
                t,
                realized,
                contacted: contacts.first().copied(),
                deviant: attribute(&scans),
                payoffs_public,
                payoffs_private,
                delta_after: state.delta,
            });
            prev_contacts = contacts;

            if reached(&state) {
                verdict = Verdict::TargetReached;
                break;
            }
            if let Termination::Terminate(breach) = termination_check(&state) {
                log::info!("contract breach {breach:?} at t={t}");
                verdict = Verdict::Terminated(breach);
                break;
            }
        }
    }

    Ok(RunTrace {
        game: spec.name().to_string(),
        players: p,
        seed: config.seed,
        records,
        final_state: state,
        verdict,
    })
}

/// Re-scan realized profiles from scratch, independent of the recorded
/// per-iteration counters.
pub fn refold(spec: &IntentionGameSpec, records: &[IterationRecord], delta_0: Option<u64>, mu_0: Option<f64>) -> Result<AuditState> {
    let mut state = AuditState::new(spec.players(), delta_0, mu_0);
    for r in records {
        state = crate::equilibria::honesty_update(&state, spec, &r.realized)?;
    }
    Ok(state)
}
