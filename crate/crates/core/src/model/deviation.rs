//! Best-response search and the public deviation test.

use super::action::{Action, ActionProfile, ActionSet};
use super::game::{GameView, IntentionGameSpec, IntervalSearch, PublicPayoff, Round};
use super::interval::grid_golden_argmax;
use crate::error::Result;

/// Outcome of the public deviation test for one player.
#[derive(Debug, Clone, PartialEq)]
pub enum Deviance {
    /// Some alternative action strictly improves the player's public payoff;
    /// `witness` is the gain-maximizing one.
    Deviant { witness: Action, gain: f64 },
    NotDeviant,
}

impl Deviance {
    pub fn is_deviant(&self) -> bool {
        matches!(self, Deviance::Deviant { .. })
    }
}

/// Best public alternative for a player against the rest of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationScan {
    pub witness: Action,
    pub best: f64,
    pub current: f64,
    tolerance: f64,
}

impl DeviationScan {
    pub fn gain(&self) -> f64 {
        (self.best - self.current).max(0.0)
    }

    pub fn deviance(&self) -> Deviance {
        if self.best > self.current + self.tolerance {
            Deviance::Deviant { witness: self.witness.clone(), gain: self.best - self.current }
        } else {
            Deviance::NotDeviant
        }
    }
}

const PUBLIC_ROUND: Round<'static> = Round { t: 0, contacted: &[], previous: None };

/// Closed-form maximizer when the payoff kind has one.
fn closed_form(
    spec: &IntentionGameSpec,
    view: GameView,
    player: usize,
    profile: &ActionProfile,
    round: &Round<'_>,
) -> Option<Action> {
    match (spec.public(), spec.action_set(player)) {
        (PublicPayoff::CournotQuadratic, ActionSet::Interval { lo, hi })
            if spec.interval_search() == IntervalSearch::Auto =>
        {
            let rate = spec.linear_bonus_rate(view, player, round)?;
            let others: f64 = profile
                .actions()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != player)
                .filter_map(|(_, a)| a.as_quantity())
                .sum();
            // first-order condition of q(1 - q - others) - q^2/2 + rate*q
            Some(Action::Quantity(((1.0 + rate - others) / 3.0).clamp(*lo, *hi)))
        }
        (PublicPayoff::KeyIndicator, ActionSet::BitSpace { len, announce }) => {
            // bonus is fixed by the previous round, so only u_i varies with a_i
            let space = 1u64 << len;
            let mut blocked: Vec<u32> = announce.iter().map(|b| b.value()).collect();
            blocked.sort_unstable();
            let first_free = (0..space as u32)
                .zip(blocked.iter().copied().chain(std::iter::repeat(u32::MAX)))
                .find(|(v, b)| v != b)
                .map(|(v, _)| v)
                .unwrap_or(0);
            let bits = super::action::BitString::new(*len, first_free).ok()?;
            Some(Action::Bits(bits))
        }
        _ => None,
    }
}

/// Smallest maximizer of the view payoff for `player` over its action set,
/// holding the rest of `profile` fixed.
pub(crate) fn first_maximizer(
    spec: &IntentionGameSpec,
    view: GameView,
    player: usize,
    profile: &ActionProfile,
    round: &Round<'_>,
) -> (Action, f64) {
    let payoff = |a: Action| {
        let candidate = profile.with_action(player, a);
        spec.view_payoff(view, player, &candidate, round)
    };
    if let Some(a) = closed_form(spec, view, player, profile, round) {
        let v = payoff(a.clone());
        return (a, v);
    }
    match spec.action_set(player) {
        ActionSet::Interval { lo, hi } => {
            let (q, v) = grid_golden_argmax(|q| payoff(Action::Quantity(q)), *lo, *hi, spec.grid_points());
            (Action::Quantity(q), v)
        }
        set => {
            let actions = set.enumerate().expect("enumerable action set");
            let tol = spec.tolerance();
            let values: Vec<f64> = actions.iter().map(|a| payoff(a.clone())).collect();
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let k = values.iter().position(|&v| v >= max - tol).expect("non-empty action set");
            (actions[k].clone(), values[k])
        }
    }
}

/// All maximizers of the view payoff, ascending.
pub(crate) fn all_maximizers(
    spec: &IntentionGameSpec,
    view: GameView,
    player: usize,
    profile: &ActionProfile,
    round: &Round<'_>,
) -> (Vec<Action>, f64) {
    match spec.action_set(player) {
        ActionSet::Interval { .. } => {
            let (a, v) = first_maximizer(spec, view, player, profile, round);
            (vec![a], v)
        }
        set => {
            let actions = set.enumerate().expect("enumerable action set");
            let tol = spec.tolerance();
            let values: Vec<f64> = actions
                .iter()
                .map(|a| spec.view_payoff(view, player, &profile.with_action(player, a.clone()), round))
                .collect();
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let best = actions
                .into_iter()
                .zip(&values)
                .filter(|(_, &v)| v >= max - tol)
                .map(|(a, _)| a)
                .collect();
            (best, max)
        }
    }
}

/// Best public alternative for `player`; the profile must be valid.
pub fn scan_public_deviation(spec: &IntentionGameSpec, player: usize, profile: &ActionProfile) -> DeviationScan {
    let current = spec.public_payoff(player, profile);
    let (witness, best) = first_maximizer(spec, GameView::PublicImage, player, profile, &PUBLIC_ROUND);
    DeviationScan { witness, best, current, tolerance: spec.tolerance() }
}

/// Public half of the deviant-profile membership test.
pub fn deviance_test(spec: &IntentionGameSpec, player: usize, profile: &ActionProfile) -> Result<Deviance> {
    spec.check_player(player)?;
    spec.validate_profile(profile)?;
    Ok(scan_public_deviation(spec, player, profile).deviance())
}

/// Largest public gain `player` forwent at `profile`, zero when not deviant.
pub fn max_deviation_gain(spec: &IntentionGameSpec, player: usize, profile: &ActionProfile) -> Result<f64> {
    spec.check_player(player)?;
    spec.validate_profile(profile)?;
    let scan = scan_public_deviation(spec, player, profile);
    Ok(match scan.deviance() {
        Deviance::Deviant { gain, .. } => gain,
        Deviance::NotDeviant => 0.0,
    })
}

/// Full deviant-set membership: a witness must strictly improve the public
/// payoff while staying within the player's private payoff at `profile`.
pub fn in_deviant_set(
    spec: &IntentionGameSpec,
    player: usize,
    profile: &ActionProfile,
    private_payoff: f64,
) -> Result<bool> {
    spec.check_player(player)?;
    spec.validate_profile(profile)?;
    let tol = spec.tolerance();
    let current = spec.public_payoff(player, profile);
    let set = spec.action_set(player);
    if let Some(actions) = set.enumerate() {
        return Ok(actions.into_iter().any(|a| {
            let u = spec.public_payoff(player, &profile.with_action(player, a));
            u > current + tol && private_payoff >= u - tol
        }));
    }
    // Interval: the public payoff is continuous, so a witness exists iff the
    // best alternative beats the current payoff and the private payoff does too.
    let scan = scan_public_deviation(spec, player, profile);
    Ok(scan.best > current + tol && private_payoff > current + tol)
}
