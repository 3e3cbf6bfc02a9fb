//! Best-response sets, pure Nash enumeration, reflection best-response
//! profiles and two-player mixed equilibria.

mod mixed;

pub use mixed::{
    mixed_equilibria_2p, mixed_nash_2p, reflection_mixed_2p, MixedEquilibrium, MixedProfile,
    MAX_SUPPORT_ACTIONS,
};

use crate::error::{Error, Result};
use crate::model::{
    all_maximizers, sort_dedup_profiles, Action, ActionProfile, ActionSet, GameView, IntentionGameSpec,
    PublicPayoff, Round, ENUMERATION_LIMIT,
};

/// All payoff-maximizing responses of one player to a complementary profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseSet {
    pub player: usize,
    /// The profile responded to; the player's own entry is irrelevant.
    pub complementary: ActionProfile,
    pub actions: Vec<Action>,
    pub value: f64,
}

impl BestResponseSet {
    pub fn contains(&self, action: &Action) -> bool {
        self.actions.iter().any(|a| a.total_cmp(action).is_eq())
    }
}

fn placeholder(set: &ActionSet) -> Action {
    match set {
        ActionSet::Finite { .. } => Action::Index(0),
        ActionSet::Interval { lo, .. } => Action::Quantity(*lo),
        ActionSet::BitSpace { len, .. } => {
            Action::Bits(crate::model::BitString::new(*len, 0).expect("valid length"))
        }
    }
}

/// `BR` of `player` under `view` against `complementary`.
pub fn best_response_set(
    spec: &IntentionGameSpec,
    view: GameView,
    player: usize,
    complementary: &ActionProfile,
    round: &Round<'_>,
) -> Result<BestResponseSet> {
    spec.check_player(player)?;
    if complementary.players() != spec.players() {
        return Err(Error::InvalidProfile(format!(
            "complementary profile has {} entries for {} players",
            complementary.players(),
            spec.players()
        )));
    }
    let context = complementary.with_action(player, placeholder(spec.action_set(player)));
    spec.validate_profile(&context)?;
    let (actions, value) = all_maximizers(spec, view, player, &context, round);
    if actions.is_empty() {
        return Err(Error::InvalidGame(format!("player {player} has no actions")));
    }
    Ok(BestResponseSet { player, complementary: context, actions, value })
}

/// Every profile of a finite game, in lexicographic order.
pub(crate) fn enumerate_profiles(spec: &IntentionGameSpec) -> Result<Vec<ActionProfile>> {
    let per_player: Vec<Vec<Action>> = spec
        .action_sets()
        .iter()
        .map(|s| s.enumerate())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Unsupported("profile enumeration needs finite action sets".into()))?;
    let total = per_player
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .filter(|&n| n <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::Unsupported("profile space too large to enumerate".into()))?;
    let mut out = Vec::with_capacity(total);
    let mut odometer = vec![0usize; per_player.len()];
    loop {
        out.push(ActionProfile::new(
            odometer.iter().zip(&per_player).map(|(&k, a)| a[k].clone()).collect(),
        ));
        let mut pos = per_player.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < per_player[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

fn is_public_best_response(spec: &IntentionGameSpec, player: usize, profile: &ActionProfile, own: &[Action]) -> bool {
    let current = spec.public_payoff(player, profile);
    let tol = spec.tolerance();
    own.iter()
        .all(|a| spec.public_payoff(player, &profile.with_action(player, a.clone())) <= current + tol)
}

/// Pure Nash profiles of the public image, lexicographically ordered.
pub fn public_pure_nash(spec: &IntentionGameSpec) -> Result<Vec<ActionProfile>> {
    match spec.public() {
        PublicPayoff::CournotQuadratic => Ok(vec![cournot_public_nash(spec)?]),
        _ => {
            let own: Vec<Vec<Action>> = spec
                .action_sets()
                .iter()
                .map(|s| s.enumerate())
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Unsupported("pure Nash enumeration needs finite action sets".into()))?;
            let mut nash: Vec<ActionProfile> = enumerate_profiles(spec)?
                .into_iter()
                .filter(|prof| (0..spec.players()).all(|i| is_public_best_response(spec, i, prof, &own[i])))
                .collect();
            sort_dedup_profiles(&mut nash);
            Ok(nash)
        }
    }
}

/// Fixed point of the linear public best-response map `3 q_i + q_j = 1`.
fn cournot_public_nash(spec: &IntentionGameSpec) -> Result<ActionProfile> {
    // Cramer's rule on [[3, 1], [1, 3]] q = [1, 1]
    let det = 3.0 * 3.0 - 1.0 * 1.0;
    let q = (1.0 * 3.0 - 1.0 * 1.0) / det;
    for set in spec.action_sets() {
        if !set.contains(&Action::Quantity(q)) {
            return Err(Error::Unsupported(
                "interior cournot equilibrium lies outside the quantity interval".into(),
            ));
        }
    }
    Ok(ActionProfile::quantities(&[q, q]))
}

/// Reflection best-response profiles of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionProfiles {
    pub profiles: Vec<ActionProfile>,
    /// Set when the public image has no pure Nash profile to anchor on.
    pub no_public_nash: bool,
}

/// `(b_i, a_{-i})` for every public Nash `a` and every `b_i` in the private
/// best-response set of `player` against `a_{-i}`.
pub fn reflection_best_response_profiles(
    spec: &IntentionGameSpec,
    player: usize,
    round: &Round<'_>,
) -> Result<ReflectionProfiles> {
    spec.check_player(player)?;
    let nash = public_pure_nash(spec)?;
    if nash.is_empty() {
        return Ok(ReflectionProfiles { profiles: vec![], no_public_nash: true });
    }
    let mut profiles = Vec::new();
    for a in &nash {
        let br = best_response_set(spec, GameView::SelfReflection(player), player, a, round)?;
        profiles.extend(br.actions.into_iter().map(|b| a.with_action(player, b)));
    }
    sort_dedup_profiles(&mut profiles);
    Ok(ReflectionProfiles { profiles, no_public_nash: false })
}

/// Small dense linear solve with partial pivoting; `None` when singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
