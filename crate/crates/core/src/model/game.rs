use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::action::{Action, ActionProfile, ActionSet, BitString};
use super::interval::DEFAULT_GRID_POINTS;
use crate::error::{Error, Result};

/// Strict-improvement dead zone for real-valued payoffs.
pub const DEVIATION_EPSILON: f64 = 1e-9;

/// Dense payoff tensor per player, row-major over the players' action indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    sizes: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl PayoffTable {
    pub fn new(sizes: Vec<usize>, values: Vec<Vec<f64>>) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidGame("payoff table needs non-empty dimensions".into()));
        }
        if values.len() != sizes.len() {
            return Err(Error::InvalidGame(format!(
                "{} payoff tables for {} players",
                values.len(),
                sizes.len()
            )));
        }
        if let Some((i, t)) = values.iter().enumerate().find(|(_, t)| t.len() != cells) {
            return Err(Error::InvalidGame(format!(
                "table for player {i} has {} cells, expected {cells}",
                t.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGame("payoff tables must be finite".into()));
        }
        Ok(PayoffTable { sizes, values })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn player_table(&self, player: usize) -> &[f64] {
        &self.values[player]
    }

    pub fn flat_index(&self, profile: &ActionProfile) -> usize {
        profile.actions().iter().zip(&self.sizes).fold(0, |acc, (a, &n)| {
            acc * n + a.as_index().expect("table games use index actions")
        })
    }

    pub fn get(&self, player: usize, profile: &ActionProfile) -> f64 {
        self.values[player][self.flat_index(profile)]
    }

    fn is_integral(&self) -> bool {
        self.values.iter().flatten().all(|v| v.fract() == 0.0)
    }
}

/// The publicly declared payoff functions `u_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PublicPayoff {
    Table(PayoffTable),
    /// `u_i = q_i (1 - sum q) - q_i^2 / 2`.
    CournotQuadratic,
    /// `u_i = 1` when `a_i` is outside the player's announcement set, else 0.
    KeyIndicator,
}

/// Generator of the private bonus `h_i = v_i - u_i >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PrivateBonus {
    None,
    /// `h_i = rate * q_i` while player `i` is contacted.
    Proportional { rate: f64 },
    /// `v_i = factor * u_i` while player `i` is contacted.
    Scaled { factor: f64 },
    /// Non-negative per-player table added while player `i` is contacted.
    AdditiveTable { values: Vec<Vec<f64>> },
    /// `h_i = 1` in the iteration after player `i` was visited while the
    /// realized profile was in the discovery table. The table is stored by
    /// its (small) complement.
    KeyContract { kappa_complement: BTreeSet<Vec<BitString>> },
}

impl PrivateBonus {
    pub fn is_zero(&self) -> bool {
        matches!(self, PrivateBonus::None)
    }

    /// Players that may hold a nonzero bonus at an iteration, from contact
    /// information alone.
    pub fn potential_holders(&self, contacts_now: &[usize], contacts_prev: &[usize]) -> Vec<usize> {
        match self {
            PrivateBonus::None => vec![],
            PrivateBonus::KeyContract { .. } => contacts_prev.to_vec(),
            _ => contacts_now.to_vec(),
        }
    }
}

/// Selects how interval best responses are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IntervalSearch {
    /// Closed form where the payoff kind has one, grid otherwise.
    #[default]
    Auto,
    /// Always use the grid scan with golden-section refinement.
    Grid { points: usize },
}

/// Which game a payoff is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameView {
    /// Everyone's public payoff.
    PublicImage,
    /// Private payoff for this player, public for the others.
    SelfReflection(usize),
}

/// What the previous iteration looked like; history-dependent bonuses read it.
#[derive(Debug, Clone, Copy)]
pub struct Previous<'a> {
    pub contacted: &'a [usize],
    pub profile: &'a ActionProfile,
}

/// Per-iteration context for private payoffs.
#[derive(Debug, Clone, Copy)]
pub struct Round<'a> {
    pub t: u64,
    pub contacted: &'a [usize],
    pub previous: Option<Previous<'a>>,
}

impl<'a> Round<'a> {
    pub fn new(t: u64, contacted: &'a [usize]) -> Self {
        Round { t, contacted, previous: None }
    }

    pub fn with_previous(mut self, contacted: &'a [usize], profile: &'a ActionProfile) -> Self {
        self.previous = Some(Previous { contacted, profile });
        self
    }
}

/// Contacts and realized profiles of a run so far, for looking up rounds.
#[derive(Debug, Clone, Default)]
pub struct History {
    pub contacts: Vec<Vec<usize>>,
    pub profiles: Vec<ActionProfile>,
}

impl History {
    /// Context of iteration `t` (1-based). Requires the contacts of `t` and
    /// the realized profile of `t - 1`.
    pub fn round(&self, t: u64) -> Result<Round<'_>> {
        let available = self.contacts.len() as u64;
        if t == 0 || t > available || t - 1 > self.profiles.len() as u64 {
            return Err(Error::IterationOutOfRange { t, available });
        }
        let idx = (t - 1) as usize;
        let round = Round::new(t, &self.contacts[idx]);
        Ok(if idx == 0 {
            round
        } else {
            round.with_previous(&self.contacts[idx - 1], &self.profiles[idx - 1])
        })
    }
}

/// A repeated game with public payoffs and private bonus generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionGameSpec {
    name: String,
    action_sets: Vec<ActionSet>,
    public: PublicPayoff,
    bonus: PrivateBonus,
    k: usize,
    search: IntervalSearch,
}

impl IntentionGameSpec {
    pub fn new(
        name: impl Into<String>,
        action_sets: Vec<ActionSet>,
        public: PublicPayoff,
        bonus: PrivateBonus,
    ) -> Result<Self> {
        let spec = IntentionGameSpec {
            name: name.into(),
            action_sets,
            public,
            bonus,
            k: 1,
            search: IntervalSearch::Auto,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGame("k must be at least 1".into()));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_interval_search(mut self, search: IntervalSearch) -> Self {
        self.search = search;
        self
    }

    fn validate(&self) -> Result<()> {
        let p = self.action_sets.len();
        if p < 2 {
            return Err(Error::InvalidGame(format!("need at least 2 players, got {p}")));
        }
        self.action_sets.iter().try_for_each(ActionSet::validate)?;

        match &self.public {
            PublicPayoff::Table(table) => {
                if table.sizes().len() != p {
                    return Err(Error::InvalidGame("table dimension differs from player count".into()));
                }
                for (set, &n) in self.action_sets.iter().zip(table.sizes()) {
                    if *set != (ActionSet::Finite { len: n }) {
                        return Err(Error::InvalidGame("table games need matching finite action sets".into()));
                    }
                }
            }
            PublicPayoff::CournotQuadratic => {
                if p != 2 {
                    return Err(Error::InvalidGame("cournot payoffs are defined for two firms".into()));
                }
                if !self.action_sets.iter().all(|s| matches!(s, ActionSet::Interval { .. })) {
                    return Err(Error::InvalidGame("cournot firms choose interval quantities".into()));
                }
            }
            PublicPayoff::KeyIndicator => {
                if !self.action_sets.iter().all(|s| matches!(s, ActionSet::BitSpace { .. })) {
                    return Err(Error::InvalidGame("key indicator payoffs need bitstring actions".into()));
                }
            }
        }

        match &self.bonus {
            PrivateBonus::None => {}
            PrivateBonus::Proportional { rate } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(Error::InvalidGame(format!("bonus rate {rate} must be >= 0")));
                }
                if !matches!(self.public, PublicPayoff::CournotQuadratic) {
                    return Err(Error::InvalidGame("proportional bonus needs quantity actions".into()));
                }
            }
            PrivateBonus::Scaled { factor } => {
                if !(factor.is_finite() && *factor >= 1.0) {
                    return Err(Error::InvalidGame(format!("scale factor {factor} must be >= 1")));
                }
                match &self.public {
                    PublicPayoff::Table(t) if (0..p).all(|i| t.player_table(i).iter().all(|&v| v >= 0.0)) => {}
                    _ => {
                        return Err(Error::InvalidGame(
                            "scaled bonus needs non-negative table payoffs so that v >= u".into(),
                        ))
                    }
                }
            }
            PrivateBonus::AdditiveTable { values } => {
                let PublicPayoff::Table(t) = &self.public else {
                    return Err(Error::InvalidGame("additive bonus tables need a table game".into()));
                };
                let cells: usize = t.sizes().iter().product();
                if values.len() != p || values.iter().any(|v| v.len() != cells) {
                    return Err(Error::InvalidGame("bonus table shape differs from payoff table".into()));
                }
                if values.iter().flatten().any(|&h| !(h.is_finite() && h >= 0.0)) {
                    return Err(Error::InvalidGame("bonus table entries must be >= 0".into()));
                }
            }
            PrivateBonus::KeyContract { kappa_complement } => {
                if !matches!(self.public, PublicPayoff::KeyIndicator) {
                    return Err(Error::InvalidGame("key contract needs the key indicator game".into()));
                }
                for entry in kappa_complement {
                    if entry.len() != p
                        || entry.iter().zip(&self.action_sets).any(|(b, s)| !s.contains(&Action::Bits(*b)))
                    {
                        return Err(Error::InvalidGame(
                            "key table complement entries must be full profiles".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.action_sets.len()
    }

    pub fn action_set(&self, player: usize) -> &ActionSet {
        &self.action_sets[player]
    }

    pub fn action_sets(&self) -> &[ActionSet] {
        &self.action_sets
    }

    pub fn public(&self) -> &PublicPayoff {
        &self.public
    }

    pub fn bonus(&self) -> &PrivateBonus {
        &self.bonus
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn interval_search(&self) -> IntervalSearch {
        self.search
    }

    pub fn grid_points(&self) -> usize {
        match self.search {
            IntervalSearch::Auto => DEFAULT_GRID_POINTS,
            IntervalSearch::Grid { points } => points,
        }
    }

    /// Comparison tolerance: exact for integer tables.
    pub fn tolerance(&self) -> f64 {
        let integral = match (&self.public, &self.bonus) {
            (PublicPayoff::KeyIndicator, _) => true,
            (PublicPayoff::Table(t), PrivateBonus::AdditiveTable { values }) => {
                t.is_integral() && values.iter().flatten().all(|v| v.fract() == 0.0)
            }
            (PublicPayoff::Table(t), _) => t.is_integral(),
            _ => false,
        };
        if integral {
            0.0
        } else {
            DEVIATION_EPSILON
        }
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.players() {
            return Err(Error::InvalidPlayer { player, players: self.players() });
        }
        Ok(())
    }

    pub fn validate_profile(&self, profile: &ActionProfile) -> Result<()> {
        if profile.players() != self.players() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} actions for {} players",
                profile.players(),
                self.players()
            )));
        }
        for (i, (a, set)) in profile.actions().iter().zip(&self.action_sets).enumerate() {
            if !set.contains(a) {
                return Err(Error::InvalidProfile(format!("action {a} invalid for player {i}")));
            }
        }
        Ok(())
    }

    /// `u_i(profile)`; the profile must already be valid.
    pub fn public_payoff(&self, player: usize, profile: &ActionProfile) -> f64 {
        match &self.public {
            PublicPayoff::Table(t) => t.get(player, profile),
            PublicPayoff::CournotQuadratic => {
                let total: f64 = profile.actions().iter().filter_map(Action::as_quantity).sum();
                let q = profile.get(player).as_quantity().expect("quantity action");
                q * (1.0 - total) - 0.5 * q * q
            }
            PublicPayoff::KeyIndicator => {
                let bits = profile.get(player).as_bits().expect("bitstring action");
                match &self.action_sets[player] {
                    ActionSet::BitSpace { announce, .. } if announce.contains(&bits) => 0.0,
                    _ => 1.0,
                }
            }
        }
    }

    /// `h_i(profile)` in the given round.
    pub fn private_bonus(&self, player: usize, profile: &ActionProfile, round: &Round<'_>) -> f64 {
        let contacted = round.contacted.contains(&player);
        match &self.bonus {
            PrivateBonus::None => 0.0,
            PrivateBonus::Proportional { rate } if contacted => {
                rate * profile.get(player).as_quantity().expect("quantity action")
            }
            PrivateBonus::Scaled { factor } if contacted => {
                (factor - 1.0) * self.public_payoff(player, profile)
            }
            PrivateBonus::AdditiveTable { values } if contacted => {
                let PublicPayoff::Table(t) = &self.public else { unreachable!() };
                values[player][t.flat_index(profile)]
            }
            PrivateBonus::KeyContract { .. } => {
                if self.contract_succeeded(player, round) {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Whether `player` holds a bonus that is not identically zero this round.
    pub fn bonus_active(&self, player: usize, round: &Round<'_>) -> bool {
        match &self.bonus {
            PrivateBonus::None => false,
            PrivateBonus::Proportional { rate } => *rate > 0.0 && round.contacted.contains(&player),
            PrivateBonus::Scaled { factor } => *factor > 1.0 && round.contacted.contains(&player),
            PrivateBonus::AdditiveTable { values } => {
                round.contacted.contains(&player) && values[player].iter().any(|&h| h > 0.0)
            }
            PrivateBonus::KeyContract { .. } => self.contract_succeeded(player, round),
        }
    }

    fn contract_succeeded(&self, player: usize, round: &Round<'_>) -> bool {
        match round.previous {
            Some(prev) => prev.contacted.contains(&player) && self.in_key_table(prev.profile),
            None => false,
        }
    }

    /// Membership in the key discovery table.
    pub fn in_key_table(&self, profile: &ActionProfile) -> bool {
        let PrivateBonus::KeyContract { kappa_complement } = &self.bonus else {
            return false;
        };
        let key: Option<Vec<BitString>> = profile.actions().iter().map(Action::as_bits).collect();
        match key {
            Some(key) => !kappa_complement.contains(&key),
            None => false,
        }
    }

    /// Payoff of `player` under `view`.
    pub fn view_payoff(&self, view: GameView, player: usize, profile: &ActionProfile, round: &Round<'_>) -> f64 {
        let u = self.public_payoff(player, profile);
        match view {
            GameView::SelfReflection(i) if i == player => u + self.private_bonus(player, profile, round),
            _ => u,
        }
    }

    /// Linear coefficient of the contacted firm's bonus, for closed-form
    /// Cournot responses.
    pub(crate) fn linear_bonus_rate(&self, view: GameView, player: usize, round: &Round<'_>) -> Option<f64> {
        match view {
            GameView::SelfReflection(i) if i == player => match &self.bonus {
                PrivateBonus::None => Some(0.0),
                PrivateBonus::Proportional { rate } => {
                    Some(if round.contacted.contains(&player) { *rate } else { 0.0 })
                }
                _ => None,
            },
            _ => Some(0.0),
        }
    }
}

/// Payoff of `player` under `view` at iteration `iteration` of `history`.
pub fn evaluate_payoff(
    spec: &IntentionGameSpec,
    view: GameView,
    player: usize,
    profile: &ActionProfile,
    iteration: u64,
    history: &History,
) -> Result<f64> {
    spec.check_player(player)?;
    if let GameView::SelfReflection(i) = view {
        spec.check_player(i)?;
    }
    spec.validate_profile(profile)?;
    let round = history.round(iteration)?;
    Ok(spec.view_payoff(view, player, profile, &round))
}
