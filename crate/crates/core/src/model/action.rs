use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-length bit sequence, most significant bit first.
///
/// Lexicographic order on the `0`/`1` rendering equals numeric order on
/// `value`, which is what tie-breaking relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    len: u8,
    value: u32,
}

impl BitString {
    pub const MAX_LEN: u8 = 32;

    pub fn new(len: u8, value: u32) -> Result<Self> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(Error::InvalidConfig(format!("bit length {len} not in 1..=32")));
        }
        if len < 32 && value >> len != 0 {
            return Err(Error::InvalidConfig(format!("value {value} does not fit in {len} bits")));
        }
        Ok(BitString { len, value })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let len = u8::try_from(s.len())
            .map_err(|_| Error::InvalidConfig(format!("bitstring too long: {s}")))?;
        let mut value = 0u32;
        for c in s.chars() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::InvalidConfig(format!("bad bit character {other:?} in {s:?}")))
                }
            };
            value = value.checked_shl(1).unwrap_or(0) | bit;
        }
        BitString::new(len, value)
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u32 {
        self.value
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A single player's move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Action {
    Index(usize),
    Quantity(f64),
    Bits(BitString),
}

impl Action {
    /// Total order used for deterministic tie-breaking. Variants of
    /// different kinds never meet inside one action set.
    pub fn total_cmp(&self, other: &Action) -> Ordering {
        match (self, other) {
            (Action::Index(a), Action::Index(b)) => a.cmp(b),
            (Action::Quantity(a), Action::Quantity(b)) => a.total_cmp(b),
            (Action::Bits(a), Action::Bits(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Action::Index(_) => 0,
            Action::Quantity(_) => 1,
            Action::Bits(_) => 2,
        }
    }

    pub fn as_index(&self) -> Option<usize> {
        match self {
            Action::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_quantity(&self) -> Option<f64> {
        match self {
            Action::Quantity(q) => Some(*q),
            _ => None,
        }
    }

    pub fn as_bits(&self) -> Option<BitString> {
        match self {
            Action::Bits(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Index(i) => write!(f, "{i}"),
            Action::Quantity(q) => write!(f, "{q:.4}"),
            Action::Bits(b) => write!(f, "{b}"),
        }
    }
}

/// One action per player, in player order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionProfile(Vec<Action>);

impl ActionProfile {
    pub fn new(actions: Vec<Action>) -> Self {
        ActionProfile(actions)
    }

    pub fn quantities(qs: &[f64]) -> Self {
        ActionProfile(qs.iter().map(|&q| Action::Quantity(q)).collect())
    }

    pub fn indices(ix: &[usize]) -> Self {
        ActionProfile(ix.iter().map(|&i| Action::Index(i)).collect())
    }

    pub fn players(&self) -> usize {
        self.0.len()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn get(&self, player: usize) -> &Action {
        &self.0[player]
    }

    /// `(a, self_{-player})`.
    pub fn with_action(&self, player: usize, action: Action) -> Self {
        let mut next = self.0.clone();
        next[player] = action;
        ActionProfile(next)
    }

    pub fn lex_cmp(&self, other: &ActionProfile) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Sort lexicographically and drop duplicates.
pub fn sort_dedup_profiles(profiles: &mut Vec<ActionProfile>) {
    profiles.sort_by(|a, b| a.lex_cmp(b));
    profiles.dedup_by(|a, b| a.lex_cmp(b) == Ordering::Equal);
}

/// Upper bound on how many actions `enumerate` will materialize.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

/// The moves available to one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ActionSet {
    /// Actions `Index(0..len)`.
    Finite { len: usize },
    /// Closed real interval.
    Interval { lo: f64, hi: f64 },
    /// All bitstrings of length `len`, plus the public announcement subset.
    BitSpace { len: u8, announce: Vec<BitString> },
}

impl ActionSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            ActionSet::Finite { len } if *len == 0 => {
                Err(Error::InvalidGame("finite action set is empty".into()))
            }
            ActionSet::Interval { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                Err(Error::InvalidGame(format!("interval [{lo}, {hi}] requires lo < hi")))
            }
            ActionSet::BitSpace { len, announce } => {
                if *len == 0 || *len > BitString::MAX_LEN {
                    return Err(Error::InvalidGame(format!("bit length {len} not in 1..=32")));
                }
                if let Some(bad) = announce.iter().find(|b| b.len() != *len) {
                    return Err(Error::InvalidGame(format!(
                        "announcement {bad} has length {} instead of {len}",
                        bad.len()
                    )));
                }
                let mut sorted = announce.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != announce.len() {
                    return Err(Error::InvalidGame("duplicate announcement bitstrings".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, action: &Action) -> bool {
        match (self, action) {
            (ActionSet::Finite { len }, Action::Index(i)) => i < len,
            (ActionSet::Interval { lo, hi }, Action::Quantity(q)) => *lo <= *q && *q <= *hi,
            (ActionSet::BitSpace { len, .. }, Action::Bits(b)) => b.len() == *len,
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, ActionSet::Interval { .. })
    }

    /// Number of actions, `None` for intervals.
    pub fn size(&self) -> Option<u64> {
        match self {
            ActionSet::Finite { len } => Some(*len as u64),
            ActionSet::Interval { .. } => None,
            ActionSet::BitSpace { len, .. } => Some(1u64 << len),
        }
    }

    /// All actions in ascending order; `None` for intervals or oversize spaces.
    pub fn enumerate(&self) -> Option<Vec<Action>> {
        match self {
            ActionSet::Finite { len } => Some((0..*len).map(Action::Index).collect()),
            ActionSet::Interval { .. } => None,
            ActionSet::BitSpace { len, .. } => {
                let n = 1usize.checked_shl(u32::from(*len))?;
                if n > ENUMERATION_LIMIT {
                    return None;
                }
                Some(
                    (0..n as u32)
                        .map(|v| Action::Bits(BitString { len: *len, value: v }))
                        .collect(),
                )
            }
        }
    }
}
