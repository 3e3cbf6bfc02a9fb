//! Finite games given by payoff tables, including seeded random families.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionSet, IntentionGameSpec, PayoffTable, PrivateBonus, PublicPayoff};
use crate::rng::{self, Stream};

pub const MAX_RANDOM_PLAYERS: usize = 3;
pub const MAX_RANDOM_ACTIONS: usize = 5;
/// Random table entries are integers in `0..=PAYOFF_MAX`.
pub const PAYOFF_MAX: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BonusMode {
    None,
    /// `v_i = factor * u_i` for the contacted player.
    ScaledBy { factor: f64 },
    /// Seeded non-negative integer bonus tables for the contacted player.
    AdditiveTable { seed: u64 },
}

/// How random tables treat payoff ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Each cell drawn independently; a player may be indifferent between
    /// two of its own actions.
    Independent,
    /// Within every set of cells that differ only in player `i`'s action,
    /// player `i`'s payoffs are distinct. Each cell is still uniform on
    /// `0..=100`.
    #[default]
    Generic,
}

fn draw_table(sizes: &[usize], player: usize, seed: u64, stream_t: u64, ties: TieRule) -> Vec<f64> {
    let cells: usize = sizes.iter().product();
    let mut rng = rng::stream(seed, Stream::Tables, stream_t, player as u64);
    match ties {
        TieRule::Independent => (0..cells).map(|_| f64::from(rng.random_range(0..=PAYOFF_MAX))).collect(),
        TieRule::Generic => {
            let n = sizes[player];
            let stride: usize = sizes[player + 1..].iter().product();
            let mut table = vec![0.0; cells];
            // each fiber: cells sharing every index except the player's own
            for base in 0..cells {
                if (base / stride) % n != 0 {
                    continue;
                }
                let values = sample(&mut rng, PAYOFF_MAX as usize + 1, n);
                for (k, v) in values.iter().enumerate() {
                    table[base + k * stride] = v as f64;
                }
            }
            table
        }
    }
}

/// Random finite game with integer payoffs in `[0, 100]`, reproducible from
/// `seed`. Uses [`TieRule::Generic`].
pub fn make_random_matrix(players: usize, sizes: &[usize], bonus: BonusMode, seed: u64) -> Result<IntentionGameSpec> {
    make_random_matrix_with(players, sizes, bonus, seed, TieRule::default())
}

pub fn make_random_matrix_with(
    players: usize,
    sizes: &[usize],
    bonus: BonusMode,
    seed: u64,
    ties: TieRule,
) -> Result<IntentionGameSpec> {
    if !(2..=MAX_RANDOM_PLAYERS).contains(&players) {
        return Err(Error::InvalidConfig(format!("random games take 2 or 3 players, got {players}")));
    }
    if sizes.len() != players || sizes.iter().any(|&n| n == 0 || n > MAX_RANDOM_ACTIONS) {
        return Err(Error::InvalidConfig(format!(
            "random games need {players} action counts in 1..={MAX_RANDOM_ACTIONS}, got {sizes:?}"
        )));
    }
    let tables: Vec<Vec<f64>> = (0..players).map(|i| draw_table(sizes, i, seed, 0, ties)).collect();
    make_matrix(sizes, tables, bonus_from_mode(bonus, sizes))
}

/// Private bonus for a table game of the given shape.
pub fn bonus_from_mode(mode: BonusMode, sizes: &[usize]) -> PrivateBonus {
    match mode {
        BonusMode::None => PrivateBonus::None,
        BonusMode::ScaledBy { factor } => PrivateBonus::Scaled { factor },
        BonusMode::AdditiveTable { seed } => PrivateBonus::AdditiveTable {
            values: (0..sizes.len()).map(|i| draw_table(sizes, i, seed, 1, TieRule::Independent)).collect(),
        },
    }
}

/// Finite game from explicit row-major tables, one per player.
pub fn make_matrix(sizes: &[usize], tables: Vec<Vec<f64>>, bonus: PrivateBonus) -> Result<IntentionGameSpec> {
    let table = PayoffTable::new(sizes.to_vec(), tables)?;
    IntentionGameSpec::new(
        "matrix",
        sizes.iter().map(|&len| ActionSet::Finite { len }).collect(),
        PublicPayoff::Table(table),
        bonus,
    )
}

/// Two-player game from row-player and column-player matrices.
pub fn bimatrix(row: &[&[f64]], col: &[&[f64]], bonus: PrivateBonus) -> Result<IntentionGameSpec> {
    let rows = row.len();
    let cols = row.first().map_or(0, |r| r.len());
    if col.len() != rows || row.iter().chain(col).any(|r| r.len() != cols) {
        return Err(Error::InvalidGame("bimatrix shapes differ".into()));
    }
    let flat = |m: &[&[f64]]| m.iter().flat_map(|r| r.iter().copied()).collect::<Vec<_>>();
    make_matrix(&[rows, cols], vec![flat(row), flat(col)], bonus)
}

pub fn matching_pennies() -> IntentionGameSpec {
    bimatrix(&[&[1.0, -1.0], &[-1.0, 1.0]], &[&[-1.0, 1.0], &[1.0, -1.0]], PrivateBonus::None)
        .expect("static game")
}
