use thiserror::Error;

use crate::engine::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid action profile: {0}")]
    InvalidProfile(String),

    #[error("player {player} out of range for a {players}-player game")]
    InvalidPlayer { player: usize, players: usize },

    #[error("iteration {t} outside recorded history of {available} iterations")]
    IterationOutOfRange { t: u64, available: u64 },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("k-intention violation at iteration {t}: players {players:?} hold a private bonus")]
    KIntention { t: u64, players: Vec<usize> },

    #[error("public image has no pure Nash profile; use the two-player mixed path")]
    NoPureNash,

    #[error("deviation estimate undefined before the first iteration")]
    UndefinedEstimate,

    #[error("iteration cap {cap} reached before the honesty target")]
    IterationCap { cap: u64, trace: Box<RunTrace> },
}
