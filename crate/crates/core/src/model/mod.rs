//! Game formalism: actions, public and private payoffs, views, and the
//! public deviation test.

mod action;
mod deviation;
mod game;
pub mod interval;
mod schedule;

pub use action::{sort_dedup_profiles, Action, ActionProfile, ActionSet, BitString, ENUMERATION_LIMIT};
pub use deviation::{
    deviance_test, in_deviant_set, max_deviation_gain, scan_public_deviation, Deviance, DeviationScan,
};
pub(crate) use deviation::all_maximizers;
pub use game::{
    evaluate_payoff, GameView, History, IntentionGameSpec, IntervalSearch, PayoffTable, Previous,
    PrivateBonus, PublicPayoff, Round, DEVIATION_EPSILON,
};
pub use schedule::Schedule;
