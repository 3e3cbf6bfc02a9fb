//! Concrete game families.

pub mod cournot;
pub mod keydisc;
pub mod matrix;

pub use cournot::{make_cournot, CournotConfig};
pub use keydisc::{make_keydisc, run_keydisc_to_honesty, KeyDiscConfig, KeyDiscGame};
pub use matrix::{make_matrix, make_random_matrix, BonusMode, TieRule};
