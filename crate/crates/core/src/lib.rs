//! Repeated games in which players may hold private payoff bonuses on top
//! of the publicly declared payoffs.
//!
//! The crate covers the game formalism ([`model`]), best-response and Nash
//! solvers ([`solvers`]), honesty/deviation audits ([`equilibria`]), concrete
//! game families ([`games`]), seeded simulation ([`engine`]) and the
//! scenario-driven command line ([`cli`]).

pub mod cli;
pub mod engine;
pub mod equilibria;
pub mod error;
pub mod games;
pub mod model;
pub mod rng;
pub mod solvers;
pub mod sweep;

pub use error::{Error, Result};
