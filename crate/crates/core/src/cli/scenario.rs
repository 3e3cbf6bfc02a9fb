//! Scenario files: a JSON document naming a game family, its parameters,
//! the run settings, the contact schedule and output file names.
//!
//! ```json
//! {
//!   "game": { "family": "cournot", "bonus_rate": 0.5 },
//!   "run": { "iterations": 100, "seed": 42, "delta_0": "inf", "mu_0": "inf" },
//!   "schedule": { "rule": "always", "player": 0 },
//!   "outputs": { "trace": "trace.csv", "report": "report.txt" }
//! }
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{HonestPlay, RunConfig};
use crate::error::{Error, Result};
use crate::games::keydisc::{self, KeyDiscConfig};
use crate::games::matrix::{self, BonusMode, TieRule};
use crate::games::{make_cournot, CournotConfig};
use crate::model::{BitString, IntentionGameSpec, Schedule};

/// A contractual bound: a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Value(f64),
    Named(Infinite),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinite {
    Inf,
}

impl Bound {
    fn finite(self) -> Option<f64> {
        match self {
            Bound::Value(v) => Some(v),
            Bound::Named(Infinite::Inf) => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Value(v) => write!(f, "{v}"),
            Bound::Named(_) => f.write_str("inf"),
        }
    }
}

fn default_bonus_rate() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameBlock {
    Cournot {
        #[serde(default = "default_bonus_rate")]
        bonus_rate: f64,
    },
    Keydisc {
        lambda: u8,
        players: usize,
        required: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        kappa_complement: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        announce_size: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        announce_sets: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        negotiator_order: Option<Vec<usize>>,
        #[serde(default)]
        honest_play: HonestPlay,
    },
    Matrix {
        sizes: Vec<usize>,
        /// Explicit row-major tables, one per player; random when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tables: Option<Vec<Vec<f64>>>,
        #[serde(default = "no_bonus")]
        bonus: BonusMode,
        /// Table seed; the run seed when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default)]
        ties: TieRule,
    },
}

fn no_bonus() -> BonusMode {
    BonusMode::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub iterations: u64,
    pub seed: u64,
    /// Defaults to `ceil(iterations / 10)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_0: Option<Bound>,
    /// Defaults to unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_0: Option<Bound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_trace() -> String {
    "trace.csv".into()
}

fn default_report() -> String {
    "report.txt".into()
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { trace: default_trace(), report: default_report() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub game: GameBlock,
    pub run: RunBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Everything needed to run or solve a scenario.
#[derive(Debug, Clone)]
pub struct Built {
    pub spec: IntentionGameSpec,
    pub schedule: Schedule,
    pub run: RunConfig,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("scenario: {e}")))?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    fn check(&self) -> Result<()> {
        if self.run.iterations == 0 {
            return Err(Error::InvalidConfig("run.iterations must be at least 1".into()));
        }
        if matches!(self.game, GameBlock::Keydisc { .. }) && self.schedule.is_some() {
            return Err(Error::InvalidConfig(
                "keydisc scenarios use the negotiator order, not a schedule block".into(),
            ));
        }
        Ok(())
    }

    fn delta_0(&self) -> Result<Option<u64>> {
        match self.run.delta_0 {
            None => Ok(Some(self.run.iterations.div_ceil(10))),
            Some(b) => match b.finite() {
                None => Ok(None),
                Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(Some(v as u64)),
                Some(v) => Err(Error::InvalidConfig(format!("run.delta_0 {v} must be a non-negative integer"))),
            },
        }
    }

    fn mu_0(&self) -> Result<Option<f64>> {
        match self.run.mu_0.and_then(Bound::finite) {
            Some(v) if !(v >= 0.0) => Err(Error::InvalidConfig(format!("run.mu_0 {v} must be >= 0"))),
            other => Ok(other),
        }
    }

    pub fn family(&self) -> &'static str {
        match self.game {
            GameBlock::Cournot { .. } => "cournot",
            GameBlock::Keydisc { .. } => "keydisc",
            GameBlock::Matrix { .. } => "matrix",
        }
    }

    pub fn build(&self) -> Result<Built> {
        let mut run = RunConfig {
            delta_0: self.delta_0()?,
            mu_0: self.mu_0()?,
            ..RunConfig::new(self.run.iterations, self.run.seed)
        };
        let schedule = self.schedule.clone().unwrap_or(Schedule::Never);
        match &self.game {
            GameBlock::Cournot { bonus_rate } => {
                let spec = make_cournot(&CournotConfig {
                    schedule: schedule.clone(),
                    iterations: self.run.iterations,
                    bonus_rate: *bonus_rate,
                })?;
                Ok(Built { spec, schedule, run })
            }
            GameBlock::Matrix { sizes, tables, bonus, seed, ties } => {
                let table_seed = seed.unwrap_or(self.run.seed);
                let spec = match tables {
                    Some(tables) => {
                        let bonus = matrix::bonus_from_mode(*bonus, sizes);
                        matrix::make_matrix(sizes, tables.clone(), bonus)?
                    }
                    None => matrix::make_random_matrix_with(sizes.len(), sizes, *bonus, table_seed, *ties)?,
                };
                schedule.validate(spec.players())?;
                Ok(Built { spec, schedule, run })
            }
            GameBlock::Keydisc {
                lambda,
                players,
                required,
                kappa_complement,
                announce_size,
                announce_sets,
                negotiator_order,
                honest_play,
            } => {
                let split = |s: &str| -> Result<Vec<BitString>> {
                    let want = usize::from(*lambda) * players;
                    if s.len() != want {
                        return Err(Error::InvalidConfig(format!(
                            "key table entry {s:?} needs {want} bits"
                        )));
                    }
                    s.as_bytes()
                        .chunks(usize::from(*lambda))
                        .map(|c| BitString::parse(std::str::from_utf8(c).expect("ascii")))
                        .collect()
                };
                let config = KeyDiscConfig {
                    lambda: *lambda,
                    players: *players,
                    kappa_complement: kappa_complement.iter().map(|s| split(s)).collect::<Result<_>>()?,
                    announce_size: *announce_size,
                    announce_sets: announce_sets
                        .as_ref()
                        .map(|sets| {
                            sets.iter()
                                .map(|set| set.iter().map(|s| BitString::parse(s)).collect::<Result<Vec<_>>>())
                                .collect::<Result<Vec<_>>>()
                        })
                        .transpose()?,
                    negotiator_order: negotiator_order.clone(),
                    required: *required,
                    seed: self.run.seed,
                    honest_play: *honest_play,
                    iteration_cap: self.run.iterations,
                };
                let game = keydisc::make_keydisc(&config)?;
                run.target_delta = Some(*required as u64);
                run.honest_play = *honest_play;
                Ok(Built { spec: game.spec, schedule: game.schedule, run })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cournot_with_infinite_bounds() {
        let s = Scenario::parse(
            r#"{"game":{"family":"cournot"},"run":{"iterations":10,"seed":3,"delta_0":"inf","mu_0":0.03},
                "schedule":{"rule":"always","player":0}}"#,
        )
        .unwrap();
        let built = s.build().unwrap();
        assert_eq!(built.run.delta_0, None);
        assert_eq!(built.run.mu_0, Some(0.03));
        assert_eq!(s.outputs, Outputs::default());
    }

    #[test]
    fn default_delta_bound_is_tenth_of_iterations() {
        let s = Scenario::parse(r#"{"game":{"family":"cournot"},"run":{"iterations":95,"seed":0}}"#).unwrap();
        assert_eq!(s.build().unwrap().run.delta_0, Some(10));
    }

    #[test]
    fn rejects_unknown_family_and_fields() {
        assert!(Scenario::parse(r#"{"game":{"family":"poker"},"run":{"iterations":1,"seed":0}}"#).is_err());
        assert!(Scenario::parse(r#"{"game":{"family":"cournot","rate":1},"run":{"iterations":1,"seed":0}}"#).is_err());
        assert!(Scenario::parse(r#"{"game":{"family":"cournot"},"run":{"iterations":0,"seed":0}}"#).is_err());
        assert!(Scenario::parse(r#"{"game":{"family":"cournot"},"run":{"iterations":5,"seed":-1}}"#).is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let text = r#"{"game":{"family":"matrix","sizes":[2,2],"tables":[[1,0,0,1],[0,1,1,0]],"bonus":{"mode":"scaled_by","factor":2.0}},"run":{"iterations":4,"seed":9,"delta_0":2}}"#;
        let s = Scenario::parse(text).unwrap();
        let again = Scenario::parse(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_json(), again.to_json());
    }

    #[test]
    fn keydisc_table_entries_split_per_player() {
        let s = Scenario::parse(
            r#"{"game":{"family":"keydisc","lambda":2,"players":2,"required":1,"kappa_complement":["0110"]},
                "run":{"iterations":50,"seed":1}}"#,
        )
        .unwrap();
        let built = s.build().unwrap();
        assert_eq!(built.run.target_delta, Some(1));
        let bad = Scenario::parse(
            r#"{"game":{"family":"keydisc","lambda":2,"players":2,"required":1,"kappa_complement":["011"]},
                "run":{"iterations":50,"seed":1}}"#,
        )
        .unwrap();
        assert!(bad.build().is_err());
    }
}
