//! Audit reports recomputed from a trace file.
//!
//! Every row is replayed against the rebuilt game: contacts, payoffs,
//! deviation attribution and the running honesty counter must match, and the
//! trailer must match a fresh fold over the realized profiles.

use std::fmt::Write as _;

use crate::engine::{attribute, Verdict};
use crate::equilibria::{honesty_update, mu_observer, scan_profile, termination_check, AuditState, Termination};
use crate::error::Error;
use crate::model::Round;

use super::trace_io::{read_trace, verdict_label, ParsedTrace};

#[derive(Debug)]
pub enum ReportFailure {
    /// Unreadable or schema-invalid trace.
    Invalid(Error),
    /// The trace parses but disagrees with its own re-scan.
    Integrity(String),
}

impl From<Error> for ReportFailure {
    fn from(e: Error) -> Self {
        ReportFailure::Invalid(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Audit {
    pub game: String,
    pub state: AuditState,
    pub verdict: Verdict,
}

fn bound<T: ToString>(b: Option<T>) -> String {
    b.map_or_else(|| "inf".to_string(), |v| v.to_string())
}

/// Fixed field order, five decimals for every real.
pub fn render(audit: &Audit) -> String {
    let s = &audit.state;
    let est = mu_observer(s).expect("audits cover at least one iteration");
    let mut out = String::new();
    writeln!(out, "game: {}", audit.game).unwrap();
    writeln!(out, "tau: {}", s.tau).unwrap();
    writeln!(out, "delta: {}", s.delta).unwrap();
    writeln!(out, "delta_bound: {}", bound(s.delta_0)).unwrap();
    writeln!(out, "mu_bound: {}", bound(s.mu_0.map(|m| format!("{m:.5}")))).unwrap();
    for (j, mu) in est.per_player_mu.iter().enumerate() {
        writeln!(out, "mu[{j}]: {mu:.5}").unwrap();
    }
    writeln!(out, "mu_max: {:.5}", est.mu_max).unwrap();
    writeln!(out, "mu_min: {:.5}", est.mu_min).unwrap();
    writeln!(out, "verdict: {}", verdict_label(audit.verdict)).unwrap();
    out
}

fn mismatch(what: impl Into<String>) -> ReportFailure {
    ReportFailure::Integrity(what.into())
}

/// Parse `text` and replay it; the returned audit comes from the replay,
/// never from the recorded trailer.
pub fn audit_trace(text: &str) -> Result<Audit, ReportFailure> {
    let (ParsedTrace { scenario, records, recorded }, spec) = read_trace(text)?;
    if records.is_empty() {
        return Err(Error::InvalidConfig("trace has no iterations; a report needs tau >= 1".into()).into());
    }
    let built = scenario.build()?;
    let (schedule, run) = (&built.schedule, &built.run);
    let p = spec.players();

    let mut state = AuditState::new(p, run.delta_0, run.mu_0);
    let mut prev_contacts: Vec<usize> = Vec::new();
    for (k, r) in records.iter().enumerate() {
        let t = r.t;
        let contacts = schedule.contacts(t, run.seed);
        let mut round = Round::new(t, &contacts);
        if k > 0 {
            round = round.with_previous(&prev_contacts, &records[k - 1].realized);
        }
        if r.contacted != contacts.first().copied() {
            return Err(mismatch(format!("t={t}: contacted column disagrees with the schedule")));
        }
        for i in 0..p {
            let u = spec.public_payoff(i, &r.realized);
            let v = u + spec.private_bonus(i, &r.realized, &round);
            if r.payoffs_public[i] != u || r.payoffs_private[i] != v {
                return Err(mismatch(format!("t={t}: payoffs of player {i} disagree with the game")));
            }
        }
        let scans = scan_profile(&spec, &r.realized);
        if attribute(&scans) != r.deviant {
            return Err(mismatch(format!("t={t}: deviant attribution disagrees with the re-scan")));
        }
        state = honesty_update(&state, &spec, &r.realized)?;
        if state.delta != r.delta_after {
            return Err(mismatch(format!("t={t}: delta_after {} but re-scan gives {}", r.delta_after, state.delta)));
        }
        prev_contacts = contacts;
        let stops = run.target_delta.is_some_and(|d| state.delta >= d)
            || matches!(termination_check(&state), Termination::Terminate(_));
        if stops && k + 1 < records.len() {
            return Err(mismatch(format!("run should have stopped at t={t}")));
        }
    }

    if recorded.tau != state.tau || recorded.delta != state.delta {
        return Err(mismatch(format!(
            "final line tau={} delta={} but re-scan gives tau={} delta={}",
            recorded.tau, recorded.delta, state.tau, state.delta
        )));
    }
    if recorded.c_sum != state.c_sum {
        return Err(mismatch("final c_sum disagrees with the re-scan"));
    }

    let verdict = if run.target_delta.is_some_and(|d| state.delta >= d) {
        Verdict::TargetReached
    } else if let Termination::Terminate(b) = termination_check(&state) {
        Verdict::Terminated(b)
    } else if state.tau == run.tau_max {
        Verdict::Completed
    } else {
        return Err(mismatch(format!("trace stops at tau={} without a reason", state.tau)));
    };
    if verdict != recorded.verdict {
        return Err(mismatch(format!(
            "recorded verdict {} but re-scan gives {}",
            verdict_label(recorded.verdict),
            verdict_label(verdict)
        )));
    }
    Ok(Audit { game: scenario.family().to_string(), state, verdict })
}
