//! Trace files: CSV rows framed by `#` comment lines.
//!
//! ```text
//! # intention-games trace v1
//! # scenario {...}
//! t,contacted,action_0,action_1,u_0,u_1,v_0,v_1,deviant_player,witness,gain,delta_after
//! 1,0,0.41666666666666669,0.25000000000000000,...
//! # final tau=100 delta=100 c_sum=4.1666666666666671;0.46296296296296302 verdict=completed
//! ```
//!
//! The scenario line carries the effective scenario (seed overrides applied)
//! so the game can be rebuilt for re-scanning.

use crate::engine::{Deviation, IterationRecord, RunTrace, Verdict};
use crate::equilibria::Breach;
use crate::error::{Error, Result};
use crate::model::{Action, ActionProfile, ActionSet, BitString, IntentionGameSpec};

use super::scenario::Scenario;

pub const MAGIC: &str = "# intention-games trace v1";
const SCENARIO_PREFIX: &str = "# scenario ";
const FINAL_PREFIX: &str = "# final ";

/// Real number with 17 significant digits, which round-trips every `f64`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // log10 can misjudge the exponent right at a power of ten
        let digits = s.bytes().filter(u8::is_ascii_digit).skip_while(|&b| b == b'0').count();
        if digits == 17 || decimals == 0 {
            return s;
        }
        let decimals = if digits > 17 { decimals.saturating_sub(digits - 17) } else { decimals + 17 - digits };
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("trace: bad {what} {s:?}")))
}

pub fn fmt_action(a: &Action) -> String {
    match a {
        Action::Index(i) => i.to_string(),
        Action::Quantity(q) => fmt_real(*q),
        Action::Bits(b) => b.to_string(),
    }
}

fn parse_action(set: &ActionSet, s: &str) -> Result<Action> {
    let action = match set {
        ActionSet::Finite { .. } => Action::Index(
            s.parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("trace: bad action index {s:?}")))?,
        ),
        ActionSet::Interval { .. } => Action::Quantity(parse_real(s, "quantity")?),
        ActionSet::BitSpace { .. } => Action::Bits(BitString::parse(s)?),
    };
    if !set.contains(&action) {
        return Err(Error::InvalidConfig(format!("trace: action {s:?} outside its action set")));
    }
    Ok(action)
}

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Completed => "completed",
        Verdict::TargetReached => "target_reached",
        Verdict::Terminated(Breach::Honesty) => "honesty_breach",
        Verdict::Terminated(Breach::Deviation) => "deviation_breach",
    }
}

fn parse_verdict(s: &str) -> Result<Verdict> {
    Ok(match s {
        "completed" => Verdict::Completed,
        "target_reached" => Verdict::TargetReached,
        "honesty_breach" => Verdict::Terminated(Breach::Honesty),
        "deviation_breach" => Verdict::Terminated(Breach::Deviation),
        _ => return Err(Error::InvalidConfig(format!("trace: unknown verdict {s:?}"))),
    })
}

pub fn header(players: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "contacted".to_string()];
    for prefix in ["action", "u", "v"] {
        h.extend((0..players).map(|i| format!("{prefix}_{i}")));
    }
    h.extend(["deviant_player", "witness", "gain", "delta_after"].map(String::from));
    h
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("trace: {e}"))
}

/// Serialize a run. Output is a pure function of its inputs.
pub fn write_trace(scenario: &Scenario, trace: &RunTrace) -> String {
    let p = trace.players;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header(p)).expect("in-memory write");
    for r in &trace.records {
        let mut row = vec![r.t.to_string(), r.contacted.map_or("-1".into(), |c| c.to_string())];
        row.extend(r.realized.actions().iter().map(fmt_action));
        row.extend(r.payoffs_public.iter().copied().map(fmt_real));
        row.extend(r.payoffs_private.iter().copied().map(fmt_real));
        match &r.deviant {
            Some(d) => row.extend([d.player.to_string(), fmt_action(&d.witness), fmt_real(d.gain)]),
            None => row.extend(["-1".to_string(), String::new(), fmt_real(0.0)]),
        }
        row.push(r.delta_after.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8");
    let s = &trace.final_state;
    let c_sum: Vec<String> = s.c_sum.iter().copied().map(fmt_real).collect();
    format!(
        "{MAGIC}\n{SCENARIO_PREFIX}{}\n{body}{FINAL_PREFIX}tau={} delta={} c_sum={} verdict={}\n",
        scenario.to_json(),
        s.tau,
        s.delta,
        c_sum.join(";"),
        verdict_label(trace.verdict)
    )
}

/// Final audit fields as recorded in the trace trailer.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedFinal {
    pub tau: u64,
    pub delta: u64,
    pub c_sum: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct ParsedTrace {
    pub scenario: Scenario,
    pub records: Vec<IterationRecord>,
    pub recorded: RecordedFinal,
}

fn parse_final(line: &str, players: usize) -> Result<RecordedFinal> {
    let bad = || Error::InvalidConfig(format!("trace: malformed final line {line:?}"));
    let mut tau = None;
    let mut delta = None;
    let mut c_sum = None;
    let mut verdict = None;
    for field in line.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        match key {
            "tau" => tau = Some(value.parse::<u64>().map_err(|_| bad())?),
            "delta" => delta = Some(value.parse::<u64>().map_err(|_| bad())?),
            "c_sum" => {
                c_sum = Some(value.split(';').map(|v| parse_real(v, "c_sum")).collect::<Result<Vec<_>>>()?)
            }
            "verdict" => verdict = Some(parse_verdict(value)?),
            _ => return Err(bad()),
        }
    }
    let recorded = RecordedFinal {
        tau: tau.ok_or_else(bad)?,
        delta: delta.ok_or_else(bad)?,
        c_sum: c_sum.ok_or_else(bad)?,
        verdict: verdict.ok_or_else(bad)?,
    };
    if recorded.c_sum.len() != players {
        return Err(bad());
    }
    Ok(recorded)
}

/// Parse a trace. The game is rebuilt from the embedded scenario so actions
/// can be decoded by their action-set kind.
pub fn read_trace(text: &str) -> Result<(ParsedTrace, IntentionGameSpec)> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(Error::InvalidConfig("trace: missing header line".into()));
    }
    let scenario_json = lines
        .next()
        .and_then(|l| l.strip_prefix(SCENARIO_PREFIX))
        .ok_or_else(|| Error::InvalidConfig("trace: missing scenario line".into()))?;
    let scenario = Scenario::parse(scenario_json)?;
    let spec = scenario.build()?.spec;
    let p = spec.players();

    let finals: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix(FINAL_PREFIX)).collect();
    let [final_line] = finals[..] else {
        return Err(Error::InvalidConfig("trace: expected exactly one final line".into()));
    };
    let recorded = parse_final(final_line, p)?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let head: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if head != header(p) {
        return Err(Error::InvalidConfig(format!("trace: columns {head:?} do not match a {p}-player game")));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        let f: Vec<&str> = row.iter().collect();
        let int = |s: &str, what: &str| -> Result<i64> {
            s.parse::<i64>().map_err(|_| Error::InvalidConfig(format!("trace: bad {what} {s:?}")))
        };
        let t = int(f[0], "iteration")?;
        let contacted = int(f[1], "contacted")?;
        let actions = (0..p).map(|i| parse_action(spec.action_set(i), f[2 + i])).collect::<Result<Vec<_>>>()?;
        let payoffs_public = (0..p).map(|i| parse_real(f[2 + p + i], "payoff")).collect::<Result<Vec<_>>>()?;
        let payoffs_private = (0..p).map(|i| parse_real(f[2 + 2 * p + i], "payoff")).collect::<Result<Vec<_>>>()?;
        let base = 2 + 3 * p;
        let deviant_player = int(f[base], "deviant player")?;
        let gain = parse_real(f[base + 2], "gain")?;
        let deviant = match deviant_player {
            -1 => None,
            d if (0..p as i64).contains(&d) => Some(Deviation {
                player: d as usize,
                witness: parse_action(spec.action_set(d as usize), f[base + 1])?,
                gain,
            }),
            d => return Err(Error::InvalidConfig(format!("trace: deviant player {d} out of range"))),
        };
        let delta_after = int(f[base + 3], "delta")?;
        if t < 1 || contacted < -1 || contacted >= p as i64 || delta_after < 0 {
            return Err(Error::InvalidConfig(format!("trace: row {t} has out-of-range fields")));
        }
        records.push(IterationRecord {
            t: t as u64,
            realized: ActionProfile::new(actions),
            contacted: usize::try_from(contacted).ok(),
            deviant,
            payoffs_public,
            payoffs_private,
            delta_after: delta_after as u64,
        });
    }
    for (k, r) in records.iter().enumerate() {
        if r.t != k as u64 + 1 {
            return Err(Error::InvalidConfig(format!("trace: row {} has iteration {}", k + 1, r.t)));
        }
    }
    Ok((ParsedTrace { scenario, records, recorded }, spec))
}
