mod common;

use intention_games::engine::{self, refold, validate_k_intention, KCheck, RunConfig, RunTrace, Verdict};
use intention_games::equilibria::{termination_check, AuditState, Breach, Termination};
use intention_games::games::{make_cournot, make_keydisc, matrix, CournotConfig, KeyDiscConfig};
use intention_games::model::{ActionProfile, Schedule};
use intention_games::Error;

fn cournot() -> intention_games::model::IntentionGameSpec {
    make_cournot(&CournotConfig::default()).unwrap()
}

fn check_records(spec: &intention_games::model::IntentionGameSpec, trace: &RunTrace) {
    for (k, r) in trace.records.iter().enumerate() {
        assert_eq!(r.t, k as u64 + 1);
        for i in 0..trace.players {
            assert!(r.payoffs_private[i] >= r.payoffs_public[i]);
        }
        if let Some(d) = &r.deviant {
            assert!(d.gain > 0.0);
            let moved = r.realized.with_action(d.player, d.witness.clone());
            let improvement = spec.public_payoff(d.player, &moved) - spec.public_payoff(d.player, &r.realized);
            assert!((improvement - d.gain).abs() < 1e-12);
        }
    }
}

#[test]
fn always_contacted_firm_plays_the_reflection_profile() {
    let g = cournot();
    let trace = engine::run(&g, &Schedule::Always { player: 0 }, &RunConfig::unbounded(10, 1)).unwrap();
    assert_eq!(trace.records.len(), 10);
    for r in &trace.records {
        let a = r.realized.actions();
        assert!((common::quantity(&a[0]) - 5.0 / 12.0).abs() < 1e-12);
        assert_eq!(common::quantity(&a[1]), 0.25);
        assert_eq!(r.contacted, Some(0));
        assert_eq!(r.deviant.as_ref().unwrap().player, 0);
    }
    assert_eq!(trace.final_state.delta, 10);
    assert_eq!(trace.verdict, Verdict::Completed);
    check_records(&g, &trace);
}

#[test]
fn uncontacted_firms_stay_at_nash() {
    let g = cournot();
    let trace = engine::run(&g, &Schedule::Never, &RunConfig::unbounded(10, 1)).unwrap();
    assert!(trace.records.iter().all(|r| r.realized == ActionProfile::quantities(&[0.25, 0.25])));
    assert!(trace.records.iter().all(|r| r.deviant.is_none() && r.contacted.is_none()));
    assert_eq!(trace.final_state.delta, 0);
}

#[test]
fn honesty_bound_stops_after_the_fifth_iteration() {
    let g = cournot();
    let cfg = RunConfig { delta_0: Some(4), ..RunConfig::unbounded(50, 1) };
    let trace = engine::run(&g, &Schedule::Always { player: 0 }, &cfg).unwrap();
    assert_eq!(trace.records.len(), 5);
    assert_eq!(trace.verdict, Verdict::Terminated(Breach::Honesty));
    assert_eq!(trace.final_state.delta, 5);
}

#[test]
fn early_stop_is_at_the_first_breach() {
    let g = cournot();
    for (d0, m0, probs) in [(Some(3), None, [0.3, 0.2]), (None, Some(0.01), [0.5, 0.0]), (Some(10), Some(0.02), [0.4, 0.4])] {
        let cfg = RunConfig { delta_0: d0, mu_0: m0, ..RunConfig::unbounded(400, 8) };
        let trace = engine::run(&g, &Schedule::Bernoulli { probs: probs.to_vec() }, &cfg).unwrap();
        let Verdict::Terminated(_) = trace.verdict else { panic!("expected a breach for {d0:?} {m0:?}") };
        let n = trace.records.len();
        let before = refold(&g, &trace.records[..n - 1], d0, m0).unwrap();
        let after = refold(&g, &trace.records, d0, m0).unwrap();
        assert_eq!(termination_check(&before), Termination::Continue);
        assert!(matches!(termination_check(&after), Termination::Terminate(_)));
        // every shorter prefix continues as well
        let mut s = AuditState::new(2, d0, m0);
        for r in &trace.records[..n - 1] {
            s = intention_games::equilibria::honesty_update(&s, &g, &r.realized).unwrap();
            assert_eq!(termination_check(&s), Termination::Continue);
        }
    }
}

#[test]
fn k_intention_checks() {
    let g = cournot();
    assert_eq!(
        validate_k_intention(&g, &Schedule::Explicit { contacts: vec![vec![0], vec![], vec![1]] }, 3, 0),
        KCheck::Ok
    );
    let both = Schedule::Explicit { contacts: vec![vec![], vec![0, 1]] };
    assert_eq!(validate_k_intention(&g, &both, 5, 0), KCheck::Violation { t: 2, players: vec![0, 1] });
    assert!(matches!(
        engine::run(&g, &both, &RunConfig::unbounded(5, 0)),
        Err(Error::KIntention { t: 2, .. })
    ));
    let key = make_keydisc(&KeyDiscConfig::new(4, 5, 2, 3)).unwrap();
    assert_eq!(validate_k_intention(&key.spec, &key.schedule, 10_000, 3), KCheck::Ok);
}

#[test]
fn runs_are_deterministic() {
    let g = cournot();
    let s = Schedule::Bernoulli { probs: vec![0.3, 0.3] };
    let a = engine::run(&g, &s, &RunConfig::unbounded(300, 77)).unwrap();
    let b = engine::run(&g, &s, &RunConfig::unbounded(300, 77)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = engine::run(&g, &s, &RunConfig::unbounded(300, 78)).unwrap();
    assert_ne!(a.records, c.records);

    let key = KeyDiscConfig::new(8, 3, 3, 5);
    let x = intention_games::games::run_keydisc_to_honesty(&key).unwrap().1;
    let y = intention_games::games::run_keydisc_to_honesty(&key).unwrap().1;
    assert_eq!(serde_json::to_string(&x).unwrap(), serde_json::to_string(&y).unwrap());
}

#[test]
fn final_state_matches_oracle_refold() {
    let g = cournot();
    for seed in 0..10 {
        let trace = engine::run(&g, &Schedule::Bernoulli { probs: vec![0.25, 0.5] }, &RunConfig::new(150, seed)).unwrap();
        let again = refold(&g, &trace.records, trace.final_state.delta_0, trace.final_state.mu_0).unwrap();
        assert_eq!(again, trace.final_state);
        check_records(&g, &trace);
    }
}

#[test]
fn matrix_runs_use_the_first_nash_anchor() {
    // coordination game with Nash (0,0) and (1,1); a large bonus moves player 0 to row 1
    let g = matrix::bimatrix(
        &[&[2.0, 0.0], &[0.0, 1.0]],
        &[&[1.0, 0.0], &[0.0, 2.0]],
        intention_games::model::PrivateBonus::AdditiveTable { values: vec![vec![0.0, 0.0, 5.0, 0.0], vec![0.0; 4]] },
    )
    .unwrap();
    let trace = engine::run(&g, &Schedule::Explicit { contacts: vec![vec![], vec![0]] }, &RunConfig::unbounded(3, 0)).unwrap();
    let ix: Vec<Vec<usize>> = trace.records.iter().map(|r| common::indices_of(&r.realized)).collect();
    assert_eq!(ix, vec![vec![0, 0], vec![1, 0], vec![0, 0]]);
    assert_eq!(trace.final_state.delta, 1);
    check_records(&g, &trace);
}

#[test]
fn games_without_pure_nash_are_refused() {
    let g = matrix::matching_pennies();
    assert!(matches!(engine::run(&g, &Schedule::Never, &RunConfig::unbounded(5, 0)), Err(Error::NoPureNash)));
}

#[test]
fn invalid_schedules_are_refused() {
    let g = cournot();
    assert!(engine::run(&g, &Schedule::Always { player: 3 }, &RunConfig::unbounded(5, 0)).is_err());
    assert!(engine::run(&g, &Schedule::Bernoulli { probs: vec![0.9, 0.9] }, &RunConfig::unbounded(5, 0)).is_err());
}
