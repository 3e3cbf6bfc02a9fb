//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{all_profiles, argmax_set, brute_nash, cournot_u, indices_of, profile, with};
use intention_games::cli::run_cli;
use intention_games::engine::{self, refold, RunConfig, RunTrace};
use intention_games::equilibria::{honesty_update, mu_observer, AuditState};
use intention_games::games::keydisc::false_announcement_rate;
use intention_games::games::matrix::{make_random_matrix, BonusMode};
use intention_games::games::{make_cournot, make_keydisc, run_keydisc_to_honesty, CournotConfig, KeyDiscConfig};
use intention_games::model::interval::{grid_golden_argmax, DEFAULT_GRID_POINTS};
use intention_games::model::{deviance_test, ActionProfile, GameView, IntentionGameSpec, Round, Schedule};
use intention_games::solvers::{public_pure_nash, reflection_best_response_profiles};
use intention_games::sweep::{self, Execution};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took < limit {
        Ok(())
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn cournot() -> IntentionGameSpec {
    make_cournot(&CournotConfig::default()).unwrap()
}

fn cournot_reproduction() -> Outcome {
    let start = Instant::now();
    let g = cournot();
    let nash = public_pure_nash(&g).map_err(|e| e.to_string())?;
    ensure!(nash == vec![ActionProfile::quantities(&[0.25, 0.25])], "public Nash {nash:?}");

    let contacts = [0];
    let round = Round::new(1, &contacts);
    let r = reflection_best_response_profiles(&g, 0, &round).map_err(|e| e.to_string())?;
    let q0 = common::quantity(r.profiles[0].get(0));
    ensure!((q0 - 5.0 / 12.0).abs() < 1e-9, "closed-form reflection BR {q0}");
    let (grid, _) = grid_golden_argmax(
        |q| g.view_payoff(GameView::SelfReflection(0), 0, &ActionProfile::quantities(&[q, 0.25]), &round),
        0.0,
        1.0,
        DEFAULT_GRID_POINTS,
    );
    ensure!((grid - 5.0 / 12.0).abs() < 1e-4, "grid reflection BR {grid}");

    let trace = engine::run(&g, &Schedule::Always { player: 0 }, &RunConfig::unbounded(100, 42)).map_err(|e| e.to_string())?;
    let mu = mu_observer(&trace.final_state).map_err(|e| e.to_string())?.per_player_mu[0];
    ensure!((mu - 0.04167).abs() < 1e-5, "mu {mu}");

    let fallout = cournot_u(0.25, 5.0 / 12.0);
    let nash_pay = cournot_u(0.25, 0.25);
    let engine_fallout = trace.records[0].payoffs_public[1];
    ensure!(engine_fallout == g.public_payoff(1, &trace.records[0].realized), "fallout not from realized profile");
    ensure!((engine_fallout - 0.05208).abs() < 1e-5 && (fallout - engine_fallout).abs() < 1e-12, "fallout {engine_fallout}");
    ensure!((nash_pay - 0.09375).abs() < 1e-5 && engine_fallout < nash_pay, "Nash payoff {nash_pay}");
    within_time(start, Duration::from_secs(1))?;
    Ok(format!("BR {q0:.5} grid {grid:.5} mu {mu:.5} fallout {engine_fallout:.5} < {nash_pay:.5}"))
}

fn random_shape(seed: u64) -> Vec<usize> {
    let players = 2 + (seed % 2) as usize;
    (0..players).map(|i| 2 + ((seed / 2 + 7 * i as u64 + seed / 5) % 4) as usize).collect()
}

fn deviance_equivalence() -> Outcome {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..1000).collect();
    let results = sweep::map(&seeds, Execution::Parallel, |&seed| -> Result<(usize, Vec<String>), String> {
        let sizes = random_shape(seed);
        let bonus = if seed % 2 == 0 {
            BonusMode::AdditiveTable { seed: seed.wrapping_mul(0x9e37_79b9) }
        } else {
            BonusMode::ScaledBy { factor: 2.0 }
        };
        let g = make_random_matrix(sizes.len(), &sizes, bonus, seed).map_err(|e| e.to_string())?;
        let nash = brute_nash(&g);
        let mut checked = 0;
        let mut bad = Vec::new();
        for i in 0..sizes.len() {
            let contacts = [i];
            let r = reflection_best_response_profiles(&g, i, &Round::new(1, &contacts)).map_err(|e| e.to_string())?;
            for p in &r.profiles {
                checked += 1;
                let deviant = deviance_test(&g, i, p).map_err(|e| e.to_string())?.is_deviant();
                if deviant == nash.contains(&indices_of(p)) {
                    bad.push(format!("seed {seed} player {i} profile {p}"));
                }
            }
        }
        Ok((checked, bad))
    });
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in results {
        let (c, b) = r?;
        checked += c;
        bad.extend(b);
    }
    ensure!(bad.is_empty(), "{} counterexamples, first: {}", bad.len(), bad[0]);
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("1000 games, {checked} reflection profiles, 0 counterexamples"))
}

fn degeneration() -> Outcome {
    let mut engine_runs = 0;
    let mut games = 0;
    for seed in 0..100u64 {
        let factor = [1.5, 2.0, 10.0][(seed % 3) as usize];
        let sizes = random_shape(seed + 5000);
        let g = make_random_matrix(sizes.len(), &sizes, BonusMode::ScaledBy { factor }, seed).map_err(|e| e.to_string())?;
        games += 1;
        for i in 0..sizes.len() {
            let contacts = [i];
            let round = Round::new(1, &contacts);
            for ix in all_profiles(&sizes).into_iter().filter(|ix| ix[i] == 0) {
                let set = |view| argmax_set(sizes[i], |a| g.view_payoff(view, i, &profile(&with(&ix, i, a)), &round));
                ensure!(
                    set(GameView::PublicImage) == set(GameView::SelfReflection(i)),
                    "seed {seed} player {i} complement {ix:?}"
                );
            }
        }
        if !brute_nash(&g).is_empty() {
            let schedule = Schedule::Cyclic { order: (0..sizes.len()).collect() };
            let trace = engine::run(&g, &schedule, &RunConfig::unbounded(100, seed)).map_err(|e| e.to_string())?;
            let mu = mu_observer(&trace.final_state).map_err(|e| e.to_string())?;
            ensure!(trace.final_state.delta == 0 && mu.mu_max == 0.0, "seed {seed}: delta {} mu_max {}", trace.final_state.delta, mu.mu_max);
            engine_runs += 1;
        }

        let plain = make_random_matrix(sizes.len(), &sizes, BonusMode::None, seed).map_err(|e| e.to_string())?;
        let everyone: Vec<usize> = (0..sizes.len()).collect();
        let round = Round::new(1, &everyone);
        for ix in all_profiles(&sizes) {
            let p = profile(&ix);
            for i in 0..sizes.len() {
                ensure!(
                    plain.view_payoff(GameView::PublicImage, i, &p, &round)
                        == plain.view_payoff(GameView::SelfReflection(i), i, &p, &round),
                    "v = u differs at seed {seed} {ix:?}"
                );
            }
        }
    }
    ensure!(engine_runs > 0, "no game with a pure Nash to run");
    Ok(format!("{games} games, argmax sets equal; {engine_runs} engine runs with delta 0 and mu_max 0"))
}

fn tracker_equivalence() -> Outcome {
    let g = cournot();
    let mut iterations = 0;
    for seed in 0..100u64 {
        let probs = vec![(seed % 7) as f64 / 14.0, (seed % 5) as f64 / 10.0];
        let schedule = Schedule::Bernoulli { probs };
        let trace = engine::run(&g, &schedule, &RunConfig::unbounded(200, seed)).map_err(|e| e.to_string())?;
        ensure!(trace.records.len() == 200, "seed {seed} stopped early");
        let mut prev = 0;
        for (k, r) in trace.records.iter().enumerate() {
            // full re-scan of the prefix, one profile at a time from scratch
            let full = trace.records[..=k]
                .iter()
                .map(|x| honesty_update(&AuditState::new(2, None, None), &g, &x.realized).map(|s| s.delta))
                .sum::<Result<u64, _>>()
                .map_err(|e| e.to_string())?;
            ensure!(full == r.delta_after, "seed {seed} t={}: incremental {} vs rescan {full}", r.t, r.delta_after);
            ensure!(r.delta_after - prev <= 1, "seed {seed} t={}: jump of {}", r.t, r.delta_after - prev);
            prev = r.delta_after;
            iterations += 1;
        }
        ensure!(refold(&g, &trace.records, None, None).map_err(|e| e.to_string())? == trace.final_state, "seed {seed} refold");
    }
    Ok(format!("100 schedules, {iterations} iterations, rescans agree"))
}

fn observer_convergence() -> Outcome {
    let start = Instant::now();
    let g = cournot();
    let schedule = Schedule::Bernoulli { probs: vec![0.5, 0.0] };
    let seeds: Vec<u64> = (0..20).collect();
    let mus = sweep::map(&seeds, Execution::Parallel, |&seed| {
        engine::run(&g, &schedule, &RunConfig::unbounded(10_000, seed))
            .and_then(|t| mu_observer(&t.final_state))
            .map(|e| e.per_player_mu[0])
    });
    let mus = mus.into_iter().collect::<Result<Vec<f64>, _>>().map_err(|e| e.to_string())?;
    let mean = mus.iter().sum::<f64>() / mus.len() as f64;
    let target = 0.02083;
    ensure!((mean - target).abs() <= 0.05 * target, "mean mu {mean} vs {target}");
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("mean mu {mean:.5} over 20 seeds"))
}

fn announcement_rounds(game_order: &[usize], trace: &RunTrace) -> Result<(), String> {
    let tau = trace.records.len();
    // the negotiator visits order[(t-1) mod p]; with an empty complement every visit succeeds
    let expected: Vec<(usize, usize)> =
        (1..tau).map(|visit| (visit + 1, game_order[(visit - 1) % game_order.len()])).collect();
    let seen: Vec<(usize, usize)> = trace
        .records
        .iter()
        .filter_map(|r| r.deviant.as_ref().map(|d| (r.t as usize, d.player)))
        .collect();
    ensure!(seen == expected, "deviant rounds {seen:?}, expected {expected:?}");
    Ok(())
}

fn key_discovery() -> Outcome {
    let start = Instant::now();
    let mut worst_tau = 0;
    for seed in 0..50u64 {
        let cfg = KeyDiscConfig::new(8, 3, 2, seed);
        let game = make_keydisc(&cfg).map_err(|e| e.to_string())?;
        let (tau, trace) = run_keydisc_to_honesty(&cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(trace.final_state.delta == 2 && tau <= 20, "seed {seed}: tau {tau} delta {}", trace.final_state.delta);
        announcement_rounds(&game.order, &trace).map_err(|e| format!("seed {seed}: {e}"))?;
        worst_tau = worst_tau.max(tau);

        if seed == 0 {
            let n = 100_000u64;
            let p = game.announce_set(0).len() as f64 / 256.0;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            for i in 0..3 {
                let rate = false_announcement_rate(&game.spec, i, n, 99, Execution::Parallel).map_err(|e| e.to_string())?;
                ensure!((rate - p).abs() <= 3.0 * se, "player {i}: rate {rate} vs {p} (se {se})");
            }
        }
    }
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("50 seeds reach delta 2, max tau {worst_tau}; announcement rates within 3 SE"))
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["intention-games"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let scenarios = [
        r#"{"game":{"family":"cournot"},"run":{"iterations":500,"seed":7,"delta_0":"inf"},"schedule":{"rule":"bernoulli","probs":[0.3,0.2]}}"#,
        r#"{"game":{"family":"keydisc","lambda":8,"players":3,"required":2},"run":{"iterations":100,"seed":42}}"#,
        r#"{"game":{"family":"matrix","sizes":[3,4],"bonus":{"mode":"additive_table","seed":3},"seed":0},"run":{"iterations":200,"seed":11,"delta_0":"inf"},"schedule":{"rule":"cyclic","order":[1,0]}}"#,
    ];
    for (k, json) in scenarios.iter().enumerate() {
        let path = dir.path().join(format!("s{k}.json"));
        std::fs::write(&path, json).map_err(|e| e.to_string())?;
        let mut traces = Vec::new();
        let mut reports = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("out{k}_{run}"));
            let (code, text) = cli(&["run", "--scenario", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            ensure!(code == 0 || code == 2, "scenario {k} exited {code}: {text}");
            traces.push(std::fs::read(out.join("trace.csv")).map_err(|e| e.to_string())?);
            reports.push(std::fs::read(out.join("report.txt")).map_err(|e| e.to_string())?);
        }
        ensure!(traces[0] == traces[1], "scenario {k}: traces differ");
        ensure!(reports[0] == reports[1], "scenario {k}: reports differ");
        let trace_path = dir.path().join(format!("out{k}_0/trace.csv"));
        let (code, replayed) = cli(&["report", trace_path.to_str().unwrap()]);
        ensure!(code == 0 || code == 2, "scenario {k}: report exited {code}: {replayed}");
        ensure!(replayed.as_bytes() == reports[0].as_slice(), "scenario {k}: report replay differs");
    }
    Ok(format!("{} scenarios byte-identical across runs and report replay", scenarios.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("cournot reproduction", cournot_reproduction),
        ("deviance equivalence on 1000 random games", deviance_equivalence),
        ("degeneration under scaled and absent bonus", degeneration),
        ("honesty tracker equals rescan", tracker_equivalence),
        ("observer mu convergence", observer_convergence),
        ("key discovery termination", key_discovery),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {}: {name} ({detail}) [{took:.2?}]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why}) [{took:.2?}]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
