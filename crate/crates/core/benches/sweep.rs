use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use intention_games::engine::{self, RunConfig};
use intention_games::equilibria::mu_observer;
use intention_games::games::keydisc::false_announcement_rate;
use intention_games::games::matrix::{make_random_matrix, BonusMode};
use intention_games::games::{make_cournot, make_keydisc, CournotConfig, KeyDiscConfig};
use intention_games::model::Schedule;
use intention_games::solvers::public_pure_nash;
use intention_games::sweep::{self, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cournot_seed_sweep(c: &mut Criterion) {
    let g = make_cournot(&CournotConfig::default()).unwrap();
    let schedule = Schedule::Bernoulli { probs: vec![0.5, 0.0] };
    let seeds: Vec<u64> = (0..32).collect();
    let mut group = c.benchmark_group("cournot_seed_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sweep::map(&seeds, exec, |&seed| {
                    let trace = engine::run(&g, &schedule, &RunConfig::unbounded(2_000, seed)).unwrap();
                    mu_observer(&trace.final_state).unwrap().mu_max
                })
            })
        });
    }
    group.finish();
}

fn random_nash_batch(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..256).collect();
    let mut group = c.benchmark_group("random_nash_batch");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sweep::map(&seeds, exec, |&seed| {
                    let g = make_random_matrix(3, &[5, 5, 5], BonusMode::None, seed).unwrap();
                    public_pure_nash(&g).unwrap().len()
                })
            })
        });
    }
    group.finish();
}

fn announcement_sampling(c: &mut Criterion) {
    let game = make_keydisc(&KeyDiscConfig::new(16, 3, 2, 1)).unwrap();
    let mut group = c.benchmark_group("announcement_sampling");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| false_announcement_rate(&game.spec, 0, black_box(1_000_000), 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cournot_seed_sweep, random_nash_batch, announcement_sampling);
criterion_main!(benches);
