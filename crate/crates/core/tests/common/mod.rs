//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solvers; payoffs are read straight off the public evaluator.

#![allow(dead_code)]

use intention_games::model::{Action, ActionProfile, ActionSet, IntentionGameSpec};

/// `u_i = q_i (1 - q_1 - q_2) - q_i^2 / 2`, written out independently.
pub fn cournot_u(q_self: f64, q_other: f64) -> f64 {
    q_self - q_self * q_self - q_self * q_other - q_self * q_self / 2.0
}

pub fn sizes(spec: &IntentionGameSpec) -> Vec<usize> {
    spec.action_sets()
        .iter()
        .map(|s| match s {
            ActionSet::Finite { len } => *len,
            _ => panic!("finite game expected"),
        })
        .collect()
}

/// Every index profile, last player varying fastest.
pub fn all_profiles(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn profile(ix: &[usize]) -> ActionProfile {
    ActionProfile::indices(ix)
}

pub fn u(spec: &IntentionGameSpec, player: usize, ix: &[usize]) -> f64 {
    spec.public_payoff(player, &profile(ix))
}

pub fn with(ix: &[usize], player: usize, a: usize) -> Vec<usize> {
    let mut v = ix.to_vec();
    v[player] = a;
    v
}

/// Indices attaining the maximum of `f` over `0..n`.
pub fn argmax_set(n: usize, f: impl Fn(usize) -> f64) -> Vec<usize> {
    let vals: Vec<f64> = (0..n).map(&f).collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..n).filter(|&a| vals[a] == max).collect()
}

/// True when some own action strictly beats the current one.
pub fn brute_deviant(spec: &IntentionGameSpec, player: usize, ix: &[usize]) -> bool {
    let n = sizes(spec)[player];
    let cur = u(spec, player, ix);
    (0..n).any(|a| u(spec, player, &with(ix, player, a)) > cur)
}

pub fn brute_nash(spec: &IntentionGameSpec) -> Vec<Vec<usize>> {
    let s = sizes(spec);
    all_profiles(&s)
        .into_iter()
        .filter(|ix| (0..s.len()).all(|i| !brute_deviant(spec, i, ix)))
        .collect()
}

pub fn indices_of(p: &ActionProfile) -> Vec<usize> {
    p.actions().iter().map(|a| a.as_index().expect("index action")).collect()
}

pub fn quantity(a: &Action) -> f64 {
    a.as_quantity().expect("quantity action")
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
