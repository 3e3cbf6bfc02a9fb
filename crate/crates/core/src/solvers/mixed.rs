//! Support enumeration for two-player finite games.

use serde::Serialize;

use super::solve_linear;
use crate::error::{Error, Result};
use crate::model::{ActionProfile, ActionSet, GameView, IntentionGameSpec, Round};

/// Largest per-player action count accepted by support enumeration.
pub const MAX_SUPPORT_ACTIONS: usize = 8;

const PROB_EPS: f64 = 1e-12;
const BR_EPS: f64 = 1e-9;

/// Probability distribution over joint action profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedProfile {
    pub support: Vec<(ActionProfile, f64)>,
}

impl MixedProfile {
    pub fn point(profile: ActionProfile) -> Self {
        MixedProfile { support: vec![(profile, 1.0)] }
    }

    pub fn new(support: Vec<(ActionProfile, f64)>) -> Result<Self> {
        if support.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidConfig("negative or non-finite probability".into()));
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("probabilities sum to {total}, not 1")));
        }
        for (i, (a, _)) in support.iter().enumerate() {
            if support[..i].iter().any(|(b, _)| a.lex_cmp(b).is_eq()) {
                return Err(Error::InvalidConfig(format!("profile {a} listed twice")));
            }
        }
        Ok(MixedProfile { support })
    }
}

/// Independent mixtures of the row and column player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedEquilibrium {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

impl MixedEquilibrium {
    pub fn strategy(&self, player: usize) -> &[f64] {
        if player == 0 {
            &self.row
        } else {
            &self.col
        }
    }

    pub fn support_size(&self) -> usize {
        self.row.iter().chain(&self.col).filter(|&&p| p > PROB_EPS).count()
    }

    /// Product distribution over joint profiles with positive probability.
    pub fn to_profile(&self) -> MixedProfile {
        let mut support = Vec::new();
        for (r, &x) in self.row.iter().enumerate() {
            for (c, &y) in self.col.iter().enumerate() {
                if x > PROB_EPS && y > PROB_EPS {
                    support.push((ActionProfile::indices(&[r, c]), x * y));
                }
            }
        }
        MixedProfile { support }
    }

    fn approx_eq(&self, other: &MixedEquilibrium) -> bool {
        self.row.iter().zip(&other.row).chain(self.col.iter().zip(&other.col)).all(|(a, b)| (a - b).abs() < 1e-9)
    }
}

struct Bimatrix {
    rows: usize,
    cols: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

fn bimatrix(spec: &IntentionGameSpec, view: GameView, round: &Round<'_>) -> Result<Bimatrix> {
    if spec.players() != 2 {
        return Err(Error::Unsupported("support enumeration handles two players only".into()));
    }
    let sizes: Vec<usize> = spec
        .action_sets()
        .iter()
        .map(|s| match s {
            ActionSet::Finite { len } if *len <= MAX_SUPPORT_ACTIONS => Ok(*len),
            ActionSet::Finite { len } => Err(Error::Unsupported(format!(
                "{len} actions exceeds the support enumeration cap of {MAX_SUPPORT_ACTIONS}"
            ))),
            _ => Err(Error::Unsupported("support enumeration needs finite action lists".into())),
        })
        .collect::<Result<_>>()?;
    let (rows, cols) = (sizes[0], sizes[1]);
    let mut a = vec![vec![0.0; cols]; rows];
    let mut b = vec![vec![0.0; cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            let prof = ActionProfile::indices(&[r, c]);
            a[r][c] = spec.view_payoff(view, 0, &prof, round);
            b[r][c] = spec.view_payoff(view, 1, &prof, round);
        }
    }
    Ok(Bimatrix { rows, cols, a, b })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Mixture over `mix_support` making the opponent indifferent over
/// `opp_support`; `payoff(own, opp)` is the opponent's payoff.
fn indifference(
    mix_support: &[usize],
    opp_support: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
    own_len: usize,
) -> Option<(Vec<f64>, f64)> {
    let k = mix_support.len();
    // unknowns: probabilities on mix_support, then the common value
    let mut m = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for &o in opp_support {
        let mut row: Vec<f64> = mix_support.iter().map(|&s| payoff(s, o)).collect();
        row.push(-1.0);
        m.push(row);
        rhs.push(0.0);
    }
    let mut norm = vec![1.0; k];
    norm.push(0.0);
    m.push(norm);
    rhs.push(1.0);
    let sol = solve_linear(m, rhs)?;
    let mut full = vec![0.0; own_len];
    for (&s, &p) in mix_support.iter().zip(&sol) {
        if p < -PROB_EPS {
            return None;
        }
        full[s] = p.max(0.0);
    }
    Some((full, sol[k]))
}

/// All equilibria found by equal-size support enumeration, in order of
/// increasing support size.
pub fn mixed_equilibria_2p(
    spec: &IntentionGameSpec,
    view: GameView,
    round: &Round<'_>,
) -> Result<Vec<MixedEquilibrium>> {
    let g = bimatrix(spec, view, round)?;
    let mut found: Vec<MixedEquilibrium> = Vec::new();
    for k in 1..=g.rows.min(g.cols) {
        for rs in subsets(g.rows, k) {
            for cs in subsets(g.cols, k) {
                // column mixture makes the row player indifferent over rs, and vice versa
                let Some((y, v)) = indifference(&cs, &rs, |c, r| g.a[r][c], g.cols) else { continue };
                let Some((x, w)) = indifference(&rs, &cs, |r, c| g.b[r][c], g.rows) else { continue };
                let row_ok = (0..g.rows)
                    .all(|r| (0..g.cols).map(|c| g.a[r][c] * y[c]).sum::<f64>() <= v + BR_EPS);
                let col_ok = (0..g.cols)
                    .all(|c| (0..g.rows).map(|r| g.b[r][c] * x[r]).sum::<f64>() <= w + BR_EPS);
                if !(row_ok && col_ok) {
                    continue;
                }
                let eq = MixedEquilibrium { row: x, col: y };
                if !found.iter().any(|e| e.approx_eq(&eq)) {
                    found.push(eq);
                }
            }
        }
    }
    Ok(found)
}

/// One mixed equilibrium: the one with the largest support, first found
/// among equals.
pub fn mixed_nash_2p(spec: &IntentionGameSpec, view: GameView, round: &Round<'_>) -> Result<MixedEquilibrium> {
    let all = mixed_equilibria_2p(spec, view, round)?;
    let mut best: Option<MixedEquilibrium> = None;
    for eq in all {
        if best.as_ref().is_none_or(|b| eq.support_size() > b.support_size()) {
            best = Some(eq);
        }
    }
    best.ok_or_else(|| Error::Unsupported("support enumeration found no equilibrium (degenerate game)".into()))
}

/// Replace `player`'s mixture with a best response under its private payoff
/// against the opponent's equilibrium mixture.
///
/// The equilibrium mixture is kept when all of its support remains a private
/// best response; otherwise the player mixes uniformly over the private
/// best-response set.
pub fn reflection_mixed_2p(
    spec: &IntentionGameSpec,
    player: usize,
    eq: &MixedEquilibrium,
    round: &Round<'_>,
) -> Result<MixedEquilibrium> {
    spec.check_player(player)?;
    let g = bimatrix(spec, GameView::SelfReflection(player), round)?;
    let expected: Vec<f64> = if player == 0 {
        (0..g.rows).map(|r| (0..g.cols).map(|c| g.a[r][c] * eq.col[c]).sum()).collect()
    } else {
        (0..g.cols).map(|c| (0..g.rows).map(|r| g.b[r][c] * eq.row[r]).sum()).collect()
    };
    let max = expected.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best: Vec<bool> = expected.iter().map(|&e| e >= max - BR_EPS).collect();
    let own = eq.strategy(player);
    let keep = own.iter().zip(&best).all(|(&p, &b)| p <= PROB_EPS || b);
    let mixture = if keep {
        own.to_vec()
    } else {
        let n = best.iter().filter(|&&b| b).count() as f64;
        best.iter().map(|&b| if b { 1.0 / n } else { 0.0 }).collect()
    };
    let mut out = eq.clone();
    if player == 0 {
        out.row = mixture;
    } else {
        out.col = mixture;
    }
    Ok(out)
}
