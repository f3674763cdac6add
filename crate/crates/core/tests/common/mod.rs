//! Shared helpers for integration tests: fixtures, seeded random games and brute-force
//! reference implementations that do not go through the solver's LP machinery.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use csgbvi::{normalize, parse_csg, NormalizedCsg, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture exists")
}

pub fn fixture(name: &str) -> NormalizedCsg {
    normalize(&parse_csg(&fixture_text(name)).expect("fixture parses"))
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct GameShape {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_denominator: u32,
}

/// Random game in the JSON model format.
///
/// One goal state, optionally one fixed-value cloud, and up to `max_states` regular states.
/// Successor sets are biased towards regular states so that end components are common.
pub fn random_game_json(rng: &mut impl Rng, shape: GameShape) -> String {
    let regular = rng.gen_range(1..=shape.max_states);
    let mut states: Vec<String> = (0..regular).map(|i| format!("s{i}")).collect();
    states.push("goal".into());
    let cloud = rng.gen_bool(0.5);
    if cloud {
        states.push("cloud".into());
    }
    let mut transitions = Vec::new();
    for s in 0..regular {
        let rows = rng.gen_range(1..=shape.max_actions);
        let cols = rng.gen_range(1..=shape.max_actions);
        for a in 0..rows {
            for b in 0..cols {
                let k = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=3.min(states.len())) };
                let mut succ: Vec<usize> = Vec::new();
                while succ.len() < k {
                    let t = if rng.gen_bool(0.7) { rng.gen_range(0..regular) } else { rng.gen_range(0..states.len()) };
                    if !succ.contains(&t) {
                        succ.push(t);
                    }
                }
                let denom = rng.gen_range(k as u32..=shape.max_denominator.max(k as u32));
                let mut units = vec![1u32; k];
                for _ in k as u32..denom {
                    units[rng.gen_range(0..k)] += 1;
                }
                let to: Vec<_> = succ
                    .iter()
                    .zip(&units)
                    .map(|(&t, &u)| json!({"state": states[t], "prob": format!("{u}/{denom}")}))
                    .collect();
                transitions.push(json!({"from": states[s], "aR": format!("a{a}"), "aS": format!("b{b}"), "to": to}));
            }
        }
    }
    let mut doc = json!({
        "states": states,
        "initial": "s0",
        "targets": ["goal"],
        "transitions": transitions,
    });
    if cloud {
        let d = shape.max_denominator.max(1);
        doc["fixed"] = json!({"cloud": format!("{}/{d}", rng.gen_range(0..=d))});
    }
    doc.to_string()
}

pub fn random_game(rng: &mut impl Rng, shape: GameShape) -> NormalizedCsg {
    normalize(&parse_csg(&random_game_json(rng, shape)).expect("generated game is well-formed"))
}

/// Random valuation with values on a coarse grid, so that ties are frequent.
pub fn random_coarse_valuation(rng: &mut impl Rng, g: &NormalizedCsg) -> Vec<Rational> {
    let grid = [q(0, 1), q(1, 2), q(1, 1)];
    (0..g.num_states())
        .map(|s| {
            if s == g.target_sink() {
                Rational::one()
            } else if s == g.losing_sink() {
                Rational::zero()
            } else {
                grid.choose(rng).unwrap().clone()
            }
        })
        .collect()
}

fn stays(g: &NormalizedCsg, s: usize, a: usize, b: usize, x: &BTreeSet<usize>) -> bool {
    g.delta(s, a, b).iter().all(|(t, _)| x.contains(t))
}

/// End component check by reachability search from every member.
pub fn brute_is_ec(g: &NormalizedCsg, x: &BTreeSet<usize>) -> bool {
    if x.is_empty() {
        return false;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &s in x {
        let mut any = false;
        for a in 0..g.actions_r(s).len() {
            for b in 0..g.actions_s(s).len() {
                if stays(g, s, a, b, x) {
                    any = true;
                    edges.extend(g.delta(s, a, b).iter().map(|(t, _)| (s, *t)));
                }
            }
        }
        if !any {
            return false;
        }
    }
    x.iter().all(|&start| {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(from, to) in &edges {
                if from == u && seen.insert(to) {
                    stack.push(to);
                }
            }
        }
        seen == *x
    })
}

/// Hazardous supports at `s` for games with at most two Player R actions, straight from the
/// definition: an optimal, non-leaving row strategy such that no leaving row strategy is at
/// least as good against every column.
///
/// Row strategies are `(p, 1 - p)`. Against strategy `p`, the strategies `q` that are at least
/// as good everywhere satisfy `(q - p)(z0b - z1b) >= 0` for every column `b`. The answer for
/// interior `p` depends only on the signs of those slopes, so the endpoints and midpoint of the
/// optimal interval are the only candidates that need checking.
pub fn brute_hazard_supports(g: &NormalizedCsg, x: &BTreeSet<usize>, v: &[Rational], s: usize) -> Vec<BTreeSet<usize>> {
    let m = g.actions_r(s).len();
    let n = g.actions_s(s).len();
    assert!(m <= 2, "oracle handles at most two rows");
    let z: Vec<Vec<Rational>> = (0..m)
        .map(|a| (0..n).map(|b| g.delta(s, a, b).iter().map(|(t, p)| p * &v[*t]).sum()).collect())
        .collect();
    // Row supports that stay against some column.
    let non_leaving = |support: &[usize]| (0..n).any(|b| support.iter().all(|&a| stays(g, s, a, b, x)));
    if m == 1 {
        return if non_leaving(&[0]) { vec![BTreeSet::from([0])] } else { vec![] };
    }
    let payoff = |p: &Rational, b: usize| p * &z[0][b] + (Rational::one() - p) * &z[1][b];
    let guarantee = |p: &Rational| (0..n).map(|b| payoff(p, b)).min().unwrap();
    let mut candidates = vec![Rational::zero(), Rational::one()];
    for b in 0..n {
        for c in b + 1..n {
            // p z0b + (1-p) z1b = p z0c + (1-p) z1c
            let slope = (&z[0][b] - &z[1][b]) - (&z[0][c] - &z[1][c]);
            if !slope.is_zero() {
                let p = (&z[1][c] - &z[1][b]) / slope;
                if p > Rational::zero() && p < Rational::one() {
                    candidates.push(p);
                }
            }
        }
    }
    let val = candidates.iter().map(&guarantee).max().unwrap();
    let optimal: Vec<&Rational> = candidates.iter().filter(|p| guarantee(p) == val).collect();
    let lo = optimal.iter().copied().min().unwrap().clone();
    let hi = optimal.iter().copied().max().unwrap().clone();

    let leaving_pure = [!non_leaving(&[1]), !non_leaving(&[0])]; // q = 0, q = 1
    let leaving_mixed = !non_leaving(&[0, 1]);
    let hazardous = |p: &Rational| -> bool {
        let one = Rational::one();
        let support: Vec<usize> = [(0usize, p > &Rational::zero()), (1, p < &one)]
            .iter()
            .filter(|(_, on)| *on)
            .map(|(a, _)| *a)
            .collect();
        if guarantee(p) != val || !non_leaving(&support) {
            return false;
        }
        let up = (0..n).any(|b| z[0][b] > z[1][b]);
        let down = (0..n).any(|b| z[0][b] < z[1][b]);
        // Dominating q-set: [lo_q, hi_q].
        let (lo_q, hi_q) = match (up, down) {
            (true, true) => (p.clone(), p.clone()),
            (true, false) => (p.clone(), one.clone()),
            (false, true) => (Rational::zero(), p.clone()),
            (false, false) => (Rational::zero(), one.clone()),
        };
        let hits_zero = lo_q.is_zero() && leaving_pure[0];
        let hits_one = hi_q == one && leaving_pure[1];
        let meets_open = hi_q > Rational::zero() && lo_q < one && (lo_q < hi_q || lo_q > Rational::zero());
        let hits_interior = leaving_mixed && meets_open;
        !(hits_zero || hits_one || hits_interior)
    };
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    if lo.is_zero() && hazardous(&Rational::zero()) {
        out.push(BTreeSet::from([1]));
    }
    if hi == Rational::one() && hazardous(&Rational::one()) {
        out.push(BTreeSet::from([0]));
    }
    let interior: Vec<Rational> = [lo.clone(), hi.clone(), (&lo + &hi) / Rational::from_integer(2.into())]
        .into_iter()
        .filter(|p| p > &Rational::zero() && p < &Rational::one())
        .collect();
    if interior.iter().any(&hazardous) {
        out.push(BTreeSet::from([0, 1]));
    }
    out
}

/// Maximal bloated end components among the non-sink states, by subset enumeration.
pub fn brute_mbecs(g: &NormalizedCsg, v: &[Rational]) -> BTreeSet<BTreeSet<usize>> {
    let inner: Vec<usize> = g.inner_states().into_iter().collect();
    let mut becs: Vec<BTreeSet<usize>> = Vec::new();
    for mask in 1u32..(1 << inner.len()) {
        let x: BTreeSet<usize> = (0..inner.len()).filter(|i| mask >> i & 1 == 1).map(|i| inner[i]).collect();
        if brute_is_ec(g, &x) && x.iter().all(|&s| !brute_hazard_supports(g, &x, v, s).is_empty()) {
            becs.push(x);
        }
    }
    becs.iter()
        .filter(|x| !becs.iter().any(|y| y.len() > x.len() && x.is_subset(y)))
        .cloned()
        .collect()
}
