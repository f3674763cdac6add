mod common;

use std::collections::BTreeSet;

use common::{fixture, q, rng, GameShape};
use csgbvi::{normalize, oracle_value, parse_csg, NormalizedCsg, Rational};
use num_traits::{One, Zero};
use rand::Rng;

#[test]
fn hide_run_value_within_grid_slack() {
    let g = fixture("hide_run_or_slip");
    let v = oracle_value(&g, 1000).unwrap();
    let s = g.index_of("s_hide").unwrap();
    assert!(v[s] <= q(1, 2) && v[s] >= q(1, 2) - q(1, 100));
}

#[test]
fn all_targets_give_one() {
    let text = r#"{
        "states": ["a", "b"], "initial": "a", "targets": ["a", "b"],
        "transitions": []
    }"#;
    let g = normalize(&parse_csg(text).unwrap());
    let v = oracle_value(&g, 10).unwrap();
    for s in 0..g.original().num_states() {
        assert!(matches!(g.state_map()[s], csgbvi::StateRef::Target));
    }
    assert!(v[g.target_sink()].is_one());
}

#[test]
fn rejects_zero_resolution() {
    assert!(oracle_value(&fixture("hide_run_or_slip"), 0).is_err());
}

/// Reachability probabilities of a Markov chain given as successor lists, by exact Gaussian
/// elimination over the states that can reach the target.
fn reach(chain: &[Vec<(usize, Rational)>], target: usize) -> Vec<Rational> {
    let n = chain.len();
    let mut live = BTreeSet::from([target]);
    loop {
        let grown: BTreeSet<usize> =
            (0..n).filter(|&s| live.contains(&s) || chain[s].iter().any(|(t, _)| live.contains(t))).collect();
        if grown == live {
            break;
        }
        live = grown;
    }
    let vars: Vec<usize> = live.iter().copied().filter(|&s| s != target).collect();
    let k = vars.len();
    let mut a = vec![vec![Rational::zero(); k + 1]; k];
    for (r, &s) in vars.iter().enumerate() {
        a[r][r] += Rational::one();
        for (t, p) in &chain[s] {
            if *t == target {
                a[r][k] += p;
            } else if let Some(c) = vars.iter().position(|v| v == t) {
                a[r][c] -= p;
            }
        }
    }
    for c in 0..k {
        let p = (c..k).find(|&r| !a[r][c].is_zero()).unwrap();
        a.swap(c, p);
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
    }
    let mut out = vec![Rational::zero(); n];
    out[target] = Rational::one();
    for (i, &s) in vars.iter().enumerate() {
        out[s] = &a[i][k] / &a[i][i];
    }
    out
}

fn profiles(g: &NormalizedCsg, count: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for s in 0..g.num_states() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..count(s)).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Componentwise max over pure Player R strategies of the componentwise min over pure Player S
/// strategies.
fn pure_values(g: &NormalizedCsg) -> Vec<Rational> {
    let mut best = vec![Rational::zero(); g.num_states()];
    for rho in profiles(g, |s| g.actions_r(s).len()) {
        let mut worst: Option<Vec<Rational>> = None;
        for sigma in profiles(g, |s| g.actions_s(s).len()) {
            let chain: Vec<Vec<(usize, Rational)>> =
                (0..g.num_states()).map(|s| g.delta(s, rho[s], sigma[s]).clone()).collect();
            let v = reach(&chain, g.target_sink());
            worst = Some(match worst {
                None => v,
                Some(w) => w.into_iter().zip(v).map(|(a, b)| a.min(b)).collect(),
            });
        }
        for (b, w) in best.iter_mut().zip(worst.unwrap()) {
            if w > *b {
                *b = w;
            }
        }
    }
    best
}

/// Random game where each state belongs to one player.
fn turn_based(r: &mut impl Rng) -> NormalizedCsg {
    let shape = GameShape { max_states: 4, max_actions: 3, max_denominator: 6 };
    let text = common::random_game_json(r, shape);
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let owners: std::collections::BTreeMap<String, bool> = doc["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| (n.as_str().unwrap().to_string(), r.gen_bool(0.5)))
        .collect();
    doc["transitions"].as_array_mut().unwrap().retain(|t| {
        if owners[t["from"].as_str().unwrap()] {
            t["aS"] == "b0"
        } else {
            t["aR"] == "a0"
        }
    });
    normalize(&parse_csg(&doc.to_string()).unwrap())
}

#[test]
fn turn_based_games_match_pure_enumeration() {
    let mut r = rng(31);
    for _ in 0..40 {
        let g = turn_based(&mut r);
        let pure = pure_values(&g);
        assert_eq!(oracle_value(&g, 1).unwrap().values(), pure.as_slice());
        let finer = oracle_value(&g, 2).unwrap();
        assert!(finer.values().iter().zip(&pure).all(|(a, b)| a >= b));
    }
}
