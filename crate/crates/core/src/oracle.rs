//! Brute-force lower bounds on game values, independent of the iteration engine.
//!
//! Player R's stationary strategies are drawn from a probability grid of resolution
//! `1/resolution`. Against a fixed stationary strategy Player S faces an MDP in which a pure
//! memoryless strategy minimizes the reachability probability from every state at once, so
//! enumerating those and solving each induced Markov chain gives the exact guarantee. The grid
//! is enumerated exhaustively when small; otherwise a local search starts from the strategies
//! that are locally optimal for a floating-point Bellman fixpoint. The returned values are exact
//! guarantees of concrete strategies and therefore never exceed the true value.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::NormalizedCsg;
use crate::rational::Rational;
use crate::valuation::{Provenance, Valuation};

/// Largest grid product that is enumerated exhaustively.
const EXHAUSTIVE_LIMIT: u128 = 20_000;
/// Largest number of pure memoryless Player S strategies enumerated per evaluation.
const COUNTER_LIMIT: u128 = 100_000;
const SEARCH_BUDGET: usize = 4_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("resolution must be positive")]
    ZeroResolution,
    #[error("game too large for the oracle: {0} pure Player S strategies")]
    TooManyCounterStrategies(u128),
}

/// Stationary Player R strategy as grid units per action; units at each state sum to the
/// resolution.
type GridStrategy = Vec<Vec<u32>>;

struct Oracle<'a> {
    g: &'a NormalizedCsg,
    res: u32,
    inner: Vec<usize>,
}

pub fn oracle_value(g: &NormalizedCsg, resolution: u32) -> Result<Valuation, OracleError> {
    if resolution == 0 {
        return Err(OracleError::ZeroResolution);
    }
    let inner: Vec<usize> = g.inner_states().into_iter().collect();
    let counters: u128 = inner.iter().map(|&s| g.actions_s(s).len() as u128).product();
    if counters > COUNTER_LIMIT {
        return Err(OracleError::TooManyCounterStrategies(counters));
    }
    let oracle = Oracle { g, res: resolution, inner };
    let candidates = oracle.search();
    let mut best = vec![Rational::zero(); g.num_states()];
    best[g.target_sink()] = Rational::one();
    for rho in candidates {
        for (b, v) in best.iter_mut().zip(oracle.exact_guarantee(&rho)) {
            if v > *b {
                *b = v;
            }
        }
    }
    Ok(Valuation::new(best, Provenance::Oracle))
}

impl Oracle<'_> {
    fn n(&self) -> usize {
        self.g.num_states()
    }

    fn probs(&self, units: &[u32]) -> Vec<f64> {
        units.iter().map(|&u| u as f64 / self.res as f64).collect()
    }

    /// Per-state best grid strategies found, deduplicated.
    fn search(&self) -> Vec<GridStrategy> {
        let grid_sizes: Vec<u128> = (0..self.n())
            .map(|s| compositions(self.res, self.g.actions_r(s).len()).len() as u128)
            .collect();
        let total = grid_sizes.iter().try_fold(1u128, |acc, &k| acc.checked_mul(k));
        let mut best: Vec<(f64, GridStrategy)> = Vec::new();
        let consider = |rho: &GridStrategy, values: &[f64], best: &mut Vec<(f64, GridStrategy)>| {
            if best.is_empty() {
                *best = vec![(f64::NEG_INFINITY, rho.clone()); values.len()];
            }
            for (s, v) in values.iter().enumerate() {
                if *v > best[s].0 {
                    best[s] = (*v, rho.clone());
                }
            }
        };
        match total {
            Some(t) if t <= EXHAUSTIVE_LIMIT => {
                let per_state: Vec<Vec<Vec<u32>>> =
                    (0..self.n()).map(|s| compositions(self.res, self.g.actions_r(s).len())).collect();
                let mut idx = vec![0usize; self.n()];
                loop {
                    let rho: GridStrategy = idx.iter().enumerate().map(|(s, &i)| per_state[s][i].clone()).collect();
                    let values = self.float_guarantee(&rho);
                    consider(&rho, &values, &mut best);
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < per_state[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
            _ => {
                for seed in self.seeds() {
                    let (rho, values) = self.ascend(seed);
                    consider(&rho, &values, &mut best);
                }
            }
        }
        let mut out: Vec<GridStrategy> = Vec::new();
        for (_, rho) in best {
            if !out.contains(&rho) {
                out.push(rho);
            }
        }
        out
    }

    fn seeds(&self) -> Vec<GridStrategy> {
        let fixpoint = self.float_lower_fixpoint();
        let local: GridStrategy = (0..self.n())
            .map(|s| {
                let z = self.float_local_game(&fixpoint, s);
                snap(&solve_float(&z).1, self.res)
            })
            .collect();
        let uniform: GridStrategy = (0..self.n())
            .map(|s| snap(&vec![1.0; self.g.actions_r(s).len()], self.res))
            .collect();
        vec![local, uniform]
    }

    /// Coordinate ascent on the summed guarantee, moving mass between pairs of actions with
    /// step sizes halving down to one grid unit.
    fn ascend(&self, mut rho: GridStrategy) -> (GridStrategy, Vec<f64>) {
        let score = |v: &[f64]| v.iter().sum::<f64>();
        let mut values = self.float_guarantee(&rho);
        let mut evaluations = 1;
        let mut step = (self.res / 2).max(1);
        loop {
            let mut improved = false;
            'moves: for &s in &self.inner {
                let k = rho[s].len();
                for i in 0..k {
                    for j in 0..k {
                        if i == j || rho[s][i] < step {
                            continue;
                        }
                        let mut cand = rho.clone();
                        cand[s][i] -= step;
                        cand[s][j] += step;
                        let v = self.float_guarantee(&cand);
                        evaluations += 1;
                        if score(&v) > score(&values) + 1e-12 {
                            rho = cand;
                            values = v;
                            improved = true;
                        }
                        if evaluations >= SEARCH_BUDGET {
                            break 'moves;
                        }
                    }
                }
            }
            if evaluations >= SEARCH_BUDGET {
                break;
            }
            if !improved {
                if step == 1 {
                    break;
                }
                step /= 2;
            }
        }
        (rho, values)
    }

    fn float_local_game(&self, v: &[f64], s: usize) -> Vec<Vec<f64>> {
        (0..self.g.actions_r(s).len())
            .map(|a| {
                (0..self.g.actions_s(s).len())
                    .map(|b| self.g.delta(s, a, b).iter().map(|(t, p)| crate::rational::to_f64(p) * v[*t]).sum())
                    .collect()
            })
            .collect()
    }

    fn float_lower_fixpoint(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n()];
        v[self.g.target_sink()] = 1.0;
        for _ in 0..2_000 {
            let mut next = v.clone();
            let mut change: f64 = 0.0;
            for &s in &self.inner {
                next[s] = solve_float(&self.float_local_game(&v, s)).0;
                change = change.max((next[s] - v[s]).abs());
            }
            v = next;
            if change < 1e-13 {
                break;
            }
        }
        v
    }

    fn counter_strategies(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0usize; self.n()]];
        for &s in &self.inner {
            let k = self.g.actions_s(s).len();
            out = out
                .into_iter()
                .flat_map(|sigma| {
                    (0..k).map(move |b| {
                        let mut next = sigma.clone();
                        next[s] = b;
                        next
                    })
                })
                .collect();
        }
        out
    }

    fn chain_f64(&self, rho: &GridStrategy, sigma: &[usize]) -> Vec<Vec<(usize, f64)>> {
        (0..self.n())
            .map(|s| {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for (a, p) in self.probs(&rho[s]).into_iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    for (t, q) in self.g.delta(s, a, sigma[s]) {
                        row.push((*t, p * crate::rational::to_f64(q)));
                    }
                }
                row
            })
            .collect()
    }

    fn float_guarantee(&self, rho: &GridStrategy) -> Vec<f64> {
        let mut best = vec![f64::INFINITY; self.n()];
        for sigma in self.counter_strategies() {
            let chain = self.chain_f64(rho, &sigma);
            let supports: Vec<Vec<usize>> = chain.iter().map(|r| r.iter().map(|(t, _)| *t).collect()).collect();
            let live = self.reaching(&supports);
            let x = solve_reach_f64(&chain, &live, self.g.target_sink());
            for (b, v) in best.iter_mut().zip(x) {
                *b = b.min(v);
            }
        }
        best
    }

    /// States with a positive-probability path to the target.
    fn reaching(&self, supports: &[Vec<usize>]) -> BTreeSet<usize> {
        let target = self.g.target_sink();
        let mut live = BTreeSet::from([target]);
        loop {
            let before = live.len();
            for (s, succ) in supports.iter().enumerate() {
                if !live.contains(&s) && succ.iter().any(|t| live.contains(t)) {
                    live.insert(s);
                }
            }
            if live.len() == before {
                return live;
            }
        }
    }

    fn exact_guarantee(&self, rho: &GridStrategy) -> Vec<Rational> {
        let res = Rational::from_integer(self.res.into());
        let mut best: Option<Vec<Rational>> = None;
        for sigma in self.counter_strategies() {
            let chain: Vec<Vec<(usize, Rational)>> = (0..self.n())
                .map(|s| {
                    let mut row = Vec::new();
                    for (a, &u) in rho[s].iter().enumerate() {
                        if u == 0 {
                            continue;
                        }
                        let p = Rational::from_integer(u.into()) / &res;
                        for (t, q) in self.g.delta(s, a, sigma[s]) {
                            row.push((*t, &p * q));
                        }
                    }
                    row
                })
                .collect();
            let supports: Vec<Vec<usize>> = chain.iter().map(|r| r.iter().map(|(t, _)| *t).collect()).collect();
            let live = self.reaching(&supports);
            let x = solve_reach_exact(&chain, &live, self.g.target_sink());
            best = Some(match best {
                None => x,
                Some(b) => b.into_iter().zip(x).map(|(p, q)| p.min(q)).collect(),
            });
        }
        best.expect("at least one counter-strategy")
    }
}

/// All ways to split `total` units over `k` actions.
fn compositions(total: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Rounds a distribution to grid units, keeping every positive action at one unit or more.
fn snap(p: &[f64], res: u32) -> Vec<u32> {
    let total: f64 = p.iter().map(|x| x.max(0.0)).sum();
    let positive = p.iter().filter(|&&x| x > 1e-12).count() as u32;
    if total <= 0.0 || positive > res {
        let mut out = vec![0; p.len()];
        out[0] = res;
        return out;
    }
    let mut units: Vec<u32> = p
        .iter()
        .map(|&x| if x > 1e-12 { ((x / total) * res as f64).floor().max(1.0) as u32 } else { 0 })
        .collect();
    let mut sum: u32 = units.iter().sum();
    while sum > res {
        let i = (0..units.len()).max_by_key(|&i| units[i]).unwrap();
        units[i] -= 1;
        sum -= 1;
    }
    while sum < res {
        let i = (0..units.len())
            .filter(|&i| p[i] > 1e-12)
            .max_by(|&a, &b| {
                let ra = p[a] / total * res as f64 - units[a] as f64;
                let rb = p[b] / total * res as f64 - units[b] as f64;
                ra.partial_cmp(&rb).unwrap()
            })
            .unwrap();
        units[i] += 1;
        sum += 1;
    }
    units
}

fn gauss_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let pivot = a[c].clone();
        for r in 0..n {
            if r != c {
                let f = a[r][c] / pivot[c];
                if f != 0.0 {
                    for (x, p) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                        *x -= f * p;
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Value and an optimal row strategy of a small matrix game by support enumeration.
fn solve_float(z: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (m, n) = (z.len(), z[0].len());
    let guarantee = |x: &[f64]| (0..n).map(|j| (0..m).map(|i| x[i] * z[i][j]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let mut best = (f64::NEG_INFINITY, vec![0.0; m]);
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                // Unknowns x_rows and v: x·z[.,j] - v = 0 for j in cols, Σx = 1.
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut rhs = vec![0.0; k + 1];
                for (r, &j) in cols.iter().enumerate() {
                    for (c, &i) in rows.iter().enumerate() {
                        a[r][c] = z[i][j];
                    }
                    a[r][k] = -1.0;
                }
                a[k][..k].fill(1.0);
                rhs[k] = 1.0;
                let Some(sol) = gauss_f64(a, rhs) else { continue };
                if sol[..k].iter().any(|&x| x < -1e-12) {
                    continue;
                }
                let mut x = vec![0.0; m];
                for (c, &i) in rows.iter().enumerate() {
                    x[i] = sol[c].max(0.0);
                }
                let g = guarantee(&x);
                if g > best.0 {
                    best = (g, x);
                }
            }
        }
    }
    best
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn solve_reach_f64(chain: &[Vec<(usize, f64)>], live: &BTreeSet<usize>, target: usize) -> Vec<f64> {
    let vars: Vec<usize> = live.iter().copied().filter(|&s| s != target).collect();
    let pos = |s: usize| vars.iter().position(|&v| v == s);
    let k = vars.len();
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (r, &s) in vars.iter().enumerate() {
        a[r][r] += 1.0;
        for &(t, p) in &chain[s] {
            if t == target {
                b[r] += p;
            } else if let Some(c) = pos(t) {
                a[r][c] -= p;
            }
        }
    }
    let x = gauss_f64(a, b).unwrap_or_else(|| vec![0.0; k]);
    let mut out = vec![0.0; chain.len()];
    out[target] = 1.0;
    for (i, &s) in vars.iter().enumerate() {
        out[s] = x[i].clamp(0.0, 1.0);
    }
    out
}

fn solve_reach_exact(chain: &[Vec<(usize, Rational)>], live: &BTreeSet<usize>, target: usize) -> Vec<Rational> {
    let vars: Vec<usize> = live.iter().copied().filter(|&s| s != target).collect();
    let pos = |s: usize| vars.iter().position(|&v| v == s);
    let k = vars.len();
    let mut a = vec![vec![Rational::zero(); k + 1]; k];
    for (r, &s) in vars.iter().enumerate() {
        a[r][r] += Rational::one();
        for (t, p) in &chain[s] {
            if *t == target {
                a[r][k] += p;
            } else if let Some(c) = pos(*t) {
                a[r][c] -= p;
            }
        }
    }
    for c in 0..k {
        let p = (c..k).find(|&r| !a[r][c].is_zero()).expect("every live state reaches the target");
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v /= &pivot;
        }
        let prow = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
    }
    let mut out = vec![Rational::zero(); chain.len()];
    out[target] = Rational::one();
    for (i, &s) in vars.iter().enumerate() {
        out[s] = a[i][k].clone();
    }
    out
}
