//! Bellman iteration from below, naive iteration from above, and bounded value iteration.

use std::collections::BTreeSet;

use crate::bec::{deflate, local_game, BecError, DeflationEvent};
use crate::graph::find_mecs;
use crate::model::NormalizedCsg;
use crate::rational::{ratio, round_down_f64, round_up_f64, Rational};
use crate::valuation::{Provenance, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Both bounds, with deflation of the upper bound.
    Bvi,
    /// Only the lower bound; the upper bound stays at its initial value.
    LowerOnly,
    /// Both bounds, upper bound without deflation.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    /// After every step the lower bound is rounded down and the upper bound rounded up to the
    /// nearest double. Bounds stay sound and classification still runs on exact values.
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    AllStates,
    Initial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub epsilon: Rational,
    pub mode: Mode,
    pub max_iters: u64,
    pub arithmetic: Arithmetic,
    pub termination: Termination,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            epsilon: ratio(1, 1_000_000),
            mode: Mode::Bvi,
            max_iters: 1_000_000,
            arithmetic: Arithmetic::Exact,
            termination: Termination::AllStates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Zero-based index of the loop iteration.
    pub iteration: usize,
    pub lower: Vec<Rational>,
    /// Upper bound after the Bellman update, before deflation.
    pub upper_pre: Vec<Rational>,
    /// Upper bound at the end of the iteration.
    pub upper: Vec<Rational>,
    pub deflations: Vec<DeflationEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BviResult {
    pub lower: Valuation,
    pub upper: Valuation,
    pub iterations: usize,
    pub epsilon: Rational,
    pub termination: Termination,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

impl BviResult {
    /// Largest `upper - lower` over the states the termination criterion looks at.
    pub fn gap(&self, g: &NormalizedCsg) -> Rational {
        gap(g, &self.lower, &self.upper, self.termination)
    }
}

fn gap(g: &NormalizedCsg, lower: &Valuation, upper: &Valuation, termination: Termination) -> Rational {
    let states: Vec<usize> = match termination {
        Termination::AllStates => (0..g.num_states()).collect(),
        Termination::Initial => vec![g.initial()],
    };
    states
        .into_iter()
        .map(|s| &upper[s] - &lower[s])
        .max()
        .expect("at least one state")
}

/// One Bellman update: every non-sink state takes the value of its local matrix game.
pub fn pre(g: &NormalizedCsg, v: &Valuation) -> Valuation {
    let values = (0..g.num_states())
        .map(|s| {
            if g.is_sink(s) {
                v[s].clone()
            } else {
                local_game(g, v.values(), s).value()
            }
        })
        .collect();
    Valuation::new(values, v.provenance())
}

/// `L_k` after `iters` Bellman updates from `L_0`.
pub fn run_lower(g: &NormalizedCsg, iters: usize) -> Valuation {
    (0..iters).fold(Valuation::lower_init(g), |l, _| pre(g, &l))
}

/// Upper iterates without deflation after `iters` updates from `U_0`.
pub fn run_naive_upper(g: &NormalizedCsg, iters: usize) -> Valuation {
    (0..iters).fold(Valuation::upper_init(g, Provenance::NaiveUpper), |u, _| pre(g, &u))
}

pub fn bvi(g: &NormalizedCsg, cfg: &RunConfig) -> Result<BviResult, BecError> {
    bvi_with(g, cfg, |_| {})
}

/// Runs the configured iteration, calling `observe` after every loop iteration.
pub fn bvi_with(
    g: &NormalizedCsg,
    cfg: &RunConfig,
    mut observe: impl FnMut(&IterationRecord),
) -> Result<BviResult, BecError> {
    let upper_kind = match cfg.mode {
        Mode::Bvi => Provenance::ValidUpper,
        Mode::Naive | Mode::LowerOnly => Provenance::NaiveUpper,
    };
    let mut lower = Valuation::lower_init(g);
    let mut upper = Valuation::upper_init(g, upper_kind);
    let mecs: Vec<BTreeSet<usize>> = match cfg.mode {
        Mode::Bvi => find_mecs(g, &g.inner_states()),
        _ => Vec::new(),
    };
    let float = cfg.arithmetic == Arithmetic::Float;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iteration = 0usize;
    while (iteration as u64) < cfg.max_iters {
        lower = pre(g, &lower);
        if float {
            lower.map_values(round_down_f64);
        }
        if cfg.mode != Mode::LowerOnly {
            upper = pre(g, &upper);
            if float {
                upper.map_values(round_up_f64);
            }
        }
        let upper_pre = upper.values().to_vec();
        let mut deflations = Vec::new();
        for mec in &mecs {
            deflate(g, &mut upper, mec, &mut deflations)?;
        }
        if float && !deflations.is_empty() {
            upper.map_values(round_up_f64);
        }
        let record = IterationRecord {
            iteration,
            lower: lower.values().to_vec(),
            upper_pre,
            upper: upper.values().to_vec(),
            deflations,
        };
        observe(&record);
        trace.push(record);
        iteration += 1;
        if gap(g, &lower, &upper, cfg.termination) <= cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(BviResult {
        lower,
        upper,
        iterations: iteration,
        epsilon: cfg.epsilon.clone(),
        termination: cfg.termination,
        converged,
        trace,
    })
}
