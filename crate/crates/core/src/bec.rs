//! Bloated end components: hazardous and trapping strategies, exit values and deflation.
//!
//! Strategy sets are represented by the union of their supports. A row support `A` belongs to a
//! hazardous strategy iff some optimal strategy has support exactly `A` and some column mix `σ`
//! has all of `A` among its best responses while every best response to `σ` stays in `X`
//! against one common column. That is the LP-dual form of "no leaving strategy is weakly at
//! least as good against every column".

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::graph::find_mecs;
use crate::matrix_game::MatrixGame;
use crate::model::Csg;
use crate::rational::Rational;
use crate::valuation::{Provenance, Valuation};

pub const DEFAULT_SUPPORT_CAP: usize = 12;
pub const SUPPORT_CAP_ENV: &str = "CSGBVI_SUPPORT_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BecError {
    #[error("state {state:?} has {actions} Player R actions, above the support-enumeration cap {cap} (set {SUPPORT_CAP_ENV} to raise it)")]
    SupportCapExceeded { state: String, actions: usize, cap: usize },
}

/// Support-enumeration cap from the environment, or the default.
pub fn support_cap() -> usize {
    std::env::var(SUPPORT_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SUPPORT_CAP)
}

/// `Z_v(s)(a, b) = Σ_t δ(s, a, b)(t) · v(t)`.
pub fn local_game(g: &Csg, v: &[Rational], s: usize) -> MatrixGame {
    MatrixGame::new(
        (0..g.actions_r(s).len())
            .map(|a| {
                (0..g.actions_s(s).len())
                    .map(|b| g.delta(s, a, b).iter().map(|(t, p)| p * &v[*t]).sum())
                    .collect()
            })
            .collect(),
    )
}

/// Per-state view of a candidate end component `X` under a valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateClassification {
    pub state: usize,
    pub value: Rational,
    pub hazard_supports: Vec<BTreeSet<usize>>,
    pub hazard_actions: BTreeSet<usize>,
    pub trap_columns: BTreeSet<usize>,
    pub deflating_rows: BTreeSet<usize>,
    pub exit_value: Rational,
}

struct Local<'a> {
    g: &'a Csg,
    x: &'a BTreeSet<usize>,
    s: usize,
    z: MatrixGame,
    val: Rational,
}

impl<'a> Local<'a> {
    fn new(g: &'a Csg, x: &'a BTreeSet<usize>, v: &Valuation, s: usize) -> Result<Local<'a>, BecError> {
        let cap = support_cap();
        let actions = g.actions_r(s).len();
        if actions > cap || actions >= 64 {
            return Err(BecError::SupportCapExceeded {
                state: g.name(s).to_string(),
                actions,
                cap,
            });
        }
        let z = local_game(g, v.values(), s);
        let val = z.value();
        Ok(Local { g, x, s, z, val })
    }

    fn stays(&self, a: usize, b: usize) -> bool {
        self.g.dest_within(self.s, a, b, self.x)
    }

    /// Distinct maximal non-leaving row sets: rows staying in `X` against a fixed column.
    fn staying_row_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for b in 0..self.z.cols() {
            let k: Vec<usize> = (0..self.z.rows()).filter(|&a| self.stays(a, b)).collect();
            if !k.is_empty() && !sets.contains(&k) {
                sets.push(k);
            }
        }
        sets
    }

    fn hazard_supports(&self, first_only: bool) -> Vec<BTreeSet<usize>> {
        let m = self.z.rows();
        let stay_sets = self.staying_row_sets();
        let mut subsets: Vec<Vec<usize>> = (1u64..(1 << m))
            .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
            .collect();
        subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut out = Vec::new();
        for support in subsets {
            let covering: Vec<&Vec<usize>> =
                stay_sets.iter().filter(|k| support.iter().all(|a| k.contains(a))).collect();
            if covering.is_empty() || !self.z.optimal_support_exists(&self.val, &support) {
                continue;
            }
            if covering.iter().any(|k| self.z.best_responses_between(&support, k)) {
                out.push(support.into_iter().collect());
                if first_only {
                    break;
                }
            }
        }
        out
    }

    /// Columns that keep every hazardous action inside `X`.
    fn staying_columns(&self, hazard_actions: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.z.cols())
            .filter(|&b| hazard_actions.iter().all(|&a| self.stays(a, b)))
            .collect()
    }

    fn trap_columns(&self, staying: &[usize]) -> BTreeSet<usize> {
        staying
            .iter()
            .copied()
            .filter(|&b| {
                self.z
                    .max_prob_on_action(&self.val, staying, b)
                    .is_some_and(|p| p > Rational::zero())
            })
            .collect()
    }

    fn classify(&self) -> StateClassification {
        let hazard_supports = self.hazard_supports(false);
        let hazard_actions: BTreeSet<usize> = hazard_supports.iter().flatten().copied().collect();
        let staying = self.staying_columns(&hazard_actions);
        let trap_columns = if hazard_actions.is_empty() {
            BTreeSet::new()
        } else {
            self.trap_columns(&staying)
        };
        let mut deflating_rows = BTreeSet::new();
        let exit_value = if hazard_actions.is_empty() || trap_columns.is_empty() {
            self.val.clone()
        } else {
            let candidates: Vec<usize> = (0..self.z.rows()).filter(|a| !hazard_actions.contains(a)).collect();
            let leaves = candidates
                .iter()
                .any(|&a| trap_columns.iter().any(|&b| !self.stays(a, b)));
            if leaves {
                deflating_rows = candidates.iter().copied().collect();
                let face = self
                    .z
                    .face_value(&self.val, &candidates, &staying)
                    .expect("trap strategies exist");
                face.max(Rational::zero())
            } else {
                Rational::zero()
            }
        };
        StateClassification {
            state: self.s,
            value: self.val.clone(),
            hazard_supports,
            hazard_actions,
            trap_columns,
            deflating_rows,
            exit_value,
        }
    }
}

/// Supports of Player R's hazardous strategies at `s` with respect to `x`.
pub fn compute_hazard(g: &Csg, x: &BTreeSet<usize>, v: &Valuation, s: usize) -> Result<Vec<BTreeSet<usize>>, BecError> {
    Ok(Local::new(g, x, v, s)?.hazard_supports(false))
}

fn has_hazard(g: &Csg, x: &BTreeSet<usize>, v: &Valuation, s: usize) -> Result<bool, BecError> {
    Ok(!Local::new(g, x, v, s)?.hazard_supports(true).is_empty())
}

/// Union of the supports of Player S's trapping strategies at `s`.
pub fn compute_trap(
    g: &Csg,
    x: &BTreeSet<usize>,
    v: &Valuation,
    s: usize,
    hazard_actions: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>, BecError> {
    if hazard_actions.is_empty() {
        return Ok(BTreeSet::new());
    }
    let local = Local::new(g, x, v, s)?;
    let staying = local.staying_columns(hazard_actions);
    Ok(local.trap_columns(&staying))
}

pub fn classify_state(g: &Csg, x: &BTreeSet<usize>, v: &Valuation, s: usize) -> Result<StateClassification, BecError> {
    Ok(Local::new(g, x, v, s)?.classify())
}

pub fn exit_value(g: &Csg, x: &BTreeSet<usize>, v: &Valuation, s: usize) -> Result<Rational, BecError> {
    Ok(classify_state(g, x, v, s)?.exit_value)
}

/// Largest exit value over `x` and the states attaining it.
pub fn best_exit(g: &Csg, x: &BTreeSet<usize>, v: &Valuation) -> Result<(Rational, BTreeSet<usize>), BecError> {
    let mut best: Option<Rational> = None;
    let mut exits = BTreeSet::new();
    for &s in x {
        let e = exit_value(g, x, v, s)?;
        match &best {
            Some(b) if e < *b => {}
            Some(b) if e == *b => {
                exits.insert(s);
            }
            _ => {
                best = Some(e);
                exits = BTreeSet::from([s]);
            }
        }
    }
    Ok((best.expect("non-empty component"), exits))
}

/// Maximal bloated end components inside the end component `mec`.
pub fn find_mbecs(g: &Csg, mec: &BTreeSet<usize>, v: &Valuation) -> Result<Vec<BTreeSet<usize>>, BecError> {
    let mut b = BTreeSet::new();
    for &s in mec {
        if has_hazard(g, mec, v, s)? {
            b.insert(s);
        }
    }
    if b.is_empty() {
        return Ok(Vec::new());
    }
    if b == *mec {
        return Ok(vec![b]);
    }
    let mut out = Vec::new();
    for e in find_mecs(g, &b) {
        out.extend(find_mbecs(g, &e, v)?);
    }
    out.sort_by_key(|x| *x.first().expect("non-empty"));
    Ok(out)
}

/// One lowering step performed by [`deflate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationEvent {
    /// End component searched for bloated end components.
    pub mec: BTreeSet<usize>,
    pub bec: BTreeSet<usize>,
    pub best_exit_value: Rational,
    pub best_exits: BTreeSet<usize>,
    /// Upper bound right after lowering `bec`.
    pub upper_after: Vec<Rational>,
}

/// Caps every bloated end component of `mec` at its best exit value, then recurses into the end
/// components left after removing the best exits.
pub fn deflate(g: &Csg, u: &mut Valuation, mec: &BTreeSet<usize>, events: &mut Vec<DeflationEvent>) -> Result<(), BecError> {
    debug_assert_eq!(u.provenance(), Provenance::ValidUpper, "deflation needs a valid upper bound");
    for x in find_mbecs(g, mec, u)? {
        let (value, exits) = best_exit(g, &x, u)?;
        for &s in &x {
            if u[s] > value {
                u.set(s, value.clone());
            }
        }
        events.push(DeflationEvent {
            mec: mec.clone(),
            bec: x.clone(),
            best_exit_value: value,
            best_exits: exits.clone(),
            upper_after: u.values().to_vec(),
        });
        let rest: BTreeSet<usize> = x.difference(&exits).copied().collect();
        for e in find_mecs(g, &rest) {
            deflate(g, u, &e, events)?;
        }
    }
    Ok(())
}
