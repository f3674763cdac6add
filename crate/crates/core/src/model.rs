//! Concurrent stochastic games: representation, JSON parsing, validation and normalization.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::rational::{parse_rational, to_fraction, ParseRationalError, Rational};

/// Sparse distribution over successor states, sorted by state, all probabilities positive.
pub type Distribution = Vec<(usize, Rational)>;

/// Action label used for the single action of absorbing states.
pub const SINK_ACTION: &str = "-";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("undeclared state {0:?}")]
    UnknownState(String),
    #[error("model declares no states")]
    NoStates,
    #[error("state {0:?} has an empty enabled-action set")]
    EmptyActions(String),
    #[error("missing transition for ({state}, {a_r}, {a_s})")]
    MissingTransition {
        state: String,
        a_r: String,
        a_s: String,
    },
    #[error("duplicate transition for ({state}, {a_r}, {a_s})")]
    DuplicateTransition {
        state: String,
        a_r: String,
        a_s: String,
    },
    #[error("transitions given for state {0:?}, which has a fixed value")]
    TransitionsOnFixedState(String),
    #[error("distribution at ({state}, {a_r}, {a_s}) sums to {sum}")]
    DistributionSum {
        state: String,
        a_r: String,
        a_s: String,
        sum: String,
    },
    #[error("probability {prob} for successor {succ:?} of ({state}, {a_r}, {a_s}) is not in (0, 1]")]
    ProbabilityRange {
        state: String,
        a_r: String,
        a_s: String,
        succ: String,
        prob: String,
    },
    #[error("successor {succ:?} listed twice at ({state}, {a_r}, {a_s})")]
    DuplicateSuccessor {
        state: String,
        a_r: String,
        a_s: String,
        succ: String,
    },
    #[error("fixed value {value} of state {state:?} is not in [0, 1]")]
    FixedValueRange { state: String, value: String },
    #[error("state {0:?} is both a target and has a fixed value")]
    FixedTarget(String),
    #[error("{0}")]
    Rational(#[from] ParseRationalError),
    #[error("{0}")]
    Invalid(String),
}

/// A finite two-player zero-sum concurrent stochastic game with a reachability objective for
/// Player R.
///
/// States with a fixed value are absorbing placeholders whose value is declared rather than
/// modelled; normalization replaces them by a Bernoulli branch into the target and losing sinks.
#[derive(Debug, Clone, PartialEq)]
pub struct Csg {
    names: Vec<String>,
    initial: usize,
    targets: BTreeSet<usize>,
    fixed: BTreeMap<usize, Rational>,
    actions_r: Vec<Vec<String>>,
    actions_s: Vec<Vec<String>>,
    delta: Vec<Vec<Vec<Distribution>>>,
}

impl Csg {
    /// Builds a game from explicit parts and validates every structural invariant.
    ///
    /// `delta[s][a][b]` is the distribution for Player R's `a`-th and Player S's `b`-th action.
    pub fn new(
        names: Vec<String>,
        initial: usize,
        targets: BTreeSet<usize>,
        fixed: BTreeMap<usize, Rational>,
        actions_r: Vec<Vec<String>>,
        actions_s: Vec<Vec<String>>,
        delta: Vec<Vec<Vec<Distribution>>>,
    ) -> Result<Csg, ModelError> {
        let g = Csg {
            names,
            initial,
            targets,
            fixed,
            actions_r,
            actions_s,
            delta,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let n = self.names.len();
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for name in &self.names {
            if !seen.insert(name) {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        if self.initial >= n {
            return Err(ModelError::Invalid("initial state out of range".into()));
        }
        if self.targets.iter().chain(self.fixed.keys()).any(|&s| s >= n) {
            return Err(ModelError::Invalid("state index out of range".into()));
        }
        for (&s, v) in &self.fixed {
            if self.targets.contains(&s) {
                return Err(ModelError::FixedTarget(self.names[s].clone()));
            }
            if *v < Rational::zero() || *v > Rational::one() {
                return Err(ModelError::FixedValueRange {
                    state: self.names[s].clone(),
                    value: to_fraction(v),
                });
            }
        }
        if self.actions_r.len() != n || self.actions_s.len() != n || self.delta.len() != n {
            return Err(ModelError::Invalid("per-state tables have wrong length".into()));
        }
        for s in 0..n {
            if self.actions_r[s].is_empty() || self.actions_s[s].is_empty() {
                return Err(ModelError::EmptyActions(self.names[s].clone()));
            }
            if self.delta[s].len() != self.actions_r[s].len() {
                return Err(ModelError::Invalid(format!("delta rows mismatch at {}", self.names[s])));
            }
            for (a, row) in self.delta[s].iter().enumerate() {
                if row.len() != self.actions_s[s].len() {
                    return Err(ModelError::Invalid(format!(
                        "delta columns mismatch at {}",
                        self.names[s]
                    )));
                }
                for (b, dist) in row.iter().enumerate() {
                    self.check_distribution(s, a, b, dist)?;
                }
            }
        }
        Ok(())
    }

    fn check_distribution(&self, s: usize, a: usize, b: usize, dist: &Distribution) -> Result<(), ModelError> {
        let ctx = |succ: Option<usize>| {
            (
                self.names[s].clone(),
                self.actions_r[s][a].clone(),
                self.actions_s[s][b].clone(),
                succ.map(|t| self.names.get(t).cloned().unwrap_or_else(|| t.to_string())),
            )
        };
        let mut sum = Rational::zero();
        let mut prev: Option<usize> = None;
        for (t, p) in dist {
            if *t >= self.names.len() {
                return Err(ModelError::Invalid(format!("successor index {t} out of range")));
            }
            if prev.is_some_and(|q| q >= *t) {
                let (state, a_r, a_s, succ) = ctx(Some(*t));
                return Err(ModelError::DuplicateSuccessor {
                    state,
                    a_r,
                    a_s,
                    succ: succ.unwrap(),
                });
            }
            prev = Some(*t);
            if *p <= Rational::zero() || *p > Rational::one() {
                let (state, a_r, a_s, succ) = ctx(Some(*t));
                return Err(ModelError::ProbabilityRange {
                    state,
                    a_r,
                    a_s,
                    succ: succ.unwrap(),
                    prob: to_fraction(p),
                });
            }
            sum += p;
        }
        if !sum.is_one() {
            let (state, a_r, a_s, _) = ctx(None);
            return Err(ModelError::DistributionSum {
                state,
                a_r,
                a_s,
                sum: to_fraction(&sum),
            });
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn targets(&self) -> &BTreeSet<usize> {
        &self.targets
    }

    pub fn fixed_values(&self) -> &BTreeMap<usize, Rational> {
        &self.fixed
    }

    pub fn actions_r(&self, s: usize) -> &[String] {
        &self.actions_r[s]
    }

    pub fn actions_s(&self, s: usize) -> &[String] {
        &self.actions_s[s]
    }

    pub fn delta(&self, s: usize, a: usize, b: usize) -> &Distribution {
        &self.delta[s][a][b]
    }

    /// Support of `delta(s, a, b)`.
    pub fn dest(&self, s: usize, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.delta[s][a][b].iter().map(|(t, _)| *t)
    }

    pub fn dest_within(&self, s: usize, a: usize, b: usize, set: &BTreeSet<usize>) -> bool {
        self.dest(s, a, b).all(|t| set.contains(&t))
    }

    /// Every action pair loops back to `s` with probability one.
    pub fn is_absorbing(&self, s: usize) -> bool {
        self.delta[s]
            .iter()
            .flatten()
            .all(|d| d.len() == 1 && d[0].0 == s)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<String>,
    initial: String,
    #[serde(default)]
    targets: Vec<String>,
    #[serde(default)]
    fixed: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    transitions: Vec<RawTransition>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: String,
    #[serde(rename = "aR")]
    a_r: String,
    #[serde(rename = "aS")]
    a_s: String,
    to: Vec<RawSuccessor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuccessor {
    state: String,
    prob: serde_json::Value,
}

/// Reads a probability given either as a JSON string (`"p/q"` or decimal) or a JSON number.
pub(crate) fn json_rational(v: &serde_json::Value) -> Result<Rational, ModelError> {
    match v {
        serde_json::Value::String(s) => Ok(parse_rational(s)?),
        serde_json::Value::Number(n) => Ok(parse_rational(&n.to_string())?),
        other => Err(ModelError::Invalid(format!("expected a number or string, got {other}"))),
    }
}

/// Parses the JSON model format.
///
/// Action sets are the labels used in `transitions`; every combination of a Player R and a
/// Player S label at a state must appear exactly once. Target and fixed-value states may omit
/// transitions, in which case they get a single `("-", "-")` self-loop.
pub fn parse_csg(text: &str) -> Result<Csg, ModelError> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
    let mut index = HashMap::new();
    for (i, name) in raw.states.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(ModelError::DuplicateState(name.clone()));
        }
    }
    if raw.states.is_empty() {
        return Err(ModelError::NoStates);
    }
    let lookup = |name: &str| index.get(name).copied().ok_or_else(|| ModelError::UnknownState(name.to_string()));
    let initial = lookup(&raw.initial)?;
    let targets = raw.targets.iter().map(|t| lookup(t)).collect::<Result<BTreeSet<_>, _>>()?;
    let mut fixed = BTreeMap::new();
    for (name, v) in &raw.fixed {
        fixed.insert(lookup(name)?, json_rational(v)?);
    }

    let n = raw.states.len();
    let mut actions_r: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut actions_s: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut entries: Vec<BTreeMap<(String, String), Distribution>> = vec![BTreeMap::new(); n];
    for tr in &raw.transitions {
        let s = lookup(&tr.from)?;
        if fixed.contains_key(&s) {
            return Err(ModelError::TransitionsOnFixedState(tr.from.clone()));
        }
        if !actions_r[s].contains(&tr.a_r) {
            actions_r[s].push(tr.a_r.clone());
        }
        if !actions_s[s].contains(&tr.a_s) {
            actions_s[s].push(tr.a_s.clone());
        }
        let mut dist: Distribution = Vec::with_capacity(tr.to.len());
        for succ in &tr.to {
            dist.push((lookup(&succ.state)?, json_rational(&succ.prob)?));
        }
        dist.sort_by_key(|(t, _)| *t);
        if let Some(w) = dist.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ModelError::DuplicateSuccessor {
                state: tr.from.clone(),
                a_r: tr.a_r.clone(),
                a_s: tr.a_s.clone(),
                succ: raw.states[w[0].0].clone(),
            });
        }
        if entries[s].insert((tr.a_r.clone(), tr.a_s.clone()), dist).is_some() {
            return Err(ModelError::DuplicateTransition {
                state: tr.from.clone(),
                a_r: tr.a_r.clone(),
                a_s: tr.a_s.clone(),
            });
        }
    }

    let mut delta = Vec::with_capacity(n);
    for s in 0..n {
        if entries[s].is_empty() {
            if targets.contains(&s) || fixed.contains_key(&s) {
                actions_r[s] = vec![SINK_ACTION.to_string()];
                actions_s[s] = vec![SINK_ACTION.to_string()];
                delta.push(vec![vec![vec![(s, Rational::one())]]]);
                continue;
            }
            return Err(ModelError::EmptyActions(raw.states[s].clone()));
        }
        let mut rows = Vec::with_capacity(actions_r[s].len());
        for a in &actions_r[s] {
            let mut row = Vec::with_capacity(actions_s[s].len());
            for b in &actions_s[s] {
                let dist = entries[s].remove(&(a.clone(), b.clone())).ok_or_else(|| ModelError::MissingTransition {
                    state: raw.states[s].clone(),
                    a_r: a.clone(),
                    a_s: b.clone(),
                })?;
                row.push(dist);
            }
            rows.push(row);
        }
        delta.push(rows);
    }
    Csg::new(raw.states, initial, targets, fixed, actions_r, actions_s, delta)
}

/// Serializes a game back to the JSON model format.
pub fn to_json(g: &Csg) -> serde_json::Value {
    use serde_json::json;
    let mut transitions = Vec::new();
    for s in 0..g.num_states() {
        if g.fixed.contains_key(&s) {
            continue;
        }
        for (a, ar) in g.actions_r[s].iter().enumerate() {
            for (b, as_) in g.actions_s[s].iter().enumerate() {
                let to: Vec<_> = g.delta[s][a][b]
                    .iter()
                    .map(|(t, p)| json!({"state": g.names[*t], "prob": to_fraction(p)}))
                    .collect();
                transitions.push(json!({"from": g.names[s], "aR": ar, "aS": as_, "to": to}));
            }
        }
    }
    let fixed: serde_json::Map<String, serde_json::Value> = g
        .fixed
        .iter()
        .map(|(s, v)| (g.names[*s].clone(), json!(to_fraction(v))))
        .collect();
    json!({
        "states": g.names,
        "initial": g.names[g.initial],
        "targets": g.targets.iter().map(|t| &g.names[*t]).collect::<Vec<_>>(),
        "fixed": fixed,
        "transitions": transitions,
    })
}

/// Where an original state ended up after normalization.
#[derive(Debug, Clone, PartialEq)]
pub enum StateRef {
    State(usize),
    Target,
    Losing,
    Fixed(Rational),
}

/// A game whose target states and surely-losing states are collapsed into one absorbing sink
/// each, and whose fixed-value states are replaced by branches into those sinks.
#[derive(Debug, Clone)]
pub struct NormalizedCsg {
    game: Csg,
    target: usize,
    losing: usize,
    origin: Csg,
    state_map: Vec<StateRef>,
}

impl NormalizedCsg {
    pub fn game(&self) -> &Csg {
        &self.game
    }

    pub fn original(&self) -> &Csg {
        &self.origin
    }

    pub fn target_sink(&self) -> usize {
        self.target
    }

    pub fn losing_sink(&self) -> usize {
        self.losing
    }

    pub fn is_sink(&self, s: usize) -> bool {
        s == self.target || s == self.losing
    }

    /// Non-sink states of the normalized game in index order.
    pub fn inner_states(&self) -> BTreeSet<usize> {
        (0..self.game.num_states()).filter(|&s| !self.is_sink(s)).collect()
    }

    /// Image of each original state, indexed by original state.
    pub fn state_map(&self) -> &[StateRef] {
        &self.state_map
    }
}

impl std::ops::Deref for NormalizedCsg {
    type Target = Csg;
    fn deref(&self) -> &Csg {
        &self.game
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Target,
    Losing,
    State(usize),
}

/// Distributions with mass into targets and fixed-value states redirected to virtual sinks.
fn redirected(g: &Csg, s: usize, a: usize, b: usize) -> BTreeMap<Node, Rational> {
    let mut out: BTreeMap<Node, Rational> = BTreeMap::new();
    let mut add = |node: Node, p: Rational| {
        if !p.is_zero() {
            *out.entry(node).or_insert_with(Rational::zero) += p;
        }
    };
    for (t, p) in g.delta(s, a, b) {
        if g.targets.contains(t) {
            add(Node::Target, p.clone());
        } else if let Some(v) = g.fixed.get(t) {
            add(Node::Target, p * v);
            add(Node::Losing, p * (Rational::one() - v));
        } else {
            add(Node::State(*t), p.clone());
        }
    }
    out
}

/// States from which Player S can keep the play away from the targets forever with
/// certainty, including fixed-value states of value zero.
pub fn compute_winning_region(g: &Csg) -> BTreeSet<usize> {
    let regular: Vec<usize> = (0..g.num_states())
        .filter(|s| !g.targets.contains(s) && !g.fixed.contains_key(s))
        .collect();
    let mut w: BTreeSet<usize> = regular.iter().copied().collect();
    loop {
        let next: BTreeSet<usize> = w
            .iter()
            .copied()
            .filter(|&s| {
                (0..g.actions_s[s].len()).any(|b| {
                    (0..g.actions_r[s].len()).all(|a| {
                        redirected(g, s, a, b).keys().all(|node| match node {
                            Node::Target => false,
                            Node::Losing => true,
                            Node::State(t) => w.contains(t),
                        })
                    })
                })
            })
            .collect();
        if next == w {
            break;
        }
        w = next;
    }
    w.extend(g.fixed.iter().filter(|(_, v)| v.is_zero()).map(|(s, _)| *s));
    w
}

fn fresh_name(g: &Csg, base: &str) -> String {
    let mut name = base.to_string();
    while g.index_of(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Collapses targets into a target sink, the surely-losing region into a losing sink and
/// eliminates fixed-value states. Existing absorbing singletons are reused as sinks in place.
pub fn normalize(g: &Csg) -> NormalizedCsg {
    let w = compute_winning_region(g);
    let n = g.num_states();
    let reuse = |set: Vec<usize>| -> Option<usize> {
        match set.as_slice() {
            [s] if !g.fixed.contains_key(s) && g.is_absorbing(*s) => Some(*s),
            _ => None,
        }
    };
    let reuse_target = reuse(g.targets.iter().copied().collect());
    let reuse_losing = reuse(w.iter().copied().filter(|s| !g.fixed.contains_key(s)).collect());

    let mut names = Vec::new();
    let mut new_index = vec![None; n];
    let mut target = None;
    let mut losing = None;
    for (s, slot) in new_index.iter_mut().enumerate() {
        if Some(s) == reuse_target {
            target = Some(names.len());
        } else if Some(s) == reuse_losing {
            losing = Some(names.len());
        } else if g.targets.contains(&s) || g.fixed.contains_key(&s) || w.contains(&s) {
            continue;
        }
        *slot = Some(names.len());
        names.push(g.names[s].clone());
    }
    let target = target.unwrap_or_else(|| {
        names.push(fresh_name(g, "<target>"));
        names.len() - 1
    });
    let losing = losing.unwrap_or_else(|| {
        names.push(fresh_name(g, "<losing>"));
        names.len() - 1
    });

    let sink_actions = || vec![SINK_ACTION.to_string()];
    let m = names.len();
    let mut actions_r = vec![Vec::new(); m];
    let mut actions_s = vec![Vec::new(); m];
    let mut delta = vec![Vec::new(); m];
    for sink in [target, losing] {
        actions_r[sink] = sink_actions();
        actions_s[sink] = sink_actions();
        delta[sink] = vec![vec![vec![(sink, Rational::one())]]];
    }
    for s in 0..n {
        let Some(t) = new_index[s] else { continue };
        if t == target || t == losing {
            continue;
        }
        actions_r[t] = g.actions_r[s].clone();
        actions_s[t] = g.actions_s[s].clone();
        delta[t] = (0..g.actions_r[s].len())
            .map(|a| {
                (0..g.actions_s[s].len())
                    .map(|b| {
                        let mut dist: BTreeMap<usize, Rational> = BTreeMap::new();
                        for (node, p) in redirected(g, s, a, b) {
                            let idx = match node {
                                Node::Target => target,
                                Node::Losing => losing,
                                Node::State(u) if w.contains(&u) => losing,
                                Node::State(u) => new_index[u].expect("kept state"),
                            };
                            *dist.entry(idx).or_insert_with(Rational::zero) += p;
                        }
                        dist.into_iter().collect()
                    })
                    .collect()
            })
            .collect();
    }

    let state_map: Vec<StateRef> = (0..n)
        .map(|s| {
            if g.targets.contains(&s) {
                StateRef::Target
            } else if let Some(v) = g.fixed.get(&s) {
                if v.is_zero() {
                    StateRef::Losing
                } else {
                    StateRef::Fixed(v.clone())
                }
            } else if w.contains(&s) {
                StateRef::Losing
            } else {
                StateRef::State(new_index[s].expect("kept state"))
            }
        })
        .collect();
    let initial = match &state_map[g.initial] {
        StateRef::State(i) => *i,
        StateRef::Target => target,
        _ => losing,
    };
    let game = Csg::new(
        names,
        initial,
        BTreeSet::from([target]),
        BTreeMap::new(),
        actions_r,
        actions_s,
        delta,
    )
    .expect("normalization preserves well-formedness");
    NormalizedCsg {
        game,
        target,
        losing,
        origin: g.clone(),
        state_map,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const HIDE: &str = r#"{
        "states": ["s_hide", "s_home", "s_wet"],
        "initial": "s_hide",
        "targets": ["s_home"],
        "transitions": [
            {"from": "s_hide", "aR": "hide", "aS": "throw", "to": [{"state": "s_home", "prob": 1}]},
            {"from": "s_hide", "aR": "hide", "aS": "wait", "to": [{"state": "s_hide", "prob": 1}]},
            {"from": "s_hide", "aR": "run", "aS": "throw", "to": [{"state": "s_wet", "prob": 1}]},
            {"from": "s_hide", "aR": "run", "aS": "wait", "to": [
                {"state": "s_hide", "prob": "1/3"}, {"state": "s_home", "prob": "1/3"}, {"state": "s_wet", "prob": "1/3"}]},
            {"from": "s_wet", "aR": "-", "aS": "-", "to": [{"state": "s_wet", "prob": 1}]}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let g = parse_csg(HIDE).unwrap();
        assert_eq!(g.num_states(), 3);
        assert_eq!(g.actions_r(0), ["hide", "run"]);
        assert_eq!(g.actions_s(0), ["throw", "wait"]);
        assert_eq!(g.delta(0, 1, 1).len(), 3);
        let again = parse_csg(&to_json(&g).to_string()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn reports_distribution_sum() {
        let text = HIDE.replace(
            r#"{"from": "s_hide", "aR": "hide", "aS": "wait", "to": [{"state": "s_hide", "prob": 1}]}"#,
            r#"{"from": "s_hide", "aR": "hide", "aS": "wait", "to": [{"state": "s_hide", "prob": 0.5}, {"state": "s_wet", "prob": 0.4}]}"#,
        );
        let e = parse_csg(&text).unwrap_err();
        assert!(e.to_string().contains("sums to 9/10"), "{e}");
    }

    #[test]
    fn rejects_missing_action_pair() {
        let text = HIDE.replace(
            r#"{"from": "s_hide", "aR": "run", "aS": "throw", "to": [{"state": "s_wet", "prob": 1}]},"#,
            "",
        );
        assert!(matches!(parse_csg(&text), Err(ModelError::MissingTransition { .. })));
    }

    #[test]
    fn rejects_unknown_state_and_empty_actions() {
        let text = HIDE.replace(r#"{"state": "s_wet", "prob": 1}]},"#, r#"{"state": "nowhere", "prob": 1}]},"#);
        assert!(matches!(parse_csg(&text), Err(ModelError::UnknownState(_))));
        let text = HIDE.replace(
            r#"{"from": "s_wet", "aR": "-", "aS": "-", "to": [{"state": "s_wet", "prob": 1}]}"#,
            r#"{"from": "s_hide", "aR": "x", "aS": "y", "to": [{"state": "s_wet", "prob": 1}]}"#,
        );
        assert!(parse_csg(&text).is_err());
    }

    #[test]
    fn normalization_keeps_absorbing_singletons() {
        let g = parse_csg(HIDE).unwrap();
        let w = compute_winning_region(&g);
        assert_eq!(w, BTreeSet::from([2]));
        let norm = normalize(&g);
        assert_eq!(norm.num_states(), 3);
        assert_eq!(norm.names(), g.names());
        assert_eq!((norm.target_sink(), norm.losing_sink()), (1, 2));
        assert_eq!(norm.delta(0, 1, 1), g.delta(0, 1, 1));
    }

    #[test]
    fn fixed_states_become_bernoulli_branches() {
        let text = r#"{
            "states": ["s", "c", "goal"],
            "initial": "s",
            "targets": ["goal"],
            "fixed": {"c": "1/5"},
            "transitions": [
                {"from": "s", "aR": "a", "aS": "b", "to": [{"state": "s", "prob": "1/2"}, {"state": "c", "prob": "1/2"}]}
            ]
        }"#;
        let g = parse_csg(text).unwrap();
        let norm = normalize(&g);
        assert_eq!(norm.names(), ["s", "goal", "<losing>"]);
        assert_eq!(
            norm.delta(0, 0, 0),
            &vec![(0, ratio(1, 2)), (1, ratio(1, 10)), (2, ratio(2, 5))]
        );
        assert_eq!(norm.state_map()[1], StateRef::Fixed(ratio(1, 5)));
    }

    #[test]
    fn winning_region_needs_a_uniform_column() {
        // S must pick one column that works against every R action.
        let text = r#"{
            "states": ["s", "goal", "trap"],
            "initial": "s",
            "targets": ["goal"],
            "transitions": [
                {"from": "s", "aR": "a", "aS": "x", "to": [{"state": "goal", "prob": 1}]},
                {"from": "s", "aR": "a", "aS": "y", "to": [{"state": "trap", "prob": 1}]},
                {"from": "s", "aR": "b", "aS": "x", "to": [{"state": "trap", "prob": 1}]},
                {"from": "s", "aR": "b", "aS": "y", "to": [{"state": "goal", "prob": 1}]},
                {"from": "trap", "aR": "-", "aS": "-", "to": [{"state": "trap", "prob": 1}]}
            ]
        }"#;
        let g = parse_csg(text).unwrap();
        assert_eq!(compute_winning_region(&g), BTreeSet::from([2]));
    }
}
