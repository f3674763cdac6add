//! End components of the unified MDP in which each joint action pair is one action.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::model::Csg;

/// Joint action pairs at `s` whose successors all lie in `set`.
fn staying_pairs<'a>(g: &'a Csg, s: usize, set: &'a BTreeSet<usize>) -> impl Iterator<Item = (usize, usize)> + 'a {
    let cols = g.actions_s(s).len();
    (0..g.actions_r(s).len())
        .flat_map(move |a| (0..cols).map(move |b| (a, b)))
        .filter(move |&(a, b)| g.dest_within(s, a, b, set))
}

/// Strongly connected components of the graph induced by the pairs staying in `set`.
fn components(g: &Csg, set: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let states: Vec<usize> = set.iter().copied().collect();
    let mut graph = DiGraph::<usize, ()>::with_capacity(states.len(), 0);
    let nodes: Vec<_> = states.iter().map(|&s| graph.add_node(s)).collect();
    let pos = |s: usize| states.binary_search(&s).expect("member");
    for (i, &s) in states.iter().enumerate() {
        for (a, b) in staying_pairs(g, s, set) {
            for t in g.dest(s, a, b) {
                graph.update_edge(nodes[i], nodes[pos(t)], ());
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|scc| scc.into_iter().map(|n| graph[n]).collect())
        .collect()
}

/// Maximal end components inside `restrict`, ordered by their smallest state.
pub fn find_mecs(g: &Csg, restrict: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut work = vec![restrict.clone()];
    let mut mecs = Vec::new();
    while let Some(mut set) = work.pop() {
        // Drop states without any pair that stays inside.
        loop {
            let keep: BTreeSet<usize> = set
                .iter()
                .copied()
                .filter(|&s| staying_pairs(g, s, &set).next().is_some())
                .collect();
            if keep.len() == set.len() {
                break;
            }
            set = keep;
        }
        if set.is_empty() {
            continue;
        }
        let sccs = components(g, &set);
        if sccs.len() == 1 {
            mecs.push(set);
        } else {
            work.extend(sccs);
        }
    }
    mecs.sort_by_key(|m| *m.first().expect("non-empty"));
    mecs
}

/// Whether `set` is closed under some joint action pair at every state and strongly connected.
pub fn is_ec(g: &Csg, set: &BTreeSet<usize>) -> bool {
    if set.is_empty() || set.iter().any(|&s| staying_pairs(g, s, set).next().is_none()) {
        return false;
    }
    components(g, set).len() == 1
}
