//! The fair-execution search engine. One algorithm serves every verdict
//! and emptiness query: find a fair execution of an automaton that stays
//! clear of avoided states and actions, as either a finite execution
//! ending in a quiescent state or a lasso whose loop discharges every
//! task obligation.

use crate::model::{Automaton, ExecutionWitness, FiniteExecution, LassoExecution};
use std::collections::BTreeSet;

/// A configured search. Enabledness and quiescence are always evaluated
/// in the unrestricted automaton; the avoidance masks and the optional
/// action allow-list only restrict which transitions the witness may
/// take. `required_edges` adds loop obligations beyond the task ones:
/// each mask must contribute at least one transition to the loop.
pub(crate) struct SearchSpec<'a> {
    pub auto: &'a Automaton,
    pub roots: BTreeSet<usize>,
    pub avoid_state: Vec<bool>,
    pub avoid_action: Vec<bool>,
    pub allow_action: Option<Vec<bool>>,
    pub lasso_only: bool,
    pub required_edges: Vec<Vec<bool>>,
}

impl<'a> SearchSpec<'a> {
    pub fn new(auto: &'a Automaton) -> SearchSpec<'a> {
        SearchSpec {
            auto,
            roots: auto.starts().clone(),
            avoid_state: vec![false; auto.states().len()],
            avoid_action: vec![false; auto.actions().len()],
            allow_action: None,
            lasso_only: false,
            required_edges: Vec::new(),
        }
    }

    pub fn edge_allowed(&self, t: usize) -> bool {
        let tr = &self.auto.transitions()[t];
        !self.avoid_action[tr.action]
            && self
                .allow_action
                .as_ref()
                .map_or(true, |allow| allow[tr.action])
            && !self.avoid_state[tr.from]
            && !self.avoid_state[tr.to]
    }
}

/// Breadth-first exploration of the restricted graph from the spec's
/// roots. Returns the discovery order and parent transitions, from which
/// shortest stems are reconstructed.
pub(crate) fn explore(spec: &SearchSpec) -> (Vec<usize>, Vec<Option<usize>>) {
    let auto = spec.auto;
    let mut parent: Vec<Option<usize>> = vec![None; auto.states().len()];
    let mut seen = vec![false; auto.states().len()];
    let mut order: Vec<usize> = Vec::new();
    for &r in &spec.roots {
        if !spec.avoid_state[r] && !seen[r] {
            seen[r] = true;
            order.push(r);
        }
    }
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        head += 1;
        for &t in auto.outgoing(s) {
            if !spec.edge_allowed(t) {
                continue;
            }
            let to = auto.transitions()[t].to;
            if !seen[to] {
                seen[to] = true;
                parent[to] = Some(t);
                order.push(to);
            }
        }
    }
    (order, parent)
}

/// Runs the search. Finite witnesses are preferred; the lasso pass scans
/// strongly connected components of the restricted graph in a fixed
/// order, so results are deterministic.
pub(crate) fn fair_search(spec: &SearchSpec) -> Option<ExecutionWitness> {
    debug_assert!(
        spec.required_edges.is_empty() || spec.lasso_only,
        "loop obligations make sense only for lasso searches"
    );
    let auto = spec.auto;
    let (order, parent) = explore(spec);
    if order.is_empty() {
        return None;
    }

    if !spec.lasso_only {
        for &s in &order {
            if auto.quiescent_at(s) {
                let (states, actions) = walk_to_root(auto, &parent, s);
                return Some(ExecutionWitness::Finite(FiniteExecution::raw(
                    auto, states, actions,
                )));
            }
        }
    }

    let sccs = tarjan(auto, spec, &order);
    for members in sccs {
        // Entry point: the member discovered first.
        let entry = *members
            .iter()
            .min_by_key(|&&s| order.iter().position(|&o| o == s).unwrap())
            .unwrap();
        let Some((loop_states, loop_actions)) = assemble_loop(auto, spec, &members, entry, &[])
        else {
            continue;
        };
        let (stem_states, stem_actions) = walk_to_root(auto, &parent, entry);
        let stem = FiniteExecution::raw(auto, stem_states, stem_actions);
        let lasso = LassoExecution::new(auto, stem, loop_states, loop_actions)
            .expect("assembled loop is a closed walk");
        return Some(ExecutionWitness::Lasso(lasso));
    }
    None
}

/// Builds a loop through the strongly connected component that starts
/// and ends at `entry`, visits every member, traverses one action of
/// each task that is enabled at all members, satisfies the spec's
/// `required_edges` masks, and finally takes every transition listed in
/// `extra_edges` (with multiplicity, in order; all must lie inside the
/// component). Returns `None` when the component has no allowed edge or
/// a task obligation cannot be met.
pub(crate) fn assemble_loop(
    auto: &Automaton,
    spec: &SearchSpec,
    members: &[usize],
    entry: usize,
    extra_edges: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let member_set: BTreeSet<usize> = members.iter().copied().collect();
    debug_assert!(member_set.contains(&entry));
    let scc_edges: Vec<usize> = members
        .iter()
        .flat_map(|&s| auto.outgoing(s).iter().copied())
        .filter(|&t| spec.edge_allowed(t) && member_set.contains(&auto.transitions()[t].to))
        .collect();
    if scc_edges.is_empty() {
        return None;
    }
    // Task obligations: a task enabled at every member must appear as a
    // loop action; a disabling member is covered because the loop visits
    // every member.
    let mut obligations: Vec<usize> = Vec::new();
    for task in auto.tasks() {
        if members.iter().any(|&s| !auto.task_enabled_at(s, task)) {
            continue;
        }
        let t = scc_edges
            .iter()
            .find(|&&t| task.actions.contains(&auto.transitions()[t].action))?;
        obligations.push(*t);
    }
    for mask in &spec.required_edges {
        obligations.push(*scc_edges.iter().find(|&&t| mask[t])?);
    }
    obligations.push(scc_edges[0]);
    obligations.sort_unstable();
    obligations.dedup();
    obligations.extend_from_slice(extra_edges);

    // Loop plan: visit every member, then traverse every obligation
    // edge, then return to the entry. Paths run inside the component.
    let mut loop_states = vec![entry];
    let mut loop_actions = Vec::new();
    let mut cur = entry;
    let extend = |path: (Vec<usize>, Vec<usize>),
                      loop_states: &mut Vec<usize>,
                      loop_actions: &mut Vec<usize>| {
        let (states, actions) = path;
        loop_states.extend_from_slice(&states[1..]);
        loop_actions.extend_from_slice(&actions);
    };
    for &s in members {
        if s != cur {
            extend(
                scc_path(auto, spec, &member_set, cur, s),
                &mut loop_states,
                &mut loop_actions,
            );
            cur = s;
        }
    }
    for &t in &obligations {
        let tr = auto.transitions()[t];
        debug_assert!(member_set.contains(&tr.from) && member_set.contains(&tr.to));
        if cur != tr.from {
            extend(
                scc_path(auto, spec, &member_set, cur, tr.from),
                &mut loop_states,
                &mut loop_actions,
            );
        }
        loop_states.push(tr.to);
        loop_actions.push(tr.action);
        cur = tr.to;
    }
    if cur != entry {
        extend(
            scc_path(auto, spec, &member_set, cur, entry),
            &mut loop_states,
            &mut loop_actions,
        );
    }
    Some((loop_states, loop_actions))
}

/// Shortest path between two members of a strongly connected component,
/// through allowed component edges only.
fn scc_path(
    auto: &Automaton,
    spec: &SearchSpec,
    members: &BTreeSet<usize>,
    from: usize,
    to: usize,
) -> (Vec<usize>, Vec<usize>) {
    let n = auto.states().len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = vec![from];
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        if s == to {
            break;
        }
        for &t in auto.outgoing(s) {
            if !spec.edge_allowed(t) {
                continue;
            }
            let next = auto.transitions()[t].to;
            if members.contains(&next) && !seen[next] {
                seen[next] = true;
                parent[next] = Some(t);
                queue.push(next);
            }
        }
    }
    debug_assert!(seen[to], "component is strongly connected");
    let mut states = vec![to];
    let mut actions = Vec::new();
    let mut cur = to;
    while cur != from {
        let t = parent[cur].expect("path exists inside the component");
        let tr = auto.transitions()[t];
        actions.push(tr.action);
        cur = tr.from;
        states.push(cur);
    }
    states.reverse();
    actions.reverse();
    (states, actions)
}

pub(crate) fn walk_to_root(
    auto: &Automaton,
    parent: &[Option<usize>],
    target: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut states = vec![target];
    let mut actions = Vec::new();
    let mut cur = target;
    while let Some(t) = parent[cur] {
        let tr = auto.transitions()[t];
        actions.push(tr.action);
        cur = tr.from;
        states.push(cur);
    }
    states.reverse();
    actions.reverse();
    (states, actions)
}

/// Iterative Tarjan over the restricted graph, visiting roots in
/// discovery order. Components are returned sorted by smallest member,
/// each with its members sorted.
pub(crate) fn tarjan(auto: &Automaton, spec: &SearchSpec, order: &[usize]) -> Vec<Vec<usize>> {
    let n = auto.states().len();
    let mut index: Vec<Option<u32>> = vec![None; n];
    let mut low: Vec<u32> = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index: u32 = 0;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // Explicit call stack of (state, position in its outgoing list).
    for &root in order {
        if index[root].is_some() {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, mut pos)) = call.last() {
            if pos == 0 {
                index[v] = Some(next_index);
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let outgoing = auto.outgoing(v);
            let mut descend = None;
            while pos < outgoing.len() {
                let t = outgoing[pos];
                pos += 1;
                if !spec.edge_allowed(t) {
                    continue;
                }
                let w = auto.transitions()[t].to;
                match index[w] {
                    None => {
                        descend = Some(w);
                        break;
                    }
                    Some(wi) => {
                        if on_stack[w] {
                            low[v] = low[v].min(wi);
                        }
                    }
                }
            }
            call.last_mut().unwrap().1 = pos;
            if let Some(w) = descend {
                call.push((w, 0));
                continue;
            }
            // v is finished.
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v].unwrap() {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                sccs.push(members);
            }
        }
    }
    sccs.sort_by_key(|m| m[0]);
    sccs
}
