//! Subset-construction machinery for the finite-word languages: plain
//! traces, quiescent traces, and finite fair traces. Internal moves are
//! folded away by closure; inclusion runs a product of one automaton's
//! subsets against the other's.

use super::engine::{fair_search, SearchSpec};
use crate::model::Automaton;
use std::collections::{BTreeMap, BTreeSet};

/// Closes a state set under internal transitions.
pub(crate) fn closure(auto: &Automaton, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = set.clone();
    let mut queue: Vec<usize> = out.iter().copied().collect();
    while let Some(s) = queue.pop() {
        for &t in auto.outgoing(s) {
            let tr = &auto.transitions()[t];
            if auto.is_internal(tr.action) && out.insert(tr.to) {
                queue.push(tr.to);
            }
        }
    }
    out
}

/// One external step followed by closure. The action is looked up by
/// name; an unknown or non-external name yields the empty set.
pub(crate) fn step(auto: &Automaton, set: &BTreeSet<usize>, letter: &str) -> BTreeSet<usize> {
    let action = match auto.action_index(letter) {
        Some(a) if auto.is_external(a) => a,
        _ => return BTreeSet::new(),
    };
    let mut next = BTreeSet::new();
    for &s in set {
        for &t in auto.outgoing(s) {
            let tr = &auto.transitions()[t];
            if tr.action == action {
                next.insert(tr.to);
            }
        }
    }
    closure(auto, &next)
}

pub(crate) fn initial_subset(auto: &Automaton) -> BTreeSet<usize> {
    closure(auto, auto.starts())
}

/// Does some word accepted by `b` (per `acc_b`) escape `a` (per
/// `acc_a`)? Returns the lexicographically earliest such word found by
/// breadth-first search over subset pairs, or `None` when the inclusion
/// holds. Letters range over `b`'s external alphabet.
pub(crate) fn nfa_inclusion(
    b: &Automaton,
    acc_b: &[bool],
    a: &Automaton,
    acc_a: &[bool],
) -> Option<Vec<String>> {
    let letters: Vec<String> = b.external_names().into_iter().collect();
    let start = (initial_subset(b), initial_subset(a));
    let accepts = |set: &BTreeSet<usize>, acc: &[bool]| set.iter().any(|&s| acc[s]);
    let mut seen: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    let key = |pair: &(BTreeSet<usize>, BTreeSet<usize>)| {
        (
            pair.0.iter().copied().collect::<Vec<_>>(),
            pair.1.iter().copied().collect::<Vec<_>>(),
        )
    };
    seen.insert(key(&start));
    let mut queue: Vec<((BTreeSet<usize>, BTreeSet<usize>), Vec<String>)> =
        vec![(start, Vec::new())];
    let mut head = 0;
    while head < queue.len() {
        let (pair, word) = queue[head].clone();
        head += 1;
        if accepts(&pair.0, acc_b) && !accepts(&pair.1, acc_a) {
            return Some(word);
        }
        for letter in &letters {
            let nb = step(b, &pair.0, letter);
            if nb.is_empty() {
                continue;
            }
            let na = step(a, &pair.1, letter);
            let next = (nb, na);
            if seen.insert(key(&next)) {
                let mut w = word.clone();
                w.push(letter.clone());
                queue.push((next, w));
            }
        }
    }
    None
}

/// Membership of a finite word under an accepting-state mask.
pub(crate) fn nfa_membership(auto: &Automaton, acc: &[bool], word: &[String]) -> bool {
    let mut set = initial_subset(auto);
    for letter in word {
        set = step(auto, &set, letter);
        if set.is_empty() {
            return false;
        }
    }
    set.iter().any(|&s| acc[s])
}

/// Per-state mask: can the automaton, starting at this state, produce a
/// fair execution with empty trace? True at quiescent states, states
/// with an internal path to one, and states carrying a fair internal
/// divergence.
pub(crate) fn fair_epsilon_mask(auto: &Automaton) -> Vec<bool> {
    let internal: Vec<bool> = (0..auto.actions().len())
        .map(|a| auto.is_internal(a))
        .collect();
    let mut mask = vec![false; auto.states().len()];
    let mut memo: BTreeMap<Vec<usize>, bool> = BTreeMap::new();
    for s in 0..auto.states().len() {
        // Memoise by the internal reachability set: states sharing it
        // share the verdict.
        let mut spec = SearchSpec::new(auto);
        spec.roots = [s].into();
        spec.allow_action = Some(internal.clone());
        let reach: BTreeSet<usize> = closure(auto, &[s].into());
        let reach_key: Vec<usize> = reach.iter().copied().collect();
        let verdict = *memo
            .entry(reach_key)
            .or_insert_with(|| fair_search(&spec).is_some());
        mask[s] = verdict;
    }
    mask
}

/// An acceptor for a finite-word trace language of an automaton: the
/// automaton itself with an accepting-state mask, read through internal
/// closures.
#[derive(Debug, Clone)]
pub struct FiniteTraceAcceptor {
    automaton: Automaton,
    accepting: Vec<bool>,
}

impl FiniteTraceAcceptor {
    pub(crate) fn new(automaton: Automaton, accepting: Vec<bool>) -> FiniteTraceAcceptor {
        FiniteTraceAcceptor { automaton, accepting }
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn accepting_mask(&self) -> &[bool] {
        &self.accepting
    }

    pub fn accepting_states(&self) -> Vec<String> {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &acc)| acc)
            .map(|(s, _)| self.automaton.state_name(s).to_string())
            .collect()
    }

    pub fn accepts(&self, word: &[String]) -> bool {
        nfa_membership(&self.automaton, &self.accepting, word)
    }

    /// Enumerates the accepted words up to a length bound — a test and
    /// diagnostics helper, exponential in the bound.
    pub fn words_up_to(&self, max_len: usize) -> BTreeSet<Vec<String>> {
        let letters: Vec<String> = self.automaton.external_names().into_iter().collect();
        let mut out = BTreeSet::new();
        let mut layer = vec![(initial_subset(&self.automaton), Vec::new())];
        for _ in 0..=max_len {
            let mut next = Vec::new();
            for (set, word) in &layer {
                if set.iter().any(|&s| self.accepting[s]) {
                    out.insert(word.clone());
                }
                if word.len() < max_len {
                    for letter in &letters {
                        let stepped = step(&self.automaton, set, letter);
                        if !stepped.is_empty() {
                            let mut w = word.clone();
                            w.push(letter.clone());
                            next.push((stepped, w));
                        }
                    }
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        out
    }
}
