//! Infinite-behaviour machinery: a Büchi acceptor for the infinite fair
//! traces of an automaton, exact ω-language inclusion through the
//! transition-monoid (Ramsey) method with witness words, membership of
//! an ultimately periodic word via a tracker product, and a bounded
//! lasso-enumeration fallback.

use super::engine::{fair_search, SearchSpec};
use crate::model::{
    Automaton, ExecutionWitness, FiniteExecution, LassoExecution, LassoWord, Transition, Word,
};
use crate::semantics;
use std::collections::{BTreeMap, BTreeSet};

/// Cap on Büchi state counts for the exact method; beyond it the caller
/// falls back to bounded search.
const BUCHI_STATE_CAP: usize = 48;
/// Cap on distinct joint profiles generated during monoid closure.
const MONOID_CAP: usize = 600;
/// Cap on (state, event-set) pairs when folding internal segments.
const FOLD_PAIR_CAP: usize = 4096;
/// Node budget for the bounded lasso enumeration.
const ENUM_BUDGET: usize = 20_000;
/// Depth cap for one enumerated loop.
const LOOP_DEPTH_CAP: usize = 8;

// ---------------------------------------------------------------------
// Büchi acceptor for infinite fair traces
// ---------------------------------------------------------------------

/// Büchi automaton over an externally supplied alphabet. States encode
/// (automaton state, task-obligation counter, pulse); the pulse marks a
/// completed round of obligations and is the acceptance condition.
pub(crate) struct Buchi {
    pub n: usize,
    pub inits: Vec<usize>,
    pub finals: Vec<bool>,
    /// Per alphabet letter: sorted, deduplicated (from, to) pairs.
    pub delta: Vec<Vec<(usize, usize)>>,
}

/// Folds internal segments into single-letter Büchi transitions. A word
/// is accepted iff the automaton has a fair execution with that infinite
/// trace: each letter transition carries the set of tasks witnessed
/// satisfied (disabled at a visited state, or an action of the task
/// taken) along the folded segment, and a round-robin counter turns
/// "every task satisfied infinitely often" into a plain Büchi condition.
/// Returns `None` when the construction exceeds its caps.
pub(crate) fn fair_buchi(auto: &Automaton, alphabet: &[String]) -> Option<Buchi> {
    let m = auto.tasks().len();
    if m > 20 {
        return None;
    }
    let slots = m.max(1);
    let n_states = auto.states().len();
    let n = n_states * slots * 2;
    if n > BUCHI_STATE_CAP {
        return None;
    }

    let disabled_mask: Vec<u32> = (0..n_states)
        .map(|s| {
            auto.tasks()
                .iter()
                .enumerate()
                .filter(|(_, task)| !auto.task_enabled_at(s, task))
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let action_mask: Vec<u32> = (0..auto.actions().len())
        .map(|a| {
            auto.tasks()
                .iter()
                .enumerate()
                .filter(|(_, task)| task.actions.contains(&a))
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();

    // For each state x: maximal (state, events) pairs reachable through
    // internal transitions, events accumulating task satisfactions.
    let fold_from = |x: usize| -> Option<Vec<(usize, u32)>> {
        let mut frontier: Vec<(usize, u32)> = vec![(x, disabled_mask[x])];
        let mut best: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        best.insert(x, vec![disabled_mask[x]]);
        let mut total = 1usize;
        while let Some((z, events)) = frontier.pop() {
            for &t in auto.outgoing(z) {
                let tr = &auto.transitions()[t];
                if !auto.is_internal(tr.action) {
                    continue;
                }
                let next = events | action_mask[tr.action] | disabled_mask[tr.to];
                let masks = best.entry(tr.to).or_default();
                if masks.iter().any(|&m0| m0 | next == m0) {
                    continue; // dominated by an existing superset
                }
                masks.retain(|&m0| m0 | next != next);
                masks.push(next);
                total += 1;
                if total > FOLD_PAIR_CAP {
                    return None;
                }
                frontier.push((tr.to, next));
            }
        }
        Some(
            best.into_iter()
                .flat_map(|(z, masks)| masks.into_iter().map(move |e| (z, e)))
                .collect(),
        )
    };
    let folds: Vec<Vec<(usize, u32)>> = (0..n_states)
        .map(fold_from)
        .collect::<Option<Vec<_>>>()?;

    let id = |x: usize, c: usize, p: usize| (x * slots + c) * 2 + p;
    let mut delta: Vec<Vec<(usize, usize)>> = vec![Vec::new(); alphabet.len()];
    for (li, letter) in alphabet.iter().enumerate() {
        let action = match auto.action_index(letter) {
            Some(a) if auto.is_external(a) => a,
            _ => continue,
        };
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for x in 0..n_states {
            for &(z, events) in &folds[x] {
                for &t in auto.outgoing(z) {
                    let tr = &auto.transitions()[t];
                    if tr.action != action {
                        continue;
                    }
                    let sat = events | action_mask[action];
                    for c in 0..slots {
                        let advanced = if m == 0 {
                            slots // always wraps
                        } else if sat & (1 << c) != 0 {
                            c + 1
                        } else {
                            c
                        };
                        let (c2, p2) = if advanced >= slots { (0, 1) } else { (advanced, 0) };
                        for p in 0..2 {
                            edges.insert((id(x, c, p), id(tr.to, c2, p2)));
                        }
                    }
                }
            }
        }
        delta[li] = edges.into_iter().collect();
    }

    let inits = auto.starts().iter().map(|&s| id(s, 0, 0)).collect();
    let finals = (0..n).map(|b| b % 2 == 1).collect();
    Some(Buchi { n, inits, finals, delta })
}

// ---------------------------------------------------------------------
// Ramsey-style inclusion over joint profiles
// ---------------------------------------------------------------------

/// Profile entry: 0 no path, 1 path, 2 path through a final state.
type Profile = Vec<u8>;

fn letter_profile(b: &Buchi, li: usize) -> Profile {
    let mut p = vec![0u8; b.n * b.n];
    for &(from, to) in &b.delta[li] {
        let v = if b.finals[from] || b.finals[to] { 2 } else { 1 };
        let cell = &mut p[from * b.n + to];
        *cell = (*cell).max(v);
    }
    p
}

fn compose_profiles(n: usize, a: &Profile, b: &Profile) -> Profile {
    let mut out = vec![0u8; n * n];
    for p in 0..n {
        let row = &a[p * n..(p + 1) * n];
        let out_row = &mut out[p * n..(p + 1) * n];
        for (r, &x) in row.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (q, &y) in b[r * n..(r + 1) * n].iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let v = if x == 2 || y == 2 { 2 } else { 1 };
                if v > out_row[q] {
                    out_row[q] = v;
                }
            }
        }
    }
    out
}

struct MonoidElement {
    prof_a: Profile,
    prof_b: Profile,
    word: Vec<usize>, // letter indices
}

pub(crate) enum OmegaOutcome {
    /// Every infinite fair trace of B is one of A.
    Included,
    /// A verified ultimately periodic trace of B that A lacks.
    Counterexample(LassoWord),
    /// Caps exceeded; the caller should fall back to bounded search.
    GaveUp(String),
}

/// Decides inclusion of `bb`'s ω-language in `ba`'s via linked pairs of
/// the joint profile monoid. Every ultimately periodic word factors
/// through a linked pair (g, h) with h idempotent and g·h = g, and the
/// word u·v^ω built from the pair's witness words is accepted exactly
/// when the profile test passes; scanning all linked pairs therefore
/// decides inclusion. Counterexamples are re-verified by the caller.
pub(crate) fn omega_inclusion(
    ba: &Buchi,
    bb: &Buchi,
    alphabet: &[String],
) -> OmegaOutcome {
    // Generate the monoid by breadth-first word extension, deduplicating
    // on the joint profile pair.
    let mut elements: Vec<MonoidElement> = Vec::new();
    let mut index: BTreeMap<(Profile, Profile), usize> = BTreeMap::new();
    let letter_a: Vec<Profile> = (0..alphabet.len()).map(|l| letter_profile(ba, l)).collect();
    let letter_b: Vec<Profile> = (0..alphabet.len()).map(|l| letter_profile(bb, l)).collect();
    let mut queue: Vec<usize> = Vec::new();
    for l in 0..alphabet.len() {
        let key = (letter_a[l].clone(), letter_b[l].clone());
        if !index.contains_key(&key) {
            index.insert(key.clone(), elements.len());
            queue.push(elements.len());
            elements.push(MonoidElement { prof_a: key.0, prof_b: key.1, word: vec![l] });
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        for l in 0..alphabet.len() {
            let pa = compose_profiles(ba.n, &elements[e].prof_a, &letter_a[l]);
            let pb = compose_profiles(bb.n, &elements[e].prof_b, &letter_b[l]);
            let key = (pa, pb);
            if !index.contains_key(&key) {
                if elements.len() >= MONOID_CAP {
                    return OmegaOutcome::GaveUp(format!(
                        "profile monoid exceeded {MONOID_CAP} elements"
                    ));
                }
                let mut word = elements[e].word.clone();
                word.push(l);
                index.insert(key.clone(), elements.len());
                queue.push(elements.len());
                elements.push(MonoidElement { prof_a: key.0, prof_b: key.1, word });
            }
        }
    }

    // Reachability bitmasks from initial states (value >= 1 suffices for
    // the stem side of the acceptance test).
    let init_reach = |b: &Buchi, prof: &Profile| -> u128 {
        let mut mask = 0u128;
        for &p in &b.inits {
            for q in 0..b.n {
                if prof[p * b.n + q] >= 1 {
                    mask |= 1 << q;
                }
            }
        }
        mask
    };
    let bool_rows = |b: &Buchi, prof: &Profile| -> Vec<u128> {
        (0..b.n)
            .map(|r| {
                let mut mask = 0u128;
                for q in 0..b.n {
                    if prof[r * b.n + q] >= 1 {
                        mask |= 1 << q;
                    }
                }
                mask
            })
            .collect()
    };
    let diag2 = |b: &Buchi, prof: &Profile| -> u128 {
        let mut mask = 0u128;
        for q in 0..b.n {
            if prof[q * b.n + q] == 2 {
                mask |= 1 << q;
            }
        }
        mask
    };

    let reach_a: Vec<u128> = elements.iter().map(|e| init_reach(ba, &e.prof_a)).collect();
    let reach_b: Vec<u128> = elements.iter().map(|e| init_reach(bb, &e.prof_b)).collect();

    for h in 0..elements.len() {
        // Idempotency of the joint profile.
        let ha = compose_profiles(ba.n, &elements[h].prof_a, &elements[h].prof_a);
        if ha != elements[h].prof_a {
            continue;
        }
        let hb = compose_profiles(bb.n, &elements[h].prof_b, &elements[h].prof_b);
        if hb != elements[h].prof_b {
            continue;
        }
        let rows_a = bool_rows(ba, &elements[h].prof_a);
        let rows_b = bool_rows(bb, &elements[h].prof_b);
        let qa = diag2(ba, &elements[h].prof_a);
        let qb = diag2(bb, &elements[h].prof_b);
        for g in 0..elements.len() {
            // The linked element g·h; only its initial reachability rows
            // matter, and those are boolean.
            let fold = |reach: u128, rows: &[u128]| -> u128 {
                let mut out = 0u128;
                for (r, &row) in rows.iter().enumerate() {
                    if reach & (1 << r) != 0 {
                        out |= row;
                    }
                }
                out
            };
            let gb = fold(reach_b[g], &rows_b);
            if gb & qb == 0 {
                continue; // B does not accept u·v^ω
            }
            let ga = fold(reach_a[g], &rows_a);
            if ga & qa != 0 {
                continue; // A accepts it too
            }
            let stem: Vec<String> = elements[g]
                .word
                .iter()
                .chain(elements[h].word.iter())
                .map(|&l| alphabet[l].clone())
                .collect();
            let cycle: Vec<String> =
                elements[h].word.iter().map(|&l| alphabet[l].clone()).collect();
            return OmegaOutcome::Counterexample(LassoWord { stem, cycle }.normalized());
        }
    }
    OmegaOutcome::Included
}

// ---------------------------------------------------------------------
// Membership of an ultimately periodic word via the tracker product
// ---------------------------------------------------------------------

/// Decides whether some fair execution of the automaton has the infinite
/// trace `stem·cycle^ω`, returning such an execution as a lasso. The
/// decision runs the fair-search engine on the product of the automaton
/// with a position tracker for the word; ghost transitions into a sink
/// keep every product state's enabled actions identical to the tracked
/// state's, so task enabledness is evaluated faithfully. An empty cycle
/// denotes no infinite word and yields `None`.
pub(crate) fn tracker_membership(a: &Automaton, word: &LassoWord) -> Option<LassoExecution> {
    if word.cycle.is_empty() {
        return None;
    }
    let letters: Vec<&String> = word.stem.iter().chain(word.cycle.iter()).collect();
    let n_pos = letters.len();
    let wrap = word.stem.len();
    let expected: Vec<Option<usize>> = letters
        .iter()
        .map(|name| a.action_index(name).filter(|&x| a.is_external(x)))
        .collect();
    let next_pos = |pos: usize| if pos + 1 == n_pos { wrap } else { pos + 1 };

    // Breadth-first discovery of reachable (state, position) pairs,
    // emitting raw edges: (from pair id, action, target pair id or sink,
    // advancing flag).
    let mut pair_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    for &s in a.starts() {
        let pair = (s, 0);
        if !pair_ids.contains_key(&pair) {
            pair_ids.insert(pair, pairs.len());
            queue.push(pairs.len());
            pairs.push(pair);
        }
    }
    let mut all_raw: Vec<(usize, usize, Option<usize>, bool)> = Vec::new();
    let mut head = 0;
    while head < queue.len() {
        let pid = queue[head];
        head += 1;
        let (s, pos) = pairs[pid];
        for &t in a.outgoing(s) {
            let tr = &a.transitions()[t];
            let target = if a.is_internal(tr.action) {
                Some(((tr.to, pos), false))
            } else if Some(tr.action) == expected[pos] {
                Some(((tr.to, next_pos(pos)), true))
            } else {
                None
            };
            match target {
                Some((pair, advancing)) => {
                    let tid = match pair_ids.get(&pair) {
                        Some(&tid) => tid,
                        None => {
                            let tid = pairs.len();
                            pair_ids.insert(pair, tid);
                            queue.push(tid);
                            pairs.push(pair);
                            tid
                        }
                    };
                    all_raw.push((pid, tr.action, Some(tid), advancing));
                }
                None => all_raw.push((pid, tr.action, None, false)),
            }
        }
    }

    // Canonical ordering: pairs sorted by (position, state); the sink
    // sorts last by name.
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (pairs[i].1, pairs[i].0));
    let mut renumber = vec![0usize; pairs.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        renumber[old_idx] = new_idx;
    }
    let mut states: Vec<String> = order
        .iter()
        .map(|&i| format!("p{:04}_{:04}", pairs[i].1, pairs[i].0))
        .collect();
    let sink = states.len();
    states.push("zz_sink".to_string());
    let pair_of: Vec<(usize, usize)> = order.iter().map(|&i| pairs[i]).collect();

    let mut advancing_triples: BTreeSet<Transition> = BTreeSet::new();
    let mut transitions: Vec<Transition> = all_raw
        .iter()
        .map(|&(from, action, to, advancing)| {
            let tr = Transition {
                from: renumber[from],
                action,
                to: to.map_or(sink, |tid| renumber[tid]),
            };
            if advancing {
                advancing_triples.insert(tr);
            }
            tr
        })
        .collect();
    transitions.sort_unstable();
    transitions.dedup();
    let rewards = vec![0.0; transitions.len()];
    let advancing_mask: Vec<bool> = transitions
        .iter()
        .map(|tr| advancing_triples.contains(tr))
        .collect();
    let starts: BTreeSet<usize> = a
        .starts()
        .iter()
        .map(|&s| renumber[pair_ids[&(s, 0)]])
        .collect();
    let product = Automaton::assemble(
        a.mode(),
        a.actions().to_vec(),
        states,
        starts,
        transitions,
        rewards,
        a.tasks().to_vec(),
        None,
    );

    let mut spec = SearchSpec::new(&product);
    spec.avoid_state[sink] = true;
    spec.lasso_only = true;
    spec.required_edges = vec![advancing_mask];
    let witness = fair_search(&spec)?;
    let lasso = match witness {
        ExecutionWitness::Lasso(l) => l,
        ExecutionWitness::Finite(_) => unreachable!("lasso-only search"),
    };

    // Map the product lasso back onto the automaton.
    let map_states = |states: &[usize]| -> Vec<usize> {
        states.iter().map(|&ps| pair_of[ps].0).collect()
    };
    let stem = FiniteExecution::new(
        a,
        map_states(lasso.stem().states()),
        lasso.stem().actions().to_vec(),
    )
    .expect("projected stem is an execution");
    let result = LassoExecution::new(
        a,
        stem,
        map_states(lasso.loop_states()),
        lasso.loop_actions().to_vec(),
    )
    .expect("projected loop is a closed walk");
    debug_assert!(semantics::is_fair_lasso(a, &result));
    debug_assert!(match semantics::trace_lasso(a, &result) {
        Word::Lasso(w) => omega_words_equal(&w, word),
        Word::Finite(_) => false,
    });
    Some(result)
}

/// Equality of ultimately periodic words, decided on a sufficiently long
/// common prefix.
pub(crate) fn omega_words_equal(x: &LassoWord, y: &LassoWord) -> bool {
    if x.cycle.is_empty() || y.cycle.is_empty() {
        return x.cycle.is_empty() && y.cycle.is_empty() && x.stem == y.stem;
    }
    let len = x.stem.len().max(y.stem.len()) + 2 * x.cycle.len() * y.cycle.len();
    (0..len).all(|i| lasso_letter(x, i) == lasso_letter(y, i))
}

fn lasso_letter<'a>(w: &'a LassoWord, i: usize) -> &'a str {
    if i < w.stem.len() {
        &w.stem[i]
    } else {
        &w.cycle[(i - w.stem.len()) % w.cycle.len()]
    }
}

// ---------------------------------------------------------------------
// Bounded lasso counterexample search
// ---------------------------------------------------------------------

/// Searches for a fair lasso of `b` whose trace is an infinite word the
/// tracker rejects for `a`. Enumeration is bounded (canonical stems,
/// loop depth and node budget capped), so a `None` certifies nothing.
pub(crate) fn bounded_lasso_counterexample(
    a: &Automaton,
    b: &Automaton,
    bound: usize,
) -> Option<(LassoWord, LassoExecution)> {
    let mut tested: BTreeSet<(Vec<String>, Vec<String>)> = BTreeSet::new();
    let mut check = |lasso: &LassoExecution| -> Option<LassoWord> {
        if !semantics::is_fair_lasso(b, lasso) {
            return None;
        }
        match semantics::trace_lasso(b, lasso) {
            Word::Lasso(w) => {
                if tested.insert((w.stem.clone(), w.cycle.clone()))
                    && tracker_membership(a, &w).is_none()
                {
                    Some(w)
                } else {
                    None
                }
            }
            Word::Finite(_) => None, // finite part is decided exactly elsewhere
        }
    };

    // The engine's own canonical fair lasso first.
    let mut spec = SearchSpec::new(b);
    spec.lasso_only = true;
    if let Some(ExecutionWitness::Lasso(lasso)) = fair_search(&spec) {
        if let Some(w) = check(&lasso) {
            return Some((w, lasso));
        }
    }

    // Canonical shortest stems from the start states.
    let n = b.states().len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut bfs: Vec<usize> = b.starts().iter().copied().collect();
    for &s in &bfs {
        seen[s] = true;
    }
    let mut head = 0;
    while head < bfs.len() {
        let s = bfs[head];
        head += 1;
        for &t in b.outgoing(s) {
            let to = b.transitions()[t].to;
            if !seen[to] {
                seen[to] = true;
                parent[to] = Some(t);
                bfs.push(to);
            }
        }
    }
    let stem_to = |target: usize| -> FiniteExecution {
        let mut states = vec![target];
        let mut actions = Vec::new();
        let mut cur = target;
        while let Some(t) = parent[cur] {
            let tr = b.transitions()[t];
            actions.push(tr.action);
            cur = tr.from;
            states.push(cur);
        }
        states.reverse();
        actions.reverse();
        FiniteExecution::new(b, states, actions).expect("breadth-first stem is an execution")
    };

    let mut budget = ENUM_BUDGET;
    let mut anchors: Vec<usize> = (0..n).filter(|&s| seen[s]).collect();
    anchors.sort_unstable();
    for &anchor in &anchors {
        let stem = stem_to(anchor);
        let depth_cap = bound.saturating_sub(stem.len()).clamp(1, LOOP_DEPTH_CAP);
        // Iterative walk enumeration from the anchor.
        let mut loop_states: Vec<usize> = vec![anchor];
        let mut loop_actions: Vec<usize> = Vec::new();
        let mut frames: Vec<std::slice::Iter<'_, usize>> = vec![b.outgoing(anchor).iter()];
        while let Some(frame) = frames.last_mut() {
            match frame.next() {
                None => {
                    frames.pop();
                    if !loop_actions.is_empty() {
                        loop_states.pop();
                        loop_actions.pop();
                    }
                }
                Some(&t) => {
                    if budget == 0 {
                        return None;
                    }
                    budget -= 1;
                    let tr = b.transitions()[t];
                    loop_states.push(tr.to);
                    loop_actions.push(tr.action);
                    if tr.to == anchor {
                        if let Ok(lasso) = LassoExecution::new(
                            b,
                            stem.clone(),
                            loop_states.clone(),
                            loop_actions.clone(),
                        ) {
                            if let Some(w) = check(&lasso) {
                                return Some((w, lasso));
                            }
                        }
                    }
                    if loop_actions.len() < depth_cap {
                        frames.push(b.outgoing(tr.to).iter());
                    } else {
                        loop_states.pop();
                        loop_actions.pop();
                    }
                }
            }
        }
    }
    None
}

/// Size of the reachable synchronized product of two automata: pairs
/// reachable by interleaving internal moves and stepping jointly on
/// shared external letters (solo on unshared ones). Gates the exact
/// ω-inclusion mode.
pub(crate) fn synchronized_product_size(a: &Automaton, b: &Automaton) -> usize {
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for &x in a.starts() {
        for &y in b.starts() {
            if seen.insert((x, y)) {
                queue.push((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop() {
        let push = |pair: (usize, usize), seen: &mut BTreeSet<(usize, usize)>,
                        queue: &mut Vec<(usize, usize)>| {
            if seen.insert(pair) {
                queue.push(pair);
            }
        };
        for &t in a.outgoing(x) {
            let tr = &a.transitions()[t];
            if a.is_internal(tr.action) {
                push((tr.to, y), &mut seen, &mut queue);
            } else {
                let name = a.action_name(tr.action);
                match b.action_index(name).filter(|&i| b.is_external(i)) {
                    None => push((tr.to, y), &mut seen, &mut queue),
                    Some(bi) => {
                        for &u in b.outgoing(y) {
                            let btr = &b.transitions()[u];
                            if btr.action == bi {
                                push((tr.to, btr.to), &mut seen, &mut queue);
                            }
                        }
                    }
                }
            }
        }
        for &u in b.outgoing(y) {
            let btr = &b.transitions()[u];
            if b.is_internal(btr.action) {
                push((x, btr.to), &mut seen, &mut queue);
            } else if a
                .action_index(b.action_name(btr.action))
                .filter(|&i| a.is_external(i))
                .is_none()
            {
                push((x, btr.to), &mut seen, &mut queue);
            }
        }
    }
    seen.len()
}
