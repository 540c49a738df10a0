//! Testing verdicts for a (system, test) pair: may, survival, should,
//! must over complete executions, must under fairness in its state- and
//! action-based forms, the minimum fair reward, and regime
//! admissibility.
//!
//! Every verdict is decided on a composition of the test with the
//! system. The LTS-style verdicts (may, surv, should, must_pr) hide the
//! product first — only the success action stays observable — while the
//! fairness-based verdicts keep the product's task structure intact.

use crate::algebra::{self, AlgebraError, CompatViolation, CompatibilityReport, Regime, Signature};
use crate::analysis::{self, engine, Completeness};
use crate::model::{
    ActionClass, Automaton, ExecutionWitness, FiniteExecution, LassoExecution, Mode,
    SUCCESS_ACTION,
};
use crate::semantics::{self, ExtReal};
use std::collections::BTreeSet;

/// Node budget for the bounded fair-lasso enumeration inside
/// [`min_fair_reward`].
const REWARD_ENUM_BUDGET: usize = 20_000;

/// Depth cap per anchor for that enumeration.
const REWARD_LOOP_DEPTH_CAP: usize = 8;

/// Outcome of one verdict query. The witness, when present, is an
/// execution of `product` — the composition the verdict was decided on.
/// For the universal verdicts (surv, should, must_pr, must_f,
/// must_f_ab) it demonstrates the failure; for may it demonstrates the
/// success.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub product: Automaton,
    pub witness: Option<ExecutionWitness>,
}

/// Hidden product for the LTS-style verdicts: plain composition (tasks
/// dropped), then everything but the success action made internal.
fn lts_product(a: &Automaton, t: &Automaton) -> Result<Automaton, AlgebraError> {
    Ok(algebra::hide_for_testing(&algebra::compose_plain(&[t, a])?))
}

/// Task-preserving product for the fairness-based verdicts; both
/// components must be I/O automata and strongly compatible.
fn io_product(a: &Automaton, t: &Automaton) -> Result<Automaton, AlgebraError> {
    if t.mode() != Mode::Io {
        return Err(AlgebraError::ModeMismatch { index: 1 });
    }
    if a.mode() != Mode::Io {
        return Err(AlgebraError::ModeMismatch { index: 2 });
    }
    algebra::compose(&[t, a])
}

/// Shortest execution from a start to a state satisfying `good`, by
/// breadth-first search; deterministic.
fn reach_witness<F: Fn(usize) -> bool>(p: &Automaton, good: F) -> Option<FiniteExecution> {
    let n = p.states().len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue: Vec<usize> = p.starts().iter().copied().collect();
    for &s in &queue {
        seen[s] = true;
    }
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        if good(s) {
            let (states, actions) = engine::walk_to_root(p, &parent, s);
            return Some(FiniteExecution::raw(p, states, actions));
        }
        for &t in p.outgoing(s) {
            let to = p.transitions()[t].to;
            if !seen[to] {
                seen[to] = true;
                parent[to] = Some(t);
                queue.push(to);
            }
        }
    }
    None
}

/// States from which a target state is reachable (reverse search over
/// the whole transition relation).
fn co_reachable<F: Fn(usize) -> bool>(p: &Automaton, target: F) -> Vec<bool> {
    let n = p.states().len();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, tr) in p.transitions().iter().enumerate() {
        incoming[tr.to].push(i);
    }
    let mut mark: Vec<bool> = (0..n).map(target).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&s| mark[s]).collect();
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        for &t in &incoming[s] {
            let from = p.transitions()[t].from;
            if !mark[from] {
                mark[from] = true;
                queue.push(from);
            }
        }
    }
    mark
}

/// Can the composition reach a success state? Holds iff yes; the
/// witness is the reaching execution.
pub fn may(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = lts_product(a, t)?;
    let mask = semantics::success_mask(&p);
    let witness = reach_witness(&p, |s| mask[s]).map(ExecutionWitness::Finite);
    Ok(Verdict { holds: witness.is_some(), product: p, witness })
}

/// Does the system survive the test — is no failure (success-enabled)
/// state reachable? The complement of [`may`], with the same witness.
pub fn surv(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = lts_product(a, t)?;
    let mask = semantics::success_mask(&p);
    let witness = reach_witness(&p, |s| mask[s]).map(ExecutionWitness::Finite);
    Ok(Verdict { holds: witness.is_none(), product: p, witness })
}

/// Can every reachable state of the composition still be extended to
/// reach a success state? The witness reaches a state from which no
/// success state is reachable.
pub fn should(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = lts_product(a, t)?;
    let mask = semantics::success_mask(&p);
    let can = co_reachable(&p, |s| mask[s]);
    let witness = reach_witness(&p, |s| !can[s]).map(ExecutionWitness::Finite);
    Ok(Verdict { holds: witness.is_none(), product: p, witness })
}

/// Must testing over complete executions: no execution of the hidden
/// composition may run forever, or deadlock, without passing a success
/// state. The witness is either a finite execution into a deadlock of
/// the full product or a reachable cycle, found by the same search that
/// serves the fairness verdicts — the hidden product carries no tasks,
/// so quiescence degenerates to deadlock and every cycle qualifies.
pub fn must_pr(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = lts_product(a, t)?;
    let mask = semantics::success_mask(&p);
    let witness = analysis::fair_emptiness(&p, |s| mask[s], &BTreeSet::new());
    Ok(Verdict { holds: witness.is_none(), product: p, witness })
}

/// Must testing under task fairness, state-based: every fair execution
/// of the (task-preserving) composition passes a success state. The
/// witness is a fair execution avoiding all success states.
pub fn must_f(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = io_product(a, t)?;
    let mask = semantics::success_mask(&p);
    let witness = analysis::fair_emptiness(&p, |s| mask[s], &BTreeSet::new());
    Ok(Verdict { holds: witness.is_none(), product: p, witness })
}

/// Must testing under task fairness, action-based: every fair trace of
/// the composition contains the success action. The witness is a fair
/// execution that never takes it.
pub fn must_f_ab(a: &Automaton, t: &Automaton) -> Result<Verdict, AlgebraError> {
    let p = io_product(a, t)?;
    let mut avoid = BTreeSet::new();
    if let Some(w) = p.action_index(SUCCESS_ACTION) {
        avoid.insert(w);
    }
    let witness = analysis::fair_emptiness(&p, |_| false, &avoid);
    Ok(Verdict { holds: witness.is_none(), product: p, witness })
}

/// Result of a minimum-fair-reward query over the composition of a
/// system with a reward test.
#[derive(Debug, Clone)]
pub struct RewardReport {
    pub value: ExtReal,
    pub product: Automaton,
    /// An execution attaining `value`, when one exists; `-inf` reached
    /// only in the limit (by pumping a negative cycle before
    /// terminating) carries no witness.
    pub witness: Option<ExecutionWitness>,
    pub completeness: Completeness,
    /// The winning value came from a zero-total loop, i.e. the
    /// limit-superior convention for infinite executions was decisive.
    pub used_lim_sup: bool,
    pub warnings: Vec<String>,
}

/// Shortest-path data over a state-subgraph, by iterated relaxation.
struct Paths {
    dist: Vec<f64>,
    reach: Vec<bool>,
    pred: Vec<Option<usize>>,
}

/// Bellman-Ford over the states enabled in `allowed`, from the given
/// sources at distance 0. `Err` carries the transition indices of a
/// reachable negative-total cycle.
fn bellman_ford(
    p: &Automaton,
    allowed: &[bool],
    sources: &BTreeSet<usize>,
) -> Result<Paths, Vec<usize>> {
    let n = p.states().len();
    let mut dist = vec![0.0f64; n];
    let mut reach = vec![false; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    for &s in sources {
        if allowed[s] {
            reach[s] = true;
        }
    }
    let mut last_improved = None;
    for _round in 0..n.max(1) {
        let mut changed = false;
        for (i, tr) in p.transitions().iter().enumerate() {
            if !allowed[tr.from] || !allowed[tr.to] || !reach[tr.from] {
                continue;
            }
            let cand = dist[tr.from] + p.reward(i);
            if !reach[tr.to] || cand < dist[tr.to] {
                reach[tr.to] = true;
                dist[tr.to] = cand;
                pred[tr.to] = Some(i);
                changed = true;
                last_improved = Some(tr.to);
            }
        }
        if !changed {
            return Ok(Paths { dist, reach, pred });
        }
    }
    // Still improving after |states| rounds: a negative cycle. Walk the
    // predecessor graph far enough back to be inside it, then read the
    // cycle off.
    let mut x = last_improved.expect("a round improved some state");
    for _ in 0..n {
        x = p.transitions()[pred[x].expect("improved states have predecessors")].from;
    }
    let mut cycle = Vec::new();
    let mut cur = x;
    loop {
        let t = pred[cur].expect("cycle states have predecessors");
        cycle.push(t);
        cur = p.transitions()[t].from;
        if cur == x {
            break;
        }
    }
    cycle.reverse();
    debug_assert!(cycle.iter().map(|&t| p.reward(t)).sum::<f64>() < 0.0);
    cycle
        .iter()
        .for_each(|&t| debug_assert!(allowed[p.transitions()[t].from]));
    Err(cycle)
}

/// Total reward along a walk given as states and actions; each step
/// names a unique transition of the automaton.
fn walk_reward(p: &Automaton, states: &[usize], actions: &[usize]) -> f64 {
    let mut sum = 0.0;
    for i in 0..actions.len() {
        let t = p
            .outgoing(states[i])
            .iter()
            .copied()
            .find(|&t| {
                let tr = p.transitions()[t];
                tr.action == actions[i] && tr.to == states[i + 1]
            })
            .expect("walk step names a transition");
        sum += p.reward(t);
    }
    sum
}

/// The minimum of the reward function over fair executions of the
/// composition of the system with a reward test.
///
/// `-inf` is certified exactly, from either of its two sources: a
/// negative-total cycle inside a component that supports a fair loop
/// (the pumped loop is itself a fair execution), or a negative-total
/// cycle on a corridor from a start to a quiescent state (pumping before
/// terminating drives the reward down without bound — an infimum no
/// single execution attains). Otherwise the minimum is taken over the
/// cheapest quiescent-terminated execution (exact shortest path, the
/// corridor being negative-cycle-free), the canonical fair loop of every
/// component that has one, and enumerated fair lassos up to the bound —
/// every lasso candidate entered through a cheapest-reward stem — exact
/// when no component supports an infinite fair execution, and
/// bound-limited otherwise.
pub fn min_fair_reward(
    a: &Automaton,
    t: &Automaton,
    bound: Option<usize>,
) -> Result<RewardReport, AlgebraError> {
    let p = io_product(a, t)?;
    let n = p.states().len();
    let k = bound.unwrap_or(2 * n + 2);
    let mut warnings: Vec<String> = Vec::new();

    let mut in_reach = vec![false; n];
    for s in p.reachable() {
        in_reach[s] = true;
    }

    // Degenerate but common: no rewards anywhere in reach, so every
    // execution scores 0 and any fair one is a witness.
    let all_zero = p
        .transitions()
        .iter()
        .enumerate()
        .all(|(i, tr)| !in_reach[tr.from] || p.reward(i) == 0.0);
    if all_zero {
        return Ok(match analysis::fair_emptiness(&p, |_| false, &BTreeSet::new()) {
            Some(w) => {
                let used = semantics::reward_used_lim_sup(&p, &w);
                RewardReport {
                    value: ExtReal::Finite(0.0),
                    product: p,
                    witness: Some(w),
                    completeness: Completeness::Exact,
                    used_lim_sup: used,
                    warnings,
                }
            }
            None => RewardReport {
                value: ExtReal::PosInf,
                product: p,
                witness: None,
                completeness: Completeness::Exact,
                used_lim_sup: false,
                warnings: vec!["the composition has no fair executions".to_string()],
            },
        });
    }

    // Corridor: reachable states that can still reach a quiescent state.
    let co_q = co_reachable(&p, |s| in_reach[s] && p.quiescent_at(s));
    let corridor: Vec<bool> = (0..n).map(|s| in_reach[s] && co_q[s]).collect();
    let sources: BTreeSet<usize> = p
        .starts()
        .iter()
        .copied()
        .filter(|&s| corridor[s])
        .collect();
    let finite_paths = if sources.is_empty() {
        None
    } else {
        match bellman_ford(&p, &corridor, &sources) {
            Ok(paths) => Some(paths),
            Err(_cycle) => {
                warnings.push(
                    "the minimum is an infimum: pumping a negative-total cycle before \
                     terminating produces fair executions of unboundedly low reward, \
                     none attaining it"
                        .to_string(),
                );
                return Ok(RewardReport {
                    value: ExtReal::NegInf,
                    product: p,
                    witness: None,
                    completeness: Completeness::Exact,
                    used_lim_sup: false,
                    warnings,
                });
            }
        }
    };

    // Components of the reachable graph that support a fair loop; a
    // negative cycle inside one yields an attained -inf witness.
    let spec = engine::SearchSpec::new(&p);
    let (order, parent) = engine::explore(&spec);
    let sccs = engine::tarjan(&p, &spec, &order);
    let mut fair_components: Vec<(Vec<usize>, usize, (Vec<usize>, Vec<usize>))> = Vec::new();
    for members in sccs {
        let entry = *members
            .iter()
            .min_by_key(|&&s| order.iter().position(|&o| o == s).unwrap())
            .unwrap();
        let Some(base_loop) = engine::assemble_loop(&p, &spec, &members, entry, &[]) else {
            continue;
        };
        let mut member_mask = vec![false; n];
        for &s in &members {
            member_mask[s] = true;
        }
        if let Err(cycle) = bellman_ford(&p, &member_mask, &[entry].into()) {
            let cycle_sum: f64 = cycle.iter().map(|&t| p.reward(t)).sum();
            // Repeat the negative cycle until the whole assembled loop —
            // task obligations and connector paths included — has
            // negative total reward. The connectors are the same however
            // often the cycle repeats, so each round of pumping lowers
            // the total by a fixed positive amount and the loop ends.
            let mut pumps = 1usize;
            let (loop_states, loop_actions) = loop {
                let extra: Vec<usize> = cycle
                    .iter()
                    .copied()
                    .cycle()
                    .take(cycle.len() * pumps)
                    .collect();
                let built = engine::assemble_loop(&p, &spec, &members, entry, &extra)
                    .expect("the component qualified with no extra edges");
                let total = walk_reward(&p, &built.0, &built.1);
                if total < 0.0 {
                    break built;
                }
                pumps += (total / -cycle_sum).floor() as usize + 1;
            };
            let (stem_states, stem_actions) = engine::walk_to_root(&p, &parent, entry);
            let stem = FiniteExecution::raw(&p, stem_states, stem_actions);
            let lasso = LassoExecution::new(&p, stem, loop_states, loop_actions)
                .expect("assembled loop is a closed walk");
            debug_assert!(semantics::is_fair_lasso(&p, &lasso));
            let witness = ExecutionWitness::Lasso(lasso);
            debug_assert_eq!(semantics::reward_of(&p, &witness), ExtReal::NegInf);
            return Ok(RewardReport {
                value: ExtReal::NegInf,
                product: p,
                witness: Some(witness),
                completeness: Completeness::Exact,
                used_lim_sup: false,
                warnings,
            });
        }
        fair_components.push((members, entry, base_loop));
    }

    // Cheapest-reward stems to every reachable state, for the lasso
    // candidates below: a tree stem can enter a loop through expensive
    // territory that a detour avoids, and the detour is part of the
    // minimum. A negative cycle out here — necessarily off the corridor
    // and inside a component with no fair loop, or an earlier return
    // would have fired — falls back to the tree stems; that corner is
    // owned by the bounded completeness below.
    let stem_paths = bellman_ford(&p, &in_reach, p.starts()).ok();
    let stem_to = |target: usize| match &stem_paths {
        Some(g) if g.reach[target] => engine::walk_to_root(&p, &g.pred, target),
        _ => engine::walk_to_root(&p, &parent, target),
    };

    // Candidate executions, in a fixed order; ties keep the earliest.
    let mut candidates: Vec<(ExtReal, ExecutionWitness)> = Vec::new();
    if let Some(paths) = &finite_paths {
        let target = (0..n)
            .filter(|&s| corridor[s] && p.quiescent_at(s) && paths.reach[s])
            .min_by(|&x, &y| paths.dist[x].total_cmp(&paths.dist[y]));
        if let Some(q) = target {
            let (states, actions) = engine::walk_to_root(&p, &paths.pred, q);
            let exec = FiniteExecution::raw(&p, states, actions);
            debug_assert!(semantics::is_fair_finite(&p, &exec));
            candidates.push((
                ExtReal::Finite(paths.dist[q]),
                ExecutionWitness::Finite(exec),
            ));
        }
    }
    for (_, entry, (loop_states, loop_actions)) in &fair_components {
        let (stem_states, stem_actions) = stem_to(*entry);
        let stem = FiniteExecution::raw(&p, stem_states, stem_actions);
        let lasso = LassoExecution::new(&p, stem, loop_states.clone(), loop_actions.clone())
            .expect("assembled loop is a closed walk");
        debug_assert!(semantics::is_fair_lasso(&p, &lasso));
        let witness = ExecutionWitness::Lasso(lasso);
        let value = semantics::reward_of(&p, &witness);
        candidates.push((value, witness));
    }
    if let Some((value, lasso)) = cheapest_enumerated_lasso(&p, &order, &stem_to, k) {
        candidates.push((value, ExecutionWitness::Lasso(lasso)));
    }

    if candidates.is_empty() {
        debug_assert!(analysis::fair_emptiness(&p, |_| false, &BTreeSet::new()).is_none());
        warnings.push("the composition has no fair executions".to_string());
        return Ok(RewardReport {
            value: ExtReal::PosInf,
            product: p,
            witness: None,
            completeness: Completeness::Exact,
            used_lim_sup: false,
            warnings,
        });
    }
    let mut best = 0;
    for i in 1..candidates.len() {
        if candidates[i].0.le(&candidates[best].0) && !candidates[best].0.le(&candidates[i].0) {
            best = i;
        }
    }
    let (value, witness) = candidates.swap_remove(best);
    let completeness = if fair_components.is_empty() {
        // All fair executions terminate; the shortest-path minimum is
        // the whole story.
        Completeness::Exact
    } else {
        warnings.push(format!(
            "minimum taken over terminating executions, canonical component loops, and \
             enumerated fair lassos of size at most {k}; cheaper fair lassos beyond the \
             bound would be missed"
        ));
        Completeness::Bounded(k)
    };
    let used_lim_sup = semantics::reward_used_lim_sup(&p, &witness);
    Ok(RewardReport {
        value,
        product: p,
        witness: Some(witness),
        completeness,
        used_lim_sup,
        warnings,
    })
}

/// Enumerates closed walks (up to a depth cap and node budget) from each
/// reachable anchor, keeps the fair ones, and returns the cheapest as a
/// lasso over the stem `stem_to` picks for the anchor.
fn cheapest_enumerated_lasso(
    p: &Automaton,
    order: &[usize],
    stem_to: &dyn Fn(usize) -> (Vec<usize>, Vec<usize>),
    k: usize,
) -> Option<(ExtReal, LassoExecution)> {
    let mut budget = REWARD_ENUM_BUDGET;
    let mut best: Option<(ExtReal, LassoExecution)> = None;
    for &anchor in order {
        let (stem_states, stem_actions) = stem_to(anchor);
        if stem_actions.len() + 1 > k {
            continue;
        }
        let depth_cap = (k - stem_actions.len()).min(REWARD_LOOP_DEPTH_CAP).max(1);
        let mut loop_states = vec![anchor];
        let mut loop_actions: Vec<usize> = Vec::new();
        let mut frames: Vec<std::slice::Iter<'_, usize>> = vec![p.outgoing(anchor).iter()];
        while let Some(frame) = frames.last_mut() {
            match frame.next() {
                Some(&t) => {
                    if budget == 0 {
                        return best;
                    }
                    budget -= 1;
                    let tr = p.transitions()[t];
                    loop_states.push(tr.to);
                    loop_actions.push(tr.action);
                    if tr.to == anchor {
                        let stem = FiniteExecution::raw(p, stem_states.clone(), stem_actions.clone());
                        let lasso =
                            LassoExecution::new(p, stem, loop_states.clone(), loop_actions.clone())
                                .expect("closed walk from the anchor");
                        if semantics::is_fair_lasso(p, &lasso) {
                            let value =
                                semantics::reward_of(p, &ExecutionWitness::Lasso(lasso.clone()));
                            let better = best
                                .as_ref()
                                .map_or(true, |(b, _)| value.le(b) && !b.le(&value));
                            if better {
                                best = Some((value, lasso));
                            }
                        }
                    }
                    if frames.len() < depth_cap {
                        frames.push(p.outgoing(tr.to).iter());
                    } else {
                        loop_states.pop();
                        loop_actions.pop();
                    }
                }
                None => {
                    frames.pop();
                    if !loop_actions.is_empty() {
                        loop_states.pop();
                        loop_actions.pop();
                    }
                }
            }
        }
    }
    best
}

/// Regime-specific admissibility of a test for comparing two systems.
pub fn admissible(
    a: &Automaton,
    b: &Automaton,
    t: &Automaton,
    regime: Regime,
) -> CompatibilityReport {
    let mut violations: Vec<CompatViolation> = Vec::new();
    match regime {
        Regime::LtsCompatible => {
            violations.extend(algebra::check_compatibility(&[t, a]).violations);
            violations.extend(algebra::check_compatibility(&[t, b]).violations);
        }
        Regime::StronglyCompatible => {
            collect_strong(&mut violations, t, a);
            collect_strong(&mut violations, t, b);
        }
        Regime::EmptyInput => {
            collect_strong(&mut violations, t, a);
            collect_strong(&mut violations, t, b);
            for sys in [a, b] {
                let leftover = composed_inputs(t, sys);
                if !leftover.is_empty() {
                    violations.push(CompatViolation::ComposedInputsNotEmpty { actions: leftover });
                }
            }
        }
        Regime::Complementary => {
            for (component, x) in [(1, t), (2, a), (3, b)] {
                if x.mode() != Mode::Io {
                    violations.push(CompatViolation::NotIo { component });
                }
            }
            violations.extend(complementary_violations(t, &Signature::of(a)));
            violations.extend(complementary_violations(t, &Signature::of(b)));
        }
    }
    violations.sort_by_key(|v| v.to_string());
    violations.dedup();
    CompatibilityReport::new(regime, violations)
}

/// Regime-specific admissibility of a test for a single system: the
/// two-slot check with the same automaton in both, minus the duplicate
/// mode complaint that doubling the system would add.
pub fn admissible_single(a: &Automaton, t: &Automaton, regime: Regime) -> CompatibilityReport {
    let mut report = admissible(a, a, t, regime);
    report.violations.retain(|v| !matches!(v, CompatViolation::NotIo { component: 3 }));
    CompatibilityReport::new(report.regime, report.violations)
}

fn collect_strong(out: &mut Vec<CompatViolation>, t: &Automaton, x: &Automaton) {
    match algebra::check_strong_compatibility(&[t, x]) {
        Ok(report) => out.extend(report.violations),
        Err(AlgebraError::ModeMismatch { index }) => {
            out.push(CompatViolation::NotIo { component: index })
        }
        Err(_) => {}
    }
}

/// Input actions the composition `test ‖ system` would still have.
fn composed_inputs(t: &Automaton, sys: &Automaton) -> Vec<String> {
    let st = Signature::of(t);
    let ss = Signature::of(sys);
    let ins: BTreeSet<&String> = st.inputs.union(&ss.inputs).collect();
    let outs: BTreeSet<&String> = st.outputs.union(&ss.outputs).collect();
    ins.difference(&outs).map(|s| (*s).to_string()).collect()
}

fn complementary_violations(t: &Automaton, sig: &Signature) -> Vec<CompatViolation> {
    let mut violations = Vec::new();
    let mut expected_out = sig.inputs.clone();
    expected_out.insert(SUCCESS_ACTION.to_string());
    let found_out = t.class_names(ActionClass::Output);
    if found_out != expected_out {
        violations.push(CompatViolation::TestOutputsMismatch {
            expected: expected_out.into_iter().collect(),
            found: found_out.into_iter().collect(),
        });
    }
    let found_in = t.class_names(ActionClass::Input);
    if found_in != sig.outputs {
        violations.push(CompatViolation::TestInputsMismatch {
            expected: sig.outputs.iter().cloned().collect(),
            found: found_in.into_iter().collect(),
        });
    }
    for action in t
        .class_names(ActionClass::Internal)
        .intersection(&sig.internals)
    {
        violations.push(CompatViolation::SharedInternal {
            action: action.clone(),
        });
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;
    use crate::semantics::SuccessMode;

    fn parse(src: &str) -> Automaton {
        crate::dsl::parse_single(src).unwrap().1
    }

    fn render(p: &Automaton, w: &ExecutionWitness) -> String {
        match w {
            ExecutionWitness::Finite(e) => e.render(p),
            ExecutionWitness::Lasso(l) => l.render(p),
        }
    }

    #[test]
    fn may_and_surv_mirror_each_other() {
        let a = fixtures::fig1_a();
        let b = fixtures::fig1_b();
        let t = fixtures::fig1_t();
        for sys in [&a, &b] {
            let may = may(sys, &t).unwrap();
            let surv = surv(sys, &t).unwrap();
            assert!(may.holds);
            assert!(!surv.holds);
            let w = may.witness.unwrap();
            assert!(semantics::execution_successful(
                &may.product,
                &w,
                SuccessMode::StateBased
            ));
        }
        assert_eq!(
            render(
                &may(&a, &t).unwrap().product,
                &may(&a, &t).unwrap().witness.unwrap()
            ),
            "t0.p0 tau t0.p1 b t1.p3"
        );
    }

    #[test]
    fn unreachable_success_fails_may() {
        let t = parse(
            "\
automaton t_dead
  kind lts
  inputs a b
  outputs w
  states v0 vdead
  start v0
  trans vdead w vdead
end
",
        );
        let a = fixtures::fig1_a();
        assert!(!may(&a, &t).unwrap().holds);
        assert!(surv(&a, &t).unwrap().holds);
    }

    #[test]
    fn should_agrees_on_the_figure_pair() {
        let a = fixtures::fig1_a();
        let b = fixtures::fig1_b();
        let t = fixtures::fig1_t();
        let va = should(&a, &t).unwrap();
        let vb = should(&b, &t).unwrap();
        // Both products contain a state from which success is out of
        // reach (past it for A, the blocked branch for B), so the
        // verdicts agree.
        assert_eq!(va.holds, vb.holds);
        assert!(!va.holds);
        assert_eq!(
            render(&va.product, &va.witness.unwrap()),
            "t0.p0 tau t0.p1 b t1.p3 w t2.p3"
        );
        assert_eq!(
            render(&vb.product, &vb.witness.unwrap()),
            "t0.q0 tau t0.q1"
        );
    }

    #[test]
    fn success_loop_makes_should_hold() {
        let t = parse(
            "\
automaton t_wloop
  kind lts
  inputs a b
  outputs w
  states r0 r1
  start r0
  trans r0 b r1
  trans r1 w r1
end
",
        );
        let a = fixtures::fig1_a();
        let v = should(&a, &t).unwrap();
        assert!(v.holds, "{:?}", v.witness.map(|w| render(&v.product, &w)));
    }

    #[test]
    fn must_pr_separates_the_figure_pair() {
        let t = fixtures::fig1_t();
        let va = must_pr(&fixtures::fig1_a(), &t).unwrap();
        assert!(va.holds);
        assert!(va.witness.is_none());

        let vb = must_pr(&fixtures::fig1_b(), &t).unwrap();
        assert!(!vb.holds);
        // The internal commitment to the a-branch deadlocks the product
        // without success.
        match vb.witness.unwrap() {
            ExecutionWitness::Finite(e) => {
                assert_eq!(e.render(&vb.product), "t0.q0 tau t0.q1");
            }
            ExecutionWitness::Lasso(_) => panic!("expected a deadlock witness"),
        }
    }

    #[test]
    fn must_pr_separates_the_idle_and_divergent_automata() {
        let t = fixtures::sec6_test();
        let va = must_pr(&fixtures::sec6_a(), &t).unwrap();
        assert!(va.holds);
        let vb = must_pr(&fixtures::sec6_b(), &t).unwrap();
        assert!(!vb.holds);
        match vb.witness.unwrap() {
            ExecutionWitness::Lasso(l) => {
                assert_eq!(l.render(&vb.product), "u0.b0 (tau u0.b0)^w");
            }
            ExecutionWitness::Finite(_) => panic!("expected a cycle witness"),
        }
    }

    #[test]
    fn immediate_success_passes_must_pr() {
        let t = parse(
            "\
automaton t_now
  kind io
  outputs w
  states z0 z1
  start z0
  task t_w = w
  trans z0 w z1
end
",
        );
        for sys in [fixtures::sec6_a(), fixtures::sec6_b()] {
            assert!(must_pr(&sys, &t).unwrap().holds);
        }
    }

    #[test]
    fn fairness_erases_the_progress_distinction() {
        // Under fair must testing the two-state test no longer
        // distinguishes the idle automaton from the divergent one: the
        // divergent loop starves the test's internal step, so it is
        // unfair and every fair execution still reaches success.
        let t = fixtures::sec6_test();
        assert!(must_f(&fixtures::sec6_a(), &t).unwrap().holds);
        assert!(must_f(&fixtures::sec6_b(), &t).unwrap().holds);
        assert!(must_f_ab(&fixtures::sec6_a(), &t).unwrap().holds);
        assert!(must_f_ab(&fixtures::sec6_b(), &t).unwrap().holds);
    }

    #[test]
    fn success_free_tests_fail_must_f() {
        let t = parse(
            "\
automaton t_mute
  kind io
  internals tick
  states z0
  start z0
  task t_tick = tick
  trans z0 tick z0
end
",
        );
        let v = must_f(&fixtures::sec6_a(), &t).unwrap();
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(ExecutionWitness::Lasso(_))));
        let vab = must_f_ab(&fixtures::sec6_a(), &t).unwrap();
        assert!(!vab.holds);
    }

    #[test]
    fn pruning_success_preserves_the_fair_verdicts() {
        let t = fixtures::sec6_test();
        let pruned = algebra::prune_success(&t);
        for sys in [fixtures::sec6_a(), fixtures::sec6_b()] {
            let direct = must_f(&sys, &t).unwrap().holds;
            assert_eq!(direct, must_f(&sys, &pruned).unwrap().holds);
            assert_eq!(direct, must_f_ab(&sys, &pruned).unwrap().holds);
        }
    }

    #[test]
    fn must_f_requires_io_components() {
        let t = fixtures::fig1_t();
        assert_eq!(
            must_f(&fixtures::fig1_a(), &t).unwrap_err(),
            AlgebraError::ModeMismatch { index: 1 }
        );
    }

    #[test]
    fn reward_of_an_unrewarded_pair_is_zero() {
        let report = min_fair_reward(&fixtures::sec6_a(), &fixtures::sec6_test(), None).unwrap();
        assert_eq!(report.value, ExtReal::Finite(0.0));
        assert_eq!(report.completeness, Completeness::Exact);
        assert!(report.witness.is_some());
    }

    #[test]
    fn negative_fair_loop_gives_attained_minus_infinity() {
        let t = parse(
            "\
automaton t_negloop
  kind io
  outputs w
  internals tick
  states z0
  start z0
  task t_tick = tick
  task t_w = w
  trans z0 tick z0 reward -1
end
",
        );
        let report = min_fair_reward(&fixtures::sec6_a(), &t, None).unwrap();
        assert_eq!(report.value, ExtReal::NegInf);
        assert_eq!(report.completeness, Completeness::Exact);
        let witness = report.witness.expect("attained by a fair lasso");
        assert_eq!(
            semantics::reward_of(&report.product, &witness),
            ExtReal::NegInf
        );
    }

    #[test]
    fn negative_cycle_before_termination_is_an_infimum() {
        // The tick loop is negative but cannot be repeated forever
        // fairly (the c-task would starve); pumping it finitely and then
        // terminating drives the reward down without bound.
        let t = parse(
            "\
automaton t_pump
  kind io
  outputs c w
  internals tick
  states z0 z1
  start z0
  task t_tick = tick
  task t_c = c
  task t_w = w
  trans z0 tick z0 reward -1
  trans z0 c z1
end
",
        );
        let report = min_fair_reward(&fixtures::sec6_a(), &t, None).unwrap();
        assert_eq!(report.value, ExtReal::NegInf);
        assert_eq!(report.completeness, Completeness::Exact);
        assert!(report.witness.is_none());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn terminating_rewards_minimise_exactly() {
        let t = parse(
            "\
automaton t_choice
  kind io
  outputs c d w
  states z0 z1 z2
  start z0
  task t_c = c
  task t_d = d
  task t_w = w
  trans z0 c z1 reward 2
  trans z0 d z2 reward 1
end
",
        );
        let report = min_fair_reward(&fixtures::sec6_a(), &t, None).unwrap();
        assert_eq!(report.value, ExtReal::Finite(1.0));
        assert_eq!(report.completeness, Completeness::Exact);
        match report.witness.unwrap() {
            ExecutionWitness::Finite(e) => {
                assert_eq!(e.render(&report.product), "z0.a0 d z2.a0");
            }
            ExecutionWitness::Lasso(_) => panic!("expected a terminating witness"),
        }
    }

    #[test]
    fn admissibility_by_regime() {
        let a = fixtures::fig1_a();
        let b = fixtures::fig1_b();

        // The LTS test is compatible, so the weakest regime accepts it.
        assert!(admissible(&a, &b, &fixtures::fig1_t(), Regime::LtsCompatible).ok);

        // Its I/O variant shares the outputs a and b with both systems.
        let t_io = fixtures::fig1_t_io();
        let strong = admissible(&a, &b, &t_io, Regime::StronglyCompatible);
        assert!(!strong.ok);
        assert!(strong
            .violations
            .iter()
            .any(|v| matches!(v, CompatViolation::SharedOutput { .. })));

        // The two-state test is complementary to the silent pair, and
        // its compositions with them have no inputs left.
        let sa = fixtures::sec6_a();
        let sb = fixtures::sec6_b();
        let t = fixtures::sec6_test();
        assert!(admissible(&sa, &sb, &t, Regime::StronglyCompatible).ok);
        assert!(admissible(&sa, &sb, &t, Regime::EmptyInput).ok);
        assert!(admissible(&sa, &sb, &t, Regime::Complementary).ok);

        // Against the figure pair the same test is not complementary:
        // it answers none of their outputs.
        let compl = admissible(&a, &b, &t, Regime::Complementary);
        assert!(!compl.ok);
        assert!(compl
            .violations
            .iter()
            .any(|v| matches!(v, CompatViolation::TestInputsMismatch { .. })));
    }

    #[test]
    fn single_system_admissibility_mirrors_the_pair_check() {
        let a = fixtures::fig1_a();
        assert!(admissible_single(&a, &fixtures::fig1_t(), Regime::LtsCompatible).ok);
        let strong = admissible_single(&a, &fixtures::fig1_t_io(), Regime::StronglyCompatible);
        assert!(!strong.ok);

        // An LTS system is flagged exactly once, not once per slot.
        let lts = fixtures::fig1_t();
        let compl = admissible_single(&lts, &fixtures::sec6_test(), Regime::Complementary);
        let mode_complaints = compl
            .violations
            .iter()
            .filter(|v| matches!(v, CompatViolation::NotIo { .. }))
            .count();
        assert_eq!(mode_complaints, 1);
    }

    #[test]
    fn lts_mode_components_are_rejected_where_io_is_required() {
        let a = fixtures::fig1_a();
        let b = fixtures::fig1_b();
        let t = fixtures::fig1_t();
        let report = admissible(&a, &b, &t, Regime::StronglyCompatible);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, CompatViolation::NotIo { component: 1 })));
    }
}
