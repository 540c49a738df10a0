//! Randomised checks of the algebraic laws the public operations
//! promise. Every property draws fresh instances from the harness
//! generators (or small bespoke companions built through the spec type)
//! and asserts the law through the public API alone, so a failure here
//! points at an operation, not at test plumbing.

use std::collections::{BTreeMap, BTreeSet};

use iofair::algebra::{self, Regime, Signature};
use iofair::analysis::{self, Completeness, InclusionMode};
use iofair::harness::{random_io_automaton, random_pair, random_test, GenParams};
use iofair::model::{
    Automaton, AutomatonSpec, FiniteExecution, LassoExecution, Mode, TraceWord, SUCCESS_ACTION,
};
use iofair::{dsl, preorders, semantics, verdicts};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn auto_from(seed: u64) -> Automaton {
    random_io_automaton(&GenParams { seed, ..GenParams::default() })
}

fn test_for(a: &Automaton, seed: u64, regime: Regime) -> Automaton {
    random_test(
        &GenParams { seed, ..GenParams::default() },
        &Signature::of(a),
        regime,
    )
}

/// Every external word of length at most `max_len` over the given
/// alphabet, the empty word included.
fn short_words(alphabet: &BTreeSet<String>, max_len: usize) -> Vec<TraceWord> {
    let mut words: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for word in &frontier {
            for letter in alphabet {
                let mut longer = word.clone();
                longer.push(letter.clone());
                next.push(longer);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words.into_iter().map(TraceWord).collect()
}

/// The two automata cannot be told apart by traces, quiescent traces,
/// or fair-trace membership of any short external word.
fn assert_observably_equivalent(x: &Automaton, y: &Automaton) -> Result<(), TestCaseError> {
    prop_assert!(preorders::trace_preorder(x, y).holds);
    prop_assert!(preorders::trace_preorder(y, x).holds);
    prop_assert!(preorders::quiescent_preorder(x, y).holds);
    prop_assert!(preorders::quiescent_preorder(y, x).holds);
    for word in short_words(&x.external_names(), 2) {
        prop_assert_eq!(
            analysis::finite_fairtrace_membership(x, &word),
            analysis::finite_fairtrace_membership(y, &word),
            "fair-trace membership of {:?} differs",
            word
        );
    }
    Ok(())
}

/// A third party over one fresh output and one fresh internal action
/// that listens to a subset of the pool, built straight from the spec
/// type so it stays pairwise compatible with the pool's owners.
fn listener(seed: u64, pool: &BTreeSet<String>) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<String> = pool
        .iter()
        .filter(|name| name.as_str() != SUCCESS_ACTION)
        .filter(|_| rng.gen::<f64>() < 0.6)
        .cloned()
        .collect();
    let n = rng.gen_range(1..=3usize);
    let states: Vec<String> = (0..n).map(|k| format!("z{k}")).collect();
    let mut everything: Vec<String> = inputs.clone();
    everything.push("x0".to_string());
    everything.push("u0".to_string());
    let mut transitions: Vec<(String, String, String, f64)> = Vec::new();
    for s in 0..n {
        for action in &everything {
            if rng.gen::<f64>() < 0.4 {
                let to = rng.gen_range(0..n);
                transitions.push((states[s].clone(), action.clone(), states[to].clone(), 0.0));
            }
        }
    }
    for s in 0..n {
        for input in &inputs {
            let enabled = transitions
                .iter()
                .any(|(from, action, _, _)| from == &states[s] && action == input);
            if !enabled {
                transitions.push((states[s].clone(), input.clone(), states[s].clone(), 0.0));
            }
        }
    }
    AutomatonSpec {
        mode: Some(Mode::Io),
        inputs,
        outputs: vec!["x0".to_string()],
        internals: vec!["u0".to_string()],
        states,
        starts: vec!["z0".to_string()],
        tasks: vec![
            ("t_x0".to_string(), vec!["x0".to_string()]),
            ("t_u0".to_string(), vec!["u0".to_string()]),
        ],
        transitions,
    }
    .validate()
    .expect("listener construction satisfies the structural rules")
}

/// A breadth-first execution from some start state to the target.
fn stem_to(a: &Automaton, target: usize) -> Option<FiniteExecution> {
    let mut parent: Vec<Option<usize>> = vec![None; a.states().len()];
    let mut seen = vec![false; a.states().len()];
    let mut queue: Vec<usize> = Vec::new();
    for &s in a.starts() {
        seen[s] = true;
        queue.push(s);
    }
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        for (i, tr) in a.transitions().iter().enumerate() {
            if tr.from == s && !seen[tr.to] {
                seen[tr.to] = true;
                parent[tr.to] = Some(i);
                queue.push(tr.to);
            }
        }
    }
    if !seen[target] {
        return None;
    }
    let mut states = vec![target];
    let mut actions = Vec::new();
    let mut cur = target;
    while let Some(i) = parent[cur] {
        let tr = a.transitions()[i];
        actions.push(tr.action);
        cur = tr.from;
        states.push(cur);
    }
    states.reverse();
    actions.reverse();
    Some(FiniteExecution::new(a, states, actions).expect("breadth-first path is an execution"))
}

/// Closed walks of up to four steps from every reachable state, paired
/// with a stem, capped to keep a trial small.
fn sample_lassos(a: &Automaton, cap: usize) -> Vec<LassoExecution> {
    let mut out = Vec::new();
    for anchor in a.reachable() {
        let Some(stem) = stem_to(a, anchor) else { continue };
        let mut stack: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![anchor], Vec::new())];
        while let Some((states, actions)) = stack.pop() {
            if out.len() >= cap {
                return out;
            }
            let here = *states.last().expect("nonempty walk");
            for tr in a.transitions().iter().filter(|t| t.from == here) {
                let mut s2 = states.clone();
                let mut a2 = actions.clone();
                s2.push(tr.to);
                a2.push(tr.action);
                if tr.to == anchor {
                    out.push(
                        LassoExecution::new(a, stem.clone(), s2.clone(), a2.clone())
                            .expect("closed walk anchors the loop"),
                    );
                }
                if a2.len() < 4 {
                    stack.push((s2, a2));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn emitted_text_parses_back_to_the_same_automaton(seed in any::<u64>()) {
        let a = auto_from(seed);
        let text = dsl::emit_dsl("probe", &a);
        let (name, back) = dsl::parse_single(&text)
            .map_err(|e| TestCaseError::fail(format!("emitted text failed to parse: {e}")))?;
        prop_assert_eq!(name, "probe");
        prop_assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renaming_internals_round_trips_and_preserves_behaviour(seed in any::<u64>()) {
        let a = auto_from(seed);
        let internals: Vec<String> =
            a.class_names(iofair::model::ActionClass::Internal).into_iter().collect();
        let forward: BTreeMap<String, String> = internals
            .iter()
            .enumerate()
            .map(|(k, name)| (name.clone(), format!("zz{k}")))
            .collect();
        let backward: BTreeMap<String, String> =
            forward.iter().map(|(from, to)| (to.clone(), from.clone())).collect();
        let renamed = a.rename_internals(&forward).expect("fresh names cannot clash");
        prop_assert_eq!(renamed.rename_internals(&backward).expect("inverse map"), a.clone());
        assert_observably_equivalent(&a, &renamed)?;

        let t = test_for(&a, seed ^ 0xA5A5_5A5A, Regime::StronglyCompatible);
        let before = verdicts::must_f(&a, &t).expect("compatible").holds;
        let after = verdicts::must_f(&renamed, &t).expect("compatible").holds;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn survival_is_the_negation_of_may(seed in any::<u64>()) {
        let a = auto_from(seed);
        for (salt, regime) in [(0x11u64, Regime::StronglyCompatible), (0x22, Regime::LtsCompatible)] {
            let t = test_for(&a, seed ^ salt, regime);
            let may = verdicts::may(&a, &t).expect("compatible").holds;
            let surv = verdicts::surv(&a, &t).expect("compatible").holds;
            prop_assert_eq!(surv, !may);
        }
    }

    #[test]
    fn saturating_inputs_changes_no_verdict(seed in any::<u64>()) {
        let a = auto_from(seed);
        let t = test_for(&a, seed ^ 0x33, Regime::StronglyCompatible);
        let unknown: BTreeSet<String> = a
            .external_names()
            .into_iter()
            .filter(|name| t.action_index(name).is_none())
            .collect();
        let saturated = algebra::saturate_inputs(&t, &unknown);
        prop_assert_eq!(
            verdicts::must_f(&a, &t).expect("compatible").holds,
            verdicts::must_f(&a, &saturated).expect("saturation keeps compatibility").holds
        );
        prop_assert_eq!(
            verdicts::must_pr(&a, &t).expect("compatible").holds,
            verdicts::must_pr(&a, &saturated).expect("saturation keeps compatibility").holds
        );
    }

    #[test]
    fn complementarising_changes_no_verdict(seed in any::<u64>()) {
        let a = auto_from(seed);
        let sig = Signature::of(&a);
        let t = test_for(&a, seed ^ 0x44, Regime::StronglyCompatible);
        let unknown: BTreeSet<String> = a
            .external_names()
            .into_iter()
            .filter(|name| t.action_index(name).is_none())
            .collect();
        let saturated = algebra::saturate_inputs(&t, &unknown);
        let c = algebra::complementarize(&saturated, &sig).expect("test carries the success action");
        prop_assert!(algebra::is_complementary(&c, &sig));
        prop_assert_eq!(
            verdicts::must_f(&a, &t).expect("compatible").holds,
            verdicts::must_f(&a, &c).expect("complementary is compatible").holds
        );
        prop_assert_eq!(
            verdicts::must_pr(&a, &t).expect("compatible").holds,
            verdicts::must_pr(&a, &c).expect("complementary is compatible").holds
        );
    }

    #[test]
    fn precongruence_carries_trace_inclusion_through_composition(seed in any::<u64>()) {
        let (a, b) = random_pair(&GenParams { seed, ..GenParams::default() });
        if !preorders::trace_preorder(&a, &b).holds {
            return Ok(());
        }
        let c = test_for(&a, seed ^ 0x55, Regime::Complementary);
        let ca = algebra::compose(&[&c, &a]).expect("complementary test composes");
        let cb = algebra::compose(&[&c, &b]).expect("complementary test composes");
        prop_assert!(preorders::trace_preorder(&ca, &cb).holds);
    }

    #[test]
    fn precongruence_carries_fair_inclusion_through_composition(seed in any::<u64>()) {
        // Two-state components keep the synchronized pair inside the
        // exact-decision gate, so the antecedent is never approximate.
        let params = GenParams { seed, max_states: 2, ..GenParams::default() };
        let (a, b) = random_pair(&params);
        let r = preorders::fair_preorder(&a, &b, None, InclusionMode::Exact);
        if !r.holds || r.completeness != Completeness::Exact {
            return Ok(());
        }
        let c = test_for(&a, seed ^ 0x66, Regime::Complementary);
        let ca = algebra::compose(&[&c, &a]).expect("complementary test composes");
        let cb = algebra::compose(&[&c, &b]).expect("complementary test composes");
        // The composed decision may fall back to the bounded search;
        // a counterexample from it would still be sound, so `holds`
        // failing here would be a genuine violation.
        prop_assert!(preorders::fair_preorder(&ca, &cb, None, InclusionMode::Exact).holds);
    }

    #[test]
    fn saturation_leaves_the_composed_graph_unchanged(seed in any::<u64>()) {
        let a = auto_from(seed);
        let t = test_for(&a, seed ^ 0x77, Regime::StronglyCompatible);
        let unknown: BTreeSet<String> = a
            .external_names()
            .into_iter()
            .filter(|name| t.action_index(name).is_none())
            .collect();
        let saturated = algebra::saturate_inputs(&t, &unknown);
        let plain = algebra::compose(&[&t, &a]).expect("compatible");
        let padded = algebra::compose(&[&saturated, &a]).expect("compatible");
        prop_assert_eq!(padded, plain);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_is_associative_up_to_behaviour(seed in any::<u64>()) {
        let a = auto_from(seed);
        let b = test_for(&a, seed ^ 0x88, Regime::Complementary);
        let mut pool = a.external_names();
        pool.extend(b.external_names());
        let c = listener(seed ^ 0x99, &pool);
        let left = algebra::compose(&[
            &algebra::compose(&[&a, &b]).expect("complementary pair composes"),
            &c,
        ])
        .expect("listener stays compatible");
        let right = algebra::compose(&[
            &a,
            &algebra::compose(&[&b, &c]).expect("listener stays compatible"),
        ])
        .expect("complementary pair composes");
        assert_observably_equivalent(&left, &right)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lasso_fairness_depends_only_on_the_loop(seed in any::<u64>()) {
        let a = auto_from(seed);
        for lasso in sample_lassos(&a, 12) {
            let verdict = semantics::is_fair_lasso(&a, &lasso);
            let stem = lasso.stem();
            let loop_states = lasso.loop_states();
            let loop_actions = lasso.loop_actions();

            // Rotating the loop entry point shifts letters into the stem.
            for k in 1..loop_actions.len() {
                let mut stem_states = stem.states().to_vec();
                stem_states.extend_from_slice(&loop_states[1..=k]);
                let mut stem_actions = stem.actions().to_vec();
                stem_actions.extend_from_slice(&loop_actions[..k]);
                let rotated_stem = FiniteExecution::new(&a, stem_states, stem_actions)
                    .expect("stem plus loop prefix is an execution");
                let mut rs = loop_states[k..].to_vec();
                rs.extend_from_slice(&loop_states[1..=k]);
                let mut ra = loop_actions[k..].to_vec();
                ra.extend_from_slice(&loop_actions[..k]);
                let rotated = LassoExecution::new(&a, rotated_stem, rs, ra)
                    .expect("rotation preserves the closed walk");
                prop_assert_eq!(semantics::is_fair_lasso(&a, &rotated), verdict);
            }

            // Unrolling the loop once changes nothing.
            let mut ds = loop_states.to_vec();
            ds.extend_from_slice(&loop_states[1..]);
            let mut da = loop_actions.to_vec();
            da.extend_from_slice(loop_actions);
            let doubled = LassoExecution::new(&a, stem.clone(), ds, da)
                .expect("doubling preserves the closed walk");
            prop_assert_eq!(semantics::is_fair_lasso(&a, &doubled), verdict);

            // Neither does padding the stem with one loop traversal.
            let mut ps = stem.states().to_vec();
            ps.extend_from_slice(&loop_states[1..]);
            let mut pa = stem.actions().to_vec();
            pa.extend_from_slice(loop_actions);
            let padded_stem = FiniteExecution::new(&a, ps, pa)
                .expect("stem plus full loop is an execution");
            let padded = LassoExecution::new(
                &a,
                padded_stem,
                loop_states.to_vec(),
                loop_actions.to_vec(),
            )
            .expect("the loop still anchors");
            prop_assert_eq!(semantics::is_fair_lasso(&a, &padded), verdict);
        }
    }
}
