//! Compatibility checking, parallel composition, and the transformations
//! applied to tests: hiding, input saturation, complementation, moving
//! inputs to outputs, success pruning, and reward coding.

use crate::model::{
    ActionClass, ActionDecl, Automaton, CompositionMeta, Mode, Task, Transition, SUCCESS_ACTION,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// The compatibility regime a test is admitted under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Plain compatibility: internal actions private to their owner.
    LtsCompatible,
    /// Strong compatibility: additionally no shared outputs; I/O mode.
    StronglyCompatible,
    /// Strongly compatible and the composition with the tested automaton
    /// has no inputs left.
    EmptyInput,
    /// The test's outputs are exactly the tested automaton's inputs plus
    /// the success action, and vice versa.
    Complementary,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::LtsCompatible => "lts",
            Regime::StronglyCompatible => "strongly-compatible",
            Regime::EmptyInput => "empty-input",
            Regime::Complementary => "complementary",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lts" | "lts-compatible" => Ok(Regime::LtsCompatible),
            "strong" | "strongly-compatible" => Ok(Regime::StronglyCompatible),
            "empty-input" => Ok(Regime::EmptyInput),
            "complementary" => Ok(Regime::Complementary),
            other => Err(format!("unknown regime {other}")),
        }
    }
}

/// One clause of a compatibility or admissibility check that failed.
/// Components are numbered from 1 in composition order.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CompatViolation {
    #[error("internal action {action} of component {owner} occurs in component {other}")]
    InternalClash { action: String, owner: usize, other: usize },
    #[error("output action {action} shared by components {first} and {second}")]
    SharedOutput { action: String, first: usize, second: usize },
    #[error("component {component} is not an I/O automaton")]
    NotIo { component: usize },
    #[error("composition with the tested automaton still has inputs: {}", .actions.join(" "))]
    ComposedInputsNotEmpty { actions: Vec<String> },
    #[error("test outputs must be exactly the tested inputs plus `{SUCCESS_ACTION}`; expected {{{}}}, found {{{}}}", .expected.join(" "), .found.join(" "))]
    TestOutputsMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("test inputs must be exactly the tested outputs; expected {{{}}}, found {{{}}}", .expected.join(" "), .found.join(" "))]
    TestInputsMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("internal action {action} shared between test and tested automaton")]
    SharedInternal { action: String },
}

/// Outcome of a compatibility or admissibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub regime: Regime,
    pub ok: bool,
    pub violations: Vec<CompatViolation>,
}

impl CompatibilityReport {
    pub fn new(regime: Regime, violations: Vec<CompatViolation>) -> CompatibilityReport {
        CompatibilityReport { regime, ok: violations.is_empty(), violations }
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            write!(f, "compatible under {} regime", self.regime)
        } else {
            write!(
                f,
                "incompatible under {} regime: {}",
                self.regime,
                self.violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("component {index} is not an I/O automaton")]
    ModeMismatch { index: usize },
    #[error("{report}")]
    IncompatibleComponents { report: CompatibilityReport },
    #[error("`{SUCCESS_ACTION}` is not an external action of the test")]
    WNotPresent,
}

/// The external interface of a tested automaton, used to admit and to
/// construct tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
    pub internals: BTreeSet<String>,
}

impl Signature {
    pub fn of(automaton: &Automaton) -> Signature {
        Signature {
            inputs: automaton.class_names(ActionClass::Input),
            outputs: automaton.class_names(ActionClass::Output),
            internals: automaton.class_names(ActionClass::Internal),
        }
    }

    pub fn externals(&self) -> BTreeSet<String> {
        self.inputs.union(&self.outputs).cloned().collect()
    }

    /// Every name the automaton knows, internals included.
    pub fn all_names(&self) -> BTreeSet<String> {
        self.externals().union(&self.internals).cloned().collect()
    }
}

/// Checks the plain compatibility clause: each automaton's internal
/// actions are unknown to every other component.
pub fn check_compatibility(autos: &[&Automaton]) -> CompatibilityReport {
    CompatibilityReport::new(Regime::LtsCompatible, internal_clashes(autos))
}

/// Checks strong compatibility: plain compatibility plus pairwise
/// disjoint outputs; only I/O automata qualify.
pub fn check_strong_compatibility(
    autos: &[&Automaton],
) -> Result<CompatibilityReport, AlgebraError> {
    for (i, a) in autos.iter().enumerate() {
        if a.mode() != Mode::Io {
            return Err(AlgebraError::ModeMismatch { index: i + 1 });
        }
    }
    let mut violations = internal_clashes(autos);
    for i in 0..autos.len() {
        for j in (i + 1)..autos.len() {
            let out_i = autos[i].class_names(ActionClass::Output);
            let out_j = autos[j].class_names(ActionClass::Output);
            for action in out_i.intersection(&out_j) {
                violations.push(CompatViolation::SharedOutput {
                    action: action.clone(),
                    first: i + 1,
                    second: j + 1,
                });
            }
        }
    }
    violations.sort_by_key(|v| v.to_string());
    Ok(CompatibilityReport::new(Regime::StronglyCompatible, violations))
}

fn internal_clashes(autos: &[&Automaton]) -> Vec<CompatViolation> {
    let mut violations = Vec::new();
    for (i, a) in autos.iter().enumerate() {
        let ints = a.class_names(ActionClass::Internal);
        for (j, b) in autos.iter().enumerate() {
            if i == j {
                continue;
            }
            let names = b.action_names();
            for action in ints.intersection(&names) {
                violations.push(CompatViolation::InternalClash {
                    action: action.clone(),
                    owner: i + 1,
                    other: j + 1,
                });
            }
        }
    }
    violations
}

/// Composes the automata. When every component is an I/O automaton the
/// composition is taken under strong compatibility and yields an I/O
/// automaton (inputs not matched by an output stay inputs, tasks are
/// unioned); otherwise plain compatibility applies and the result is a
/// plain transition system. Only the reachable part is kept.
pub fn compose(autos: &[&Automaton]) -> Result<Automaton, AlgebraError> {
    let all_io = !autos.is_empty() && autos.iter().all(|a| a.mode() == Mode::Io);
    if all_io {
        let report = check_strong_compatibility(autos)?;
        if !report.ok {
            return Err(AlgebraError::IncompatibleComponents { report });
        }
        Ok(product(autos, Mode::Io))
    } else {
        compose_plain(autos)
    }
}

/// Composes under plain compatibility, yielding a plain transition
/// system regardless of component modes.
pub fn compose_plain(autos: &[&Automaton]) -> Result<Automaton, AlgebraError> {
    let report = check_compatibility(autos);
    if !report.ok {
        return Err(AlgebraError::IncompatibleComponents { report });
    }
    Ok(product(autos, Mode::Lts))
}

fn product(autos: &[&Automaton], mode: Mode) -> Automaton {
    if autos.is_empty() {
        return Automaton::assemble(
            Mode::Lts,
            Vec::new(),
            vec!["unit".to_string()],
            [0].into(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
            None,
        );
    }

    // Union action table. An action is internal for its owning component
    // (compatibility makes the owner unique), an output if any component
    // outputs it, and an input otherwise.
    let mut classes: BTreeMap<String, ActionClass> = BTreeMap::new();
    for auto in autos {
        for decl in auto.actions() {
            let entry = classes.entry(decl.name.clone()).or_insert(decl.class);
            match (*entry, decl.class) {
                (_, ActionClass::Internal) => *entry = ActionClass::Internal,
                (ActionClass::Input, ActionClass::Output) => *entry = ActionClass::Output,
                _ => {}
            }
        }
    }
    let decls: Vec<ActionDecl> = classes
        .iter()
        .map(|(name, &class)| ActionDecl { name: name.clone(), class })
        .collect();
    // For each product action, its index in each component.
    let action_components: Vec<Vec<Option<usize>>> = decls
        .iter()
        .map(|d| autos.iter().map(|a| a.action_index(&d.name)).collect())
        .collect();

    // Breadth-first product construction from the start tuples.
    let mut tuple_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    let mut start_tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for auto in autos {
        let mut next = Vec::new();
        for tuple in &start_tuples {
            for &s in auto.starts() {
                let mut t = tuple.clone();
                t.push(s);
                next.push(t);
            }
        }
        start_tuples = next;
    }
    for tuple in &start_tuples {
        if !tuple_index.contains_key(tuple) {
            let idx = tuples.len();
            tuple_index.insert(tuple.clone(), idx);
            tuples.push(tuple.clone());
            queue.push(idx);
        }
    }

    // Edges discovered as (from tuple idx, product action, to tuple, reward).
    let mut raw_edges: Vec<(usize, usize, Vec<usize>, f64)> = Vec::new();
    let mut head = 0;
    while head < queue.len() {
        let from_idx = queue[head];
        head += 1;
        let from = tuples[from_idx].clone();
        for (a, owners) in action_components.iter().enumerate() {
            // Every component that knows the action must move; collect the
            // per-component alternatives.
            let mut alternatives: Vec<Vec<(usize, f64)>> = Vec::new();
            let mut enabled = true;
            for (i, owner) in owners.iter().enumerate() {
                if let Some(ca) = owner {
                    let moves: Vec<(usize, f64)> = autos[i]
                        .outgoing(from[i])
                        .iter()
                        .filter(|&&t| autos[i].transitions()[t].action == *ca)
                        .map(|&t| (autos[i].transitions()[t].to, autos[i].reward(t)))
                        .collect();
                    if moves.is_empty() {
                        enabled = false;
                        break;
                    }
                    alternatives.push(moves);
                } else {
                    alternatives.push(vec![]);
                }
            }
            if !enabled {
                continue;
            }
            // Cartesian product over the moving components.
            let mut combos: Vec<(Vec<usize>, f64)> = vec![(from.clone(), 0.0)];
            for (i, owner) in owners.iter().enumerate() {
                if owner.is_none() {
                    continue;
                }
                let mut next = Vec::new();
                for (tuple, reward) in &combos {
                    for &(to, r) in &alternatives[i] {
                        let mut t = tuple.clone();
                        t[i] = to;
                        next.push((t, reward + r));
                    }
                }
                combos = next;
            }
            for (to_tuple, reward) in combos {
                if !tuple_index.contains_key(&to_tuple) {
                    let idx = tuples.len();
                    tuple_index.insert(to_tuple.clone(), idx);
                    tuples.push(to_tuple.clone());
                    queue.push(idx);
                }
                raw_edges.push((from_idx, a, to_tuple, reward));
            }
        }
    }

    // Canonical order: sort reachable tuples by rendered name.
    let name_of = |tuple: &[usize]| -> String {
        tuple
            .iter()
            .enumerate()
            .map(|(i, &s)| autos[i].state_name(s))
            .collect::<Vec<_>>()
            .join(".")
    };
    let mut order: Vec<usize> = (0..tuples.len()).collect();
    order.sort_by_key(|&i| name_of(&tuples[i]));
    let mut renumber = vec![0; tuples.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        renumber[old_idx] = new_idx;
    }
    let states: Vec<String> = order.iter().map(|&i| name_of(&tuples[i])).collect();
    let state_components: Vec<Vec<usize>> = order.iter().map(|&i| tuples[i].clone()).collect();
    let starts: BTreeSet<usize> = start_tuples
        .iter()
        .map(|t| renumber[tuple_index[t]])
        .collect();
    let mut transitions: Vec<(Transition, f64)> = raw_edges
        .into_iter()
        .map(|(from, action, to_tuple, reward)| {
            (
                Transition {
                    from: renumber[from],
                    action,
                    to: renumber[tuple_index[&to_tuple]],
                },
                reward,
            )
        })
        .collect();
    transitions.sort_by_key(|(t, _)| *t);
    transitions.dedup_by(|(a, _), (b, _)| a == b);
    let rewards: Vec<f64> = transitions.iter().map(|(_, r)| *r).collect();
    let transitions: Vec<Transition> = transitions.into_iter().map(|(t, _)| t).collect();

    // Tasks: union of component tasks (I/O mode); collide by suffixing.
    let mut tasks: Vec<Task> = Vec::new();
    if mode == Mode::Io {
        let mut used: BTreeMap<String, usize> = BTreeMap::new();
        for (i, auto) in autos.iter().enumerate() {
            for task in auto.tasks() {
                let n = used.entry(task.name.clone()).or_insert(0);
                *n += 1;
                let name = if *n == 1 {
                    task.name.clone()
                } else {
                    format!("{}#{}", task.name, n)
                };
                let actions = task
                    .actions
                    .iter()
                    .map(|&a| {
                        let name = autos[i].action_name(a);
                        decls
                            .binary_search_by(|d| d.name.as_str().cmp(name))
                            .expect("component action present in product table")
                    })
                    .collect();
                tasks.push(Task { name, actions });
            }
        }
    }

    let meta = if autos.len() == 2 {
        Some(Box::new(CompositionMeta {
            components: autos.iter().map(|a| (*a).clone()).collect(),
            state_components,
            action_components,
        }))
    } else {
        None
    };

    Automaton::assemble(mode, decls, states, starts, transitions, rewards, tasks, meta)
}

/// Reclassifies every action except the success action as internal,
/// realising the composition-then-hide step of testing. The result is a
/// plain transition system.
pub fn hide_for_testing(p: &Automaton) -> Automaton {
    let decls: Vec<ActionDecl> = p
        .actions()
        .iter()
        .map(|d| ActionDecl {
            name: d.name.clone(),
            class: if d.name == SUCCESS_ACTION { ActionClass::Output } else { ActionClass::Internal },
        })
        .collect();
    Automaton::assemble(
        Mode::Lts,
        decls,
        p.states().to_vec(),
        p.starts().clone(),
        p.transitions().to_vec(),
        p.rewards().to_vec(),
        Vec::new(),
        p.composition().cloned().map(Box::new),
    )
}

/// Adds the actions in `E` as inputs of the test with a self-loop at
/// every state, so composing with an automaton whose externals include
/// `E` leaves the reachable transition graph unchanged. Names already
/// known to the test are ignored (`E` should be disjoint from them).
pub fn saturate_inputs(test: &Automaton, e: &BTreeSet<String>) -> Automaton {
    let fresh: Vec<&String> = e.iter().filter(|n| test.action_index(n).is_none()).collect();
    debug_assert_eq!(fresh.len(), e.len(), "saturation set overlaps the test alphabet");
    if fresh.is_empty() {
        return test.clone();
    }
    let mut decls: Vec<ActionDecl> = test.actions().to_vec();
    for name in &fresh {
        decls.push(ActionDecl { name: (*name).clone(), class: ActionClass::Input });
    }
    let mut order: Vec<usize> = (0..decls.len()).collect();
    order.sort_by(|&i, &j| decls[i].name.cmp(&decls[j].name));
    let mut remap = vec![0; decls.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        remap[old_idx] = new_idx;
    }
    decls.sort_by(|a, b| a.name.cmp(&b.name));

    let mut transitions: Vec<(Transition, f64)> = test
        .transitions()
        .iter()
        .zip(test.rewards())
        .map(|(t, &r)| {
            (Transition { from: t.from, action: remap[t.action], to: t.to }, r)
        })
        .collect();
    for (i, name) in fresh.iter().enumerate() {
        let action = remap[test.actions().len() + i];
        debug_assert_eq!(decls[action].name, **name);
        for s in 0..test.states().len() {
            transitions.push((Transition { from: s, action, to: s }, 0.0));
        }
    }
    transitions.sort_by_key(|(t, _)| *t);
    let rewards = transitions.iter().map(|(_, r)| *r).collect();
    let transitions = transitions.into_iter().map(|(t, _)| t).collect();
    let tasks = test
        .tasks()
        .iter()
        .map(|t| Task {
            name: t.name.clone(),
            actions: t.actions.iter().map(|&a| remap[a]).collect(),
        })
        .collect();
    Automaton::assemble(
        test.mode(),
        decls,
        test.states().to_vec(),
        test.starts().clone(),
        transitions,
        rewards,
        tasks,
        None,
    )
}

/// Reclassifies the saturated test against the tested signature: actions
/// the tested automaton inputs become outputs, actions it outputs become
/// inputs, the success action stays an output, and every other external
/// action becomes internal. Locally controlled actions get singleton
/// tasks.
pub fn complementarize(test: &Automaton, sig: &Signature) -> Result<Automaton, AlgebraError> {
    match test.action_index(SUCCESS_ACTION) {
        Some(w) if test.is_external(w) => {}
        _ => return Err(AlgebraError::WNotPresent),
    }
    debug_assert!(
        sig.externals().iter().all(|n| test.action_index(n).is_some()),
        "tested externals must be known to the test; saturate first"
    );
    let decls: Vec<ActionDecl> = test
        .actions()
        .iter()
        .map(|d| {
            let class = if d.name == SUCCESS_ACTION {
                ActionClass::Output
            } else if sig.inputs.contains(&d.name) {
                ActionClass::Output
            } else if sig.outputs.contains(&d.name) {
                ActionClass::Input
            } else {
                ActionClass::Internal
            };
            ActionDecl { name: d.name.clone(), class }
        })
        .collect();
    let tasks = singleton_tasks(&decls);
    Ok(Automaton::assemble(
        Mode::Io,
        decls,
        test.states().to_vec(),
        test.starts().clone(),
        test.transitions().to_vec(),
        test.rewards().to_vec(),
        tasks,
        None,
    ))
}

fn singleton_tasks(decls: &[ActionDecl]) -> Vec<Task> {
    decls
        .iter()
        .enumerate()
        .filter(|(_, d)| d.class != ActionClass::Input)
        .map(|(i, d)| Task { name: d.name.clone(), actions: [i].into() })
        .collect()
}

/// True when the test is complementary to the signature: its outputs are
/// the signature's inputs plus the success action, its inputs are the
/// signature's outputs, and the internal alphabets are disjoint.
pub fn is_complementary(test: &Automaton, sig: &Signature) -> bool {
    let mut expected_out = sig.inputs.clone();
    expected_out.insert(SUCCESS_ACTION.to_string());
    test.class_names(ActionClass::Output) == expected_out
        && test.class_names(ActionClass::Input) == sig.outputs
        && test
            .class_names(ActionClass::Internal)
            .intersection(&sig.internals)
            .next()
            .is_none()
}

/// Moves the inputs in `S` to the outputs, giving each moved action its
/// own singleton task. Names outside the test's inputs are ignored.
pub fn reclass_inputs_to_outputs(test: &Automaton, s: &BTreeSet<String>) -> Automaton {
    let moved: BTreeSet<usize> = s
        .iter()
        .filter_map(|n| test.action_index(n))
        .filter(|&i| test.action_class(i) == ActionClass::Input)
        .collect();
    debug_assert_eq!(moved.len(), s.len(), "reclassified set must be inputs of the test");
    let decls: Vec<ActionDecl> = test
        .actions()
        .iter()
        .enumerate()
        .map(|(i, d)| ActionDecl {
            name: d.name.clone(),
            class: if moved.contains(&i) { ActionClass::Output } else { d.class },
        })
        .collect();
    let mut tasks = test.tasks().to_vec();
    for &i in &moved {
        tasks.push(Task { name: decls[i].name.clone(), actions: [i].into() });
    }
    Automaton::assemble(
        test.mode(),
        decls,
        test.states().to_vec(),
        test.starts().clone(),
        test.transitions().to_vec(),
        test.rewards().to_vec(),
        tasks,
        None,
    )
}

/// Trims the test behind success: success states keep only their
/// success transitions, and get an input self-loop for every input so
/// input-enabledness survives the trim.
pub fn prune_success(test: &Automaton) -> Automaton {
    let success = crate::semantics::success_mask(test);
    let w = test.action_index(SUCCESS_ACTION);
    let mut transitions: Vec<(Transition, f64)> = test
        .transitions()
        .iter()
        .zip(test.rewards())
        .filter(|(t, _)| !success[t.from] || Some(t.action) == w)
        .map(|(t, &r)| (*t, r))
        .collect();
    let inputs: Vec<usize> = (0..test.actions().len())
        .filter(|&a| test.action_class(a) == ActionClass::Input)
        .collect();
    for (s, &is_success) in success.iter().enumerate() {
        if is_success {
            for &a in &inputs {
                transitions.push((Transition { from: s, action: a, to: s }, 0.0));
            }
        }
    }
    transitions.sort_by_key(|(t, _)| *t);
    transitions.dedup_by(|(a, _), (b, _)| a == b);
    let rewards = transitions.iter().map(|(_, r)| *r).collect();
    let transitions = transitions.into_iter().map(|(t, _)| t).collect();
    Automaton::assemble(
        test.mode(),
        test.actions().to_vec(),
        test.states().to_vec(),
        test.starts().clone(),
        transitions,
        rewards,
        test.tasks().to_vec(),
        None,
    )
}

/// Polarity of a reward coding: reward reaching success, or penalise
/// reaching failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardPolarity {
    Must,
    Surv,
}

/// Codes a success-reporting test as a reward test: +1 on every
/// transition entering a success state (`Must`), or −1 on every
/// transition entering a failure state (`Surv`); all other rewards are 0.
/// The transition structure is unchanged — only the rewards matter to
/// reward-based comparison.
pub fn code_as_reward(test: &Automaton, polarity: RewardPolarity) -> Automaton {
    let marked = crate::semantics::success_mask(test);
    let unit = match polarity {
        RewardPolarity::Must => 1.0,
        RewardPolarity::Surv => -1.0,
    };
    let rewards: Vec<f64> = test
        .transitions()
        .iter()
        .map(|t| if marked[t.to] { unit } else { 0.0 })
        .collect();
    Automaton::assemble(
        test.mode(),
        test.actions().to_vec(),
        test.states().to_vec(),
        test.starts().clone(),
        test.transitions().to_vec(),
        rewards,
        test.tasks().to_vec(),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;

    #[test]
    fn strong_compatibility_rejects_shared_outputs() {
        let t = fixtures::fig1_t_io();
        let a = fixtures::fig1_a();
        let report = check_strong_compatibility(&[&t, &a]).unwrap();
        assert!(!report.ok);
        let shared: BTreeSet<String> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                CompatViolation::SharedOutput { action, .. } => Some(action.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(shared, ["a", "b"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn strong_compatibility_accepts_the_two_state_test() {
        let a = fixtures::sec6_a();
        let t = fixtures::sec6_test();
        let report = check_strong_compatibility(&[&t, &a]).unwrap();
        assert!(report.ok, "{report}");
    }

    #[test]
    fn strong_compatibility_requires_io_mode() {
        let t = fixtures::fig1_t();
        let a = fixtures::fig1_a();
        assert_eq!(
            check_strong_compatibility(&[&t, &a]),
            Err(AlgebraError::ModeMismatch { index: 1 })
        );
    }

    #[test]
    fn plain_compatibility_checks_only_internals() {
        let t = fixtures::fig1_t();
        let a = fixtures::fig1_a();
        assert!(check_compatibility(&[&t, &a]).ok);
        assert!(check_compatibility(&[]).ok);

        // Internal clash: B's internal action is known to A.
        let b = fixtures::sec6_b(); // internal tau
        let clash = check_compatibility(&[&b, &a]);
        assert!(!clash.ok);
        assert!(clash
            .violations
            .iter()
            .any(|v| matches!(v, CompatViolation::InternalClash { action, .. } if action == "tau")));
    }

    #[test]
    fn fig1_composition_up_to_reachability() {
        let t = fixtures::fig1_t();
        let a = fixtures::fig1_a();
        let p = compose(&[&t, &a]).unwrap();
        assert_eq!(p.mode(), Mode::Lts);
        assert_eq!(p.states(), &["t0.p0", "t0.p1", "t1.p3", "t2.p3"]);
        // tau then b then w; the a-branch is blocked because T never
        // offers a.
        assert_eq!(p.transitions().len(), 3);
        let rendered: Vec<String> = p
            .transitions()
            .iter()
            .map(|tr| {
                format!(
                    "{} {} {}",
                    p.state_name(tr.from),
                    p.action_name(tr.action),
                    p.state_name(tr.to)
                )
            })
            .collect();
        assert_eq!(
            rendered,
            vec!["t0.p0 tau t0.p1", "t0.p1 b t1.p3", "t1.p3 w t2.p3"]
        );
    }

    #[test]
    fn singleton_composition_is_identity() {
        let a = fixtures::fig1_a();
        let p = compose(&[&a]).unwrap();
        assert_eq!(p, a);
    }

    #[test]
    fn io_composition_unions_structure() {
        let a = fixtures::sec6_a();
        let t = fixtures::sec6_test();
        let p = compose(&[&t, &a]).unwrap();
        assert_eq!(p.mode(), Mode::Io);
        assert_eq!(p.states(), &["u0.a0", "u1.a0", "u2.a0"]);
        assert_eq!(p.tasks().len(), 2);
        assert!(p.composition().is_some());
    }

    #[test]
    fn hide_reclassifies_everything_but_success() {
        let t = fixtures::fig1_t();
        let a = fixtures::fig1_a();
        let p = hide_for_testing(&compose(&[&t, &a]).unwrap());
        for decl in p.actions() {
            if decl.name == SUCCESS_ACTION {
                assert_eq!(decl.class, ActionClass::Output);
            } else {
                assert_eq!(decl.class, ActionClass::Internal);
            }
        }
        assert_eq!(p.mode(), Mode::Lts);
    }

    #[test]
    fn saturation_adds_loops_everywhere() {
        let t = fixtures::sec6_test();
        let e: BTreeSet<String> = ["ping".to_string()].into();
        let saturated = saturate_inputs(&t, &e);
        assert_eq!(
            saturated.transitions().len(),
            t.transitions().len() + t.states().len()
        );
        let ping = saturated.action_index("ping").unwrap();
        assert_eq!(saturated.action_class(ping), ActionClass::Input);
        for s in 0..saturated.states().len() {
            assert!(saturated.enabled_at(s).contains(&ping));
        }
        assert_eq!(saturate_inputs(&t, &BTreeSet::new()), t);
    }

    #[test]
    fn complementarize_matches_the_signature() {
        // A test over FIG1_A's signature with a stray external action c:
        // after saturation-and-complementation, a and b (outputs of A)
        // become inputs, w stays an output, c goes internal.
        let src = "\
automaton t
  kind io
  inputs a b
  outputs w c
  states x0 x1
  start x0
  task t_w = w
  task t_c = c
  trans x0 a x0
  trans x0 b x0
  trans x1 a x1
  trans x1 b x1
  trans x0 c x1
  trans x1 w x1
end
";
        let t = crate::dsl::parse_single(src).unwrap().1;
        let sig = Signature::of(&fixtures::fig1_a());
        let t2 = complementarize(&t, &sig).unwrap();
        assert!(is_complementary(&t2, &sig), "got {:?}", t2.actions());
        let c = t2.action_index("c").unwrap();
        assert_eq!(t2.action_class(c), ActionClass::Internal);
        // Complementary already: classification unchanged by a second pass.
        let t3 = complementarize(&t2, &sig).unwrap();
        assert_eq!(t3.actions(), t2.actions());
    }

    #[test]
    fn complementarize_needs_success() {
        let a = fixtures::sec6_a();
        let sig = Signature::of(&fixtures::sec6_b());
        assert_eq!(complementarize(&a, &sig), Err(AlgebraError::WNotPresent));
    }

    #[test]
    fn is_complementary_fixture_cases() {
        let sig_a = Signature::of(&fixtures::fig1_a());
        assert!(!is_complementary(&fixtures::fig1_t_io(), &sig_a));
        let sig_6 = Signature::of(&fixtures::sec6_a());
        assert!(is_complementary(&fixtures::sec6_test(), &sig_6));
    }

    #[test]
    fn reclassification_moves_inputs_with_singleton_tasks() {
        let t = fixtures::fig1_t();
        // Make an I/O version first: inputs a b, output w.
        let src = "\
automaton t
  kind io
  inputs a b
  outputs w
  states t0 t1 t2
  start t0
  task t_w = w
  trans t0 a t0
  trans t1 a t1
  trans t2 a t2
  trans t0 b t1
  trans t1 b t1
  trans t2 b t2
  trans t1 w t2
end
";
        let _ = t;
        let t = crate::dsl::parse_single(src).unwrap().1;
        let s: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let star = reclass_inputs_to_outputs(&t, &s);
        assert_eq!(star.class_names(ActionClass::Input), BTreeSet::new());
        assert_eq!(star.tasks().len(), 3);
        assert_eq!(reclass_inputs_to_outputs(&t, &BTreeSet::new()), t);
    }

    #[test]
    fn pruning_trims_behind_success() {
        let src = "\
automaton t
  kind io
  inputs i
  outputs w b
  states s0 s1 s2
  start s0
  task t_w = w
  task t_b = b
  trans s0 i s0
  trans s1 i s2
  trans s2 i s2
  trans s0 b s1
  trans s1 w s2
  trans s1 b s0
end
";
        let t = crate::dsl::parse_single(src).unwrap().1;
        let pruned = prune_success(&t);
        // s1 is the success state: its b-exit and its old i-transition are
        // dropped, an i-self-loop appears, w stays.
        let s1 = pruned.state_index("s1").unwrap();
        let outgoing: Vec<String> = pruned
            .outgoing(s1)
            .iter()
            .map(|&tr| {
                let t = pruned.transitions()[tr];
                format!("{} {}", pruned.action_name(t.action), pruned.state_name(t.to))
            })
            .collect();
        assert_eq!(outgoing, vec!["i s1", "w s2"]);
        // No success states: identity.
        let a = fixtures::sec6_b();
        assert_eq!(prune_success(&a), a);
    }

    #[test]
    fn reward_coding_marks_entries_to_success() {
        let t = fixtures::sec6_test();
        let coded = code_as_reward(&t, RewardPolarity::Must);
        // The internal step u0 -> u1 enters the success state u1.
        let tau = coded.action_index("tau_t").unwrap();
        let idx = coded
            .transitions()
            .iter()
            .position(|tr| tr.action == tau)
            .unwrap();
        assert_eq!(coded.reward(idx), 1.0);
        let w_idx = coded
            .transitions()
            .iter()
            .position(|tr| coded.action_name(tr.action) == SUCCESS_ACTION)
            .unwrap();
        assert_eq!(coded.reward(w_idx), 0.0);

        let surv = code_as_reward(&t, RewardPolarity::Surv);
        assert_eq!(surv.reward(idx), -1.0);

        let plain = code_as_reward(&fixtures::sec6_b(), RewardPolarity::Must);
        assert!(plain.rewards().iter().all(|&r| r == 0.0));
    }
}
