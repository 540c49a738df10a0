//! Automata, executions and words.
//!
//! An automaton is either an I/O automaton (`Mode::Io`) — input-enabled in
//! every state, with its locally controlled actions (outputs and internals)
//! partitioned into named tasks — or a plain labelled transition system
//! (`Mode::Lts`) with no input-enabling obligation and no tasks.
//!
//! States and actions are referred to by string ids at the API boundary and
//! by dense indices internally; the state list, action list and transition
//! list are kept sorted so that equal automata compare equal and all
//! searches enumerate candidates in a fixed order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// The action name reserved for reporting success in tests.
pub const SUCCESS_ACTION: &str = "w";

/// Whether an automaton carries the I/O structure (input-enabling, tasks)
/// or is a plain labelled transition system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Io,
    Lts,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Io => write!(f, "io"),
            Mode::Lts => write!(f, "lts"),
        }
    }
}

/// Classification of a declared action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActionClass {
    Input,
    Output,
    Internal,
}

impl fmt::Display for ActionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionClass::Input => write!(f, "input"),
            ActionClass::Output => write!(f, "output"),
            ActionClass::Internal => write!(f, "internal"),
        }
    }
}

/// A declared action: a name together with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub class: ActionClass,
}

/// One transition, indexing into the automaton's state and action lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub action: usize,
    pub to: usize,
}

/// A named block of the task partition (I/O mode only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    pub actions: BTreeSet<usize>,
}

/// Book-keeping attached to a binary composition so that executions and
/// words can be projected back onto the components.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionMeta {
    /// The component automata, in composition order.
    pub components: Vec<Automaton>,
    /// For each composed state, the state index in each component.
    pub state_components: Vec<Vec<usize>>,
    /// For each composed action, the action index in each component
    /// (`None` where the component does not know the action).
    pub action_components: Vec<Vec<Option<usize>>>,
}

/// A single violation found while validating an automaton description.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Violation {
    #[error("state {state} is missing a transition for input {action}")]
    MissingInputEnabling { state: String, action: String },
    #[error("task partition is wrong at action {action}: {reason}")]
    BadPartition { action: String, reason: String },
    #[error("automaton has no start states")]
    EmptyStarts,
    #[error("undeclared symbol {name}")]
    UndeclaredSymbol { name: String },
    #[error("duplicate declaration of {name}")]
    DuplicateSymbol { name: String },
    #[error("`{SUCCESS_ACTION}` is reserved for success and must not be internal")]
    ReservedSuccessAction,
    #[error("state id {state} contains `.`, which is reserved for composed states")]
    DottedStateId { state: String },
    #[error("transition {from} -{action}-> {to} declared twice with different rewards")]
    ConflictingReward { from: String, action: String, to: String },
    #[error("tasks are only meaningful in io mode")]
    TasksInLtsMode,
}

/// Validation failed; carries every violation found, not just the first.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid automaton: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidAutomaton {
    pub violations: Vec<Violation>,
}

/// Errors from [`Automaton::rename_internals`].
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RenameError {
    #[error("renaming is not a bijection on the internal actions: {detail}")]
    NotABijection { detail: String },
    #[error("renaming target {name} clashes with an existing action")]
    NameClash { name: String },
}

/// An unvalidated automaton description, as produced by the text format
/// parser or assembled programmatically. [`AutomatonSpec::validate`] turns
/// it into an [`Automaton`] or reports the complete list of violations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AutomatonSpec {
    pub mode: Option<Mode>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub internals: Vec<String>,
    pub states: Vec<String>,
    pub starts: Vec<String>,
    /// `(name, actions)` blocks of the task partition.
    pub tasks: Vec<(String, Vec<String>)>,
    /// `(from, action, to, reward)` quadruples.
    pub transitions: Vec<(String, String, String, f64)>,
}

impl AutomatonSpec {
    /// Checks every structural requirement and either builds the indexed
    /// automaton or returns all violations found.
    pub fn validate(&self) -> Result<Automaton, InvalidAutomaton> {
        let mut violations = Vec::new();
        let mode = self.mode.unwrap_or(Mode::Io);

        // Action table, sorted by name; duplicates across classes are errors.
        let mut actions: Vec<ActionDecl> = Vec::new();
        let mut seen = BTreeSet::new();
        for (names, class) in [
            (&self.inputs, ActionClass::Input),
            (&self.outputs, ActionClass::Output),
            (&self.internals, ActionClass::Internal),
        ] {
            for name in names {
                if !seen.insert(name.clone()) {
                    violations.push(Violation::DuplicateSymbol { name: name.clone() });
                    continue;
                }
                actions.push(ActionDecl { name: name.clone(), class });
            }
        }
        actions.sort_by(|a, b| a.name.cmp(&b.name));
        let action_index: BTreeMap<&str, usize> = actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), i))
            .collect();

        if self
            .internals
            .iter()
            .any(|name| name == SUCCESS_ACTION)
        {
            violations.push(Violation::ReservedSuccessAction);
        }

        // State table, sorted.
        let mut states: Vec<String> = Vec::new();
        let mut seen_states = BTreeSet::new();
        for name in &self.states {
            if !seen_states.insert(name.clone()) {
                violations.push(Violation::DuplicateSymbol { name: name.clone() });
                continue;
            }
            if name.contains('.') {
                violations.push(Violation::DottedStateId { state: name.clone() });
            }
            states.push(name.clone());
        }
        states.sort();
        let state_index: BTreeMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        // Starts.
        let mut starts = BTreeSet::new();
        for name in &self.starts {
            match state_index.get(name.as_str()) {
                Some(&i) => {
                    starts.insert(i);
                }
                None => violations.push(Violation::UndeclaredSymbol { name: name.clone() }),
            }
        }
        if starts.is_empty() && self.starts.iter().all(|s| state_index.contains_key(s.as_str())) {
            violations.push(Violation::EmptyStarts);
        }

        // Transitions; undeclared endpoints or labels are reported and the
        // transition skipped.
        let mut transitions: Vec<(Transition, f64)> = Vec::new();
        for (from, action, to, reward) in &self.transitions {
            let f = state_index.get(from.as_str());
            let a = action_index.get(action.as_str());
            let t = state_index.get(to.as_str());
            for (name, found) in [(from, f.is_some()), (action, a.is_some()), (to, t.is_some())] {
                if !found {
                    violations.push(Violation::UndeclaredSymbol { name: name.clone() });
                }
            }
            if let (Some(&f), Some(&a), Some(&t)) = (f, a, t) {
                transitions.push((Transition { from: f, action: a, to: t }, *reward));
            }
        }
        transitions.sort_by_key(|(t, _)| *t);
        for pair in transitions.windows(2) {
            let ((a, ra), (b, rb)) = (&pair[0], &pair[1]);
            if a == b && ra != rb {
                violations.push(Violation::ConflictingReward {
                    from: states[a.from].clone(),
                    action: actions[a.action].name.clone(),
                    to: states[a.to].clone(),
                });
            }
        }
        transitions.dedup_by(|(a, _), (b, _)| a == b);

        // Task partition.
        let mut tasks: Vec<Task> = Vec::new();
        if mode == Mode::Lts && !self.tasks.is_empty() {
            violations.push(Violation::TasksInLtsMode);
        } else if mode == Mode::Io {
            let mut covered: BTreeMap<usize, &str> = BTreeMap::new();
            for (task_name, members) in &self.tasks {
                let mut block = BTreeSet::new();
                for action in members {
                    let Some(&idx) = action_index.get(action.as_str()) else {
                        violations.push(Violation::UndeclaredSymbol { name: action.clone() });
                        continue;
                    };
                    if actions[idx].class == ActionClass::Input {
                        violations.push(Violation::BadPartition {
                            action: action.clone(),
                            reason: "input actions carry no task".into(),
                        });
                        continue;
                    }
                    if let Some(other) = covered.insert(idx, task_name) {
                        violations.push(Violation::BadPartition {
                            action: action.clone(),
                            reason: format!("already in task {other}"),
                        });
                        continue;
                    }
                    block.insert(idx);
                }
                tasks.push(Task { name: task_name.clone(), actions: block });
            }
            for (idx, decl) in actions.iter().enumerate() {
                if decl.class != ActionClass::Input && !covered.contains_key(&idx) {
                    violations.push(Violation::BadPartition {
                        action: decl.name.clone(),
                        reason: "locally controlled action not covered by any task".into(),
                    });
                }
            }
        }

        // Input-enabling (I/O mode): every state must offer every input.
        if mode == Mode::Io {
            let mut enabled = vec![BTreeSet::new(); states.len()];
            for (t, _) in &transitions {
                enabled[t.from].insert(t.action);
            }
            for (s, state) in states.iter().enumerate() {
                for (a, decl) in actions.iter().enumerate() {
                    if decl.class == ActionClass::Input && !enabled[s].contains(&a) {
                        violations.push(Violation::MissingInputEnabling {
                            state: state.clone(),
                            action: decl.name.clone(),
                        });
                    }
                }
            }
        }

        if !violations.is_empty() {
            return Err(InvalidAutomaton { violations });
        }

        let rewards = transitions.iter().map(|(_, r)| *r).collect();
        let transitions = transitions.into_iter().map(|(t, _)| t).collect();
        Ok(Automaton::assemble(
            mode,
            actions,
            states,
            starts,
            transitions,
            rewards,
            tasks,
            None,
        ))
    }

}

/// A validated automaton. Instances only exist with their invariants
/// established: sorted symbol tables, deduplicated transitions, a proper
/// task partition, and (in I/O mode) input-enabling everywhere.
#[derive(Debug, Clone)]
pub struct Automaton {
    mode: Mode,
    actions: Vec<ActionDecl>,
    states: Vec<String>,
    starts: BTreeSet<usize>,
    transitions: Vec<Transition>,
    rewards: Vec<f64>,
    tasks: Vec<Task>,
    composition: Option<Box<CompositionMeta>>,
    /// Per-state list of transition indices, ordered like `transitions`.
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.actions == other.actions
            && self.states == other.states
            && self.starts == other.starts
            && self.transitions == other.transitions
            && self.rewards == other.rewards
            && self.tasks == other.tasks
    }
}

impl Automaton {
    /// Internal constructor; callers guarantee the invariants.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        mode: Mode,
        actions: Vec<ActionDecl>,
        states: Vec<String>,
        starts: BTreeSet<usize>,
        transitions: Vec<Transition>,
        rewards: Vec<f64>,
        tasks: Vec<Task>,
        composition: Option<Box<CompositionMeta>>,
    ) -> Automaton {
        debug_assert!(actions.windows(2).all(|w| w[0].name < w[1].name));
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(transitions.windows(2).all(|w| w[0] <= w[1]));
        debug_assert_eq!(transitions.len(), rewards.len());
        let mut adjacency = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            adjacency[t.from].push(i);
        }
        Automaton {
            mode,
            actions,
            states,
            starts,
            transitions,
            rewards,
            tasks,
            composition,
            adjacency,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn actions(&self) -> &[ActionDecl] {
        &self.actions
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions
            .binary_search_by(|a| a.name.as_str().cmp(name))
            .ok()
    }

    pub fn action_name(&self, idx: usize) -> &str {
        &self.actions[idx].name
    }

    pub fn action_class(&self, idx: usize) -> ActionClass {
        self.actions[idx].class
    }

    pub fn is_internal(&self, idx: usize) -> bool {
        self.actions[idx].class == ActionClass::Internal
    }

    pub fn is_external(&self, idx: usize) -> bool {
        !self.is_internal(idx)
    }

    /// Outputs and internals: the actions the automaton itself drives.
    pub fn is_local(&self, idx: usize) -> bool {
        self.actions[idx].class != ActionClass::Input
    }

    /// Names of all actions in the given class, sorted.
    pub fn class_names(&self, class: ActionClass) -> BTreeSet<String> {
        self.actions
            .iter()
            .filter(|a| a.class == class)
            .map(|a| a.name.clone())
            .collect()
    }

    pub fn external_names(&self) -> BTreeSet<String> {
        self.actions
            .iter()
            .filter(|a| a.class != ActionClass::Internal)
            .map(|a| a.name.clone())
            .collect()
    }

    pub fn action_names(&self) -> BTreeSet<String> {
        self.actions.iter().map(|a| a.name.clone()).collect()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states
            .binary_search_by(|s| s.as_str().cmp(name))
            .ok()
    }

    pub fn state_name(&self, idx: usize) -> &str {
        &self.states[idx]
    }

    pub fn starts(&self) -> &BTreeSet<usize> {
        &self.starts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn reward(&self, transition_idx: usize) -> f64 {
        self.rewards[transition_idx]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn composition(&self) -> Option<&CompositionMeta> {
        self.composition.as_deref()
    }

    /// Transition indices leaving `state`, in sorted transition order.
    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.adjacency[state]
    }

    /// Indices of the actions enabled at `state`.
    pub fn enabled_at(&self, state: usize) -> BTreeSet<usize> {
        self.adjacency[state]
            .iter()
            .map(|&t| self.transitions[t].action)
            .collect()
    }

    /// True when no locally controlled action is enabled at `state`.
    pub fn quiescent_at(&self, state: usize) -> bool {
        !self.adjacency[state]
            .iter()
            .any(|&t| self.is_local(self.transitions[t].action))
    }

    /// True when some action of `task` is enabled at `state`.
    pub fn task_enabled_at(&self, state: usize, task: &Task) -> bool {
        self.adjacency[state]
            .iter()
            .any(|&t| task.actions.contains(&self.transitions[t].action))
    }

    /// States reachable from the start states, ascending.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut queue: Vec<usize> = self.starts.iter().copied().collect();
        for &s in &queue {
            seen[s] = true;
        }
        let mut head = 0;
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            for &t in &self.adjacency[s] {
                let to = self.transitions[t].to;
                if !seen[to] {
                    seen[to] = true;
                    queue.push(to);
                }
            }
        }
        (0..self.states.len()).filter(|&s| seen[s]).collect()
    }

    /// Renames internal actions according to `map` (identity where absent).
    /// The map must be injective on the internals and must not collide with
    /// any retained action name.
    pub fn rename_internals(
        &self,
        map: &BTreeMap<String, String>,
    ) -> Result<Automaton, RenameError> {
        for key in map.keys() {
            match self.action_index(key) {
                Some(idx) if self.is_internal(idx) => {}
                _ => {
                    return Err(RenameError::NotABijection {
                        detail: format!("{key} is not an internal action"),
                    })
                }
            }
        }
        let mut targets = BTreeSet::new();
        for value in map.values() {
            if !targets.insert(value.clone()) {
                return Err(RenameError::NotABijection {
                    detail: format!("two internals map to {value}"),
                });
            }
        }
        let renamed = |name: &str| -> String {
            map.get(name).cloned().unwrap_or_else(|| name.to_string())
        };
        // The renamed internal must not collide with any other action name
        // after renaming.
        let mut new_names = BTreeSet::new();
        for decl in &self.actions {
            let name = if decl.class == ActionClass::Internal {
                renamed(&decl.name)
            } else {
                decl.name.clone()
            };
            if name == SUCCESS_ACTION && map.values().any(|v| *v == name) {
                return Err(RenameError::NameClash { name });
            }
            if !new_names.insert(name.clone()) {
                return Err(RenameError::NameClash { name });
            }
        }

        let mut decls: Vec<ActionDecl> = self
            .actions
            .iter()
            .map(|decl| ActionDecl {
                name: if decl.class == ActionClass::Internal {
                    renamed(&decl.name)
                } else {
                    decl.name.clone()
                },
                class: decl.class,
            })
            .collect();
        // Old index -> new index after re-sorting by name.
        let mut order: Vec<usize> = (0..decls.len()).collect();
        order.sort_by(|&i, &j| decls[i].name.cmp(&decls[j].name));
        let mut remap = vec![0; decls.len()];
        for (new_idx, &old_idx) in order.iter().enumerate() {
            remap[old_idx] = new_idx;
        }
        decls.sort_by(|a, b| a.name.cmp(&b.name));

        let mut transitions: Vec<(Transition, f64)> = self
            .transitions
            .iter()
            .zip(&self.rewards)
            .map(|(t, &r)| {
                (
                    Transition { from: t.from, action: remap[t.action], to: t.to },
                    r,
                )
            })
            .collect();
        transitions.sort_by_key(|(t, _)| *t);
        let rewards = transitions.iter().map(|(_, r)| *r).collect();
        let transitions = transitions.into_iter().map(|(t, _)| t).collect();

        let tasks = self
            .tasks
            .iter()
            .map(|task| Task {
                name: task.name.clone(),
                actions: task.actions.iter().map(|&a| remap[a]).collect(),
            })
            .collect();

        Ok(Automaton::assemble(
            self.mode,
            decls,
            self.states.clone(),
            self.starts.clone(),
            transitions,
            rewards,
            tasks,
            None,
        ))
    }
}

/// Errors from building executions and lassos.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecutionError {
    #[error("unknown state {name}")]
    UnknownState { name: String },
    #[error("execution must begin in a start state, not {state}")]
    NotAStart { state: String },
    #[error("no transition {from} -{action}-> {to}")]
    NoSuchTransition { from: String, action: String, to: String },
    #[error("state and action counts do not line up")]
    Shape,
    #[error("invalid lasso: {reason}")]
    InvalidLasso { reason: String },
}

/// A finite execution: alternating states and actions, beginning in a
/// start state, with every step a transition of the automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteExecution {
    states: Vec<usize>,
    actions: Vec<usize>,
}

impl FiniteExecution {
    pub fn new(
        automaton: &Automaton,
        states: Vec<usize>,
        actions: Vec<usize>,
    ) -> Result<FiniteExecution, ExecutionError> {
        if states.len() != actions.len() + 1 || states.is_empty() {
            return Err(ExecutionError::Shape);
        }
        if !automaton.starts().contains(&states[0]) {
            return Err(ExecutionError::NotAStart {
                state: automaton.state_name(states[0]).to_string(),
            });
        }
        for i in 0..actions.len() {
            check_step(automaton, states[i], actions[i], states[i + 1])?;
        }
        Ok(FiniteExecution { states, actions })
    }

    /// Builds the one-state execution sitting at a start state.
    pub fn initial(automaton: &Automaton, start: usize) -> Result<FiniteExecution, ExecutionError> {
        FiniteExecution::new(automaton, vec![start], vec![])
    }

    /// Crate-internal constructor for search paths that may be rooted at
    /// an arbitrary state rather than a start state. Steps are still
    /// debug-checked against the transition relation.
    pub(crate) fn raw(
        automaton: &Automaton,
        states: Vec<usize>,
        actions: Vec<usize>,
    ) -> FiniteExecution {
        debug_assert_eq!(states.len(), actions.len() + 1);
        for i in 0..actions.len() {
            debug_assert!(
                check_step(automaton, states[i], actions[i], states[i + 1]).is_ok(),
                "raw execution uses a transition the automaton lacks"
            );
        }
        let _ = automaton;
        FiniteExecution { states, actions }
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn last_state(&self) -> usize {
        *self.states.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Renders `s0 a s1 b s2` using the automaton's names.
    pub fn render(&self, automaton: &Automaton) -> String {
        let mut out = String::new();
        for (i, &s) in self.states.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push_str(automaton.action_name(self.actions[i - 1]));
                out.push(' ');
            }
            out.push_str(automaton.state_name(s));
        }
        out
    }
}

fn check_step(
    automaton: &Automaton,
    from: usize,
    action: usize,
    to: usize,
) -> Result<(), ExecutionError> {
    let present = automaton
        .outgoing(from)
        .iter()
        .any(|&t| automaton.transitions()[t] == Transition { from, action, to });
    if present {
        Ok(())
    } else {
        Err(ExecutionError::NoSuchTransition {
            from: automaton.state_name(from).to_string(),
            action: automaton.action_name(action).to_string(),
            to: automaton.state_name(to).to_string(),
        })
    }
}

/// An eventually periodic infinite execution: a finite stem followed by a
/// nonempty loop returning to the stem's last state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoExecution {
    stem: FiniteExecution,
    /// Loop states; first and last equal the stem's last state.
    loop_states: Vec<usize>,
    loop_actions: Vec<usize>,
}

impl LassoExecution {
    pub fn new(
        automaton: &Automaton,
        stem: FiniteExecution,
        loop_states: Vec<usize>,
        loop_actions: Vec<usize>,
    ) -> Result<LassoExecution, ExecutionError> {
        if loop_actions.is_empty() {
            return Err(ExecutionError::InvalidLasso { reason: "empty loop".into() });
        }
        if loop_states.len() != loop_actions.len() + 1 {
            return Err(ExecutionError::InvalidLasso {
                reason: "loop state/action counts do not line up".into(),
            });
        }
        if loop_states[0] != stem.last_state() {
            return Err(ExecutionError::InvalidLasso {
                reason: "loop does not start at the stem's last state".into(),
            });
        }
        if loop_states[0] != *loop_states.last().unwrap() {
            return Err(ExecutionError::InvalidLasso {
                reason: "loop does not return to its first state".into(),
            });
        }
        for i in 0..loop_actions.len() {
            check_step(automaton, loop_states[i], loop_actions[i], loop_states[i + 1])
                .map_err(|e| ExecutionError::InvalidLasso { reason: e.to_string() })?;
        }
        Ok(LassoExecution { stem, loop_states, loop_actions })
    }

    pub fn stem(&self) -> &FiniteExecution {
        &self.stem
    }

    pub fn loop_states(&self) -> &[usize] {
        &self.loop_states
    }

    pub fn loop_actions(&self) -> &[usize] {
        &self.loop_actions
    }

    /// Distinct states occurring on the loop.
    pub fn loop_state_set(&self) -> BTreeSet<usize> {
        self.loop_states.iter().copied().collect()
    }

    /// The finite execution obtained by unrolling the loop `times` times.
    pub fn unroll(&self, automaton: &Automaton, times: usize) -> FiniteExecution {
        let mut states = self.stem.states().to_vec();
        let mut actions = self.stem.actions().to_vec();
        for _ in 0..times {
            for i in 0..self.loop_actions.len() {
                actions.push(self.loop_actions[i]);
                states.push(self.loop_states[i + 1]);
            }
        }
        FiniteExecution::new(automaton, states, actions).expect("unrolled lasso is an execution")
    }

    /// Renders `stem (loop)^w` using the automaton's names.
    pub fn render(&self, automaton: &Automaton) -> String {
        let mut out = self.stem.render(automaton);
        out.push_str(" (");
        for i in 0..self.loop_actions.len() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(automaton.action_name(self.loop_actions[i]));
            out.push(' ');
            out.push_str(automaton.state_name(self.loop_states[i + 1]));
        }
        out.push_str(")^w");
        out
    }
}

/// Either a finite or a lasso-shaped execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecutionWitness {
    Finite(FiniteExecution),
    Lasso(LassoExecution),
}

impl ExecutionWitness {
    pub fn render(&self, automaton: &Automaton) -> String {
        match self {
            ExecutionWitness::Finite(e) => e.render(automaton),
            ExecutionWitness::Lasso(l) => l.render(automaton),
        }
    }
}

/// A finite word of external action names.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct TraceWord(pub Vec<String>);

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0.join(" "))
        }
    }
}

/// An eventually periodic infinite word `stem · cycle^ω` of external
/// action names; the cycle is nonempty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LassoWord {
    pub stem: Vec<String>,
    pub cycle: Vec<String>,
}

impl LassoWord {
    /// The shortest representation of the same infinite word: the cycle
    /// is cut to its primitive root, and any trailing stem letters that
    /// merely repeat the cycle are absorbed into it by rotation.
    pub fn normalized(&self) -> LassoWord {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for d in 1..n {
            if n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d]) {
                cycle.truncate(d);
                break;
            }
        }
        let mut stem = self.stem.clone();
        while let (Some(last), false) = (stem.last(), cycle.is_empty()) {
            if last != cycle.last().expect("cycle is nonempty") {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        LassoWord { stem, cycle }
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})^w", TraceWord(self.stem.clone()), self.cycle.join(" "))
    }
}

/// A finite or eventually periodic infinite word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Word {
    Finite(TraceWord),
    Lasso(LassoWord),
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Finite(w) => write!(f, "{w}"),
            Word::Lasso(w) => write!(f, "{w}"),
        }
    }
}
