//! Execution-level semantics: enabledness, quiescence, weak fairness,
//! traces, schedules, projections and rewards.
//!
//! Weak fairness follows the task partition: an execution is fair when no
//! task is eventually enabled forever without being taken. For a finite
//! execution that collapses to quiescence of the last state; for a lasso
//! it is the per-task loop criterion checked by [`is_fair_lasso`].

use crate::model::{
    Automaton, CompositionMeta, ExecutionWitness, FiniteExecution, LassoExecution, LassoWord, Mode,
    TraceWord, Word, SUCCESS_ACTION,
};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unknown state {name}")]
    UnknownState { name: String },
    #[error("execution does not belong to a recorded binary composition")]
    NotAComposition,
    #[error("projection index {k} out of range; components are numbered 1 and 2")]
    BadProjectionIndex { k: usize },
}

/// Names of the actions enabled at the named state.
pub fn enabled_actions(
    automaton: &Automaton,
    state: &str,
) -> Result<BTreeSet<String>, SemanticsError> {
    let idx = automaton
        .state_index(state)
        .ok_or_else(|| SemanticsError::UnknownState { name: state.to_string() })?;
    Ok(automaton
        .enabled_at(idx)
        .into_iter()
        .map(|a| automaton.action_name(a).to_string())
        .collect())
}

/// Names of the tasks with at least one enabled action at the named state.
pub fn enabled_tasks(
    automaton: &Automaton,
    state: &str,
) -> Result<BTreeSet<String>, SemanticsError> {
    let idx = automaton
        .state_index(state)
        .ok_or_else(|| SemanticsError::UnknownState { name: state.to_string() })?;
    Ok(automaton
        .tasks()
        .iter()
        .filter(|task| automaton.task_enabled_at(idx, task))
        .map(|task| task.name.clone())
        .collect())
}

/// True when the named state enables only input actions.
pub fn is_quiescent(automaton: &Automaton, state: &str) -> Result<bool, SemanticsError> {
    let idx = automaton
        .state_index(state)
        .ok_or_else(|| SemanticsError::UnknownState { name: state.to_string() })?;
    Ok(automaton.quiescent_at(idx))
}

/// A finite execution is fair exactly when its last state is quiescent:
/// any task enabled there would stay enabled on the (empty) remainder
/// without ever being taken.
pub fn is_fair_finite(automaton: &Automaton, execution: &FiniteExecution) -> bool {
    automaton.quiescent_at(execution.last_state())
}

/// A lasso is fair exactly when every task either is disabled somewhere
/// on the loop or contributes an action to the loop.
pub fn is_fair_lasso(automaton: &Automaton, lasso: &LassoExecution) -> bool {
    let loop_states = lasso.loop_state_set();
    let loop_actions: BTreeSet<usize> = lasso.loop_actions().iter().copied().collect();
    automaton.tasks().iter().all(|task| {
        let disabled_somewhere = loop_states
            .iter()
            .any(|&s| !automaton.task_enabled_at(s, task));
        let taken = loop_actions.iter().any(|a| task.actions.contains(a));
        disabled_somewhere || taken
    })
}

/// The external-action word of a finite execution.
pub fn trace_finite(automaton: &Automaton, execution: &FiniteExecution) -> TraceWord {
    TraceWord(
        execution
            .actions()
            .iter()
            .filter(|&&a| automaton.is_external(a))
            .map(|&a| automaton.action_name(a).to_string())
            .collect(),
    )
}

/// The word of a lasso execution. A loop consisting solely of internal
/// actions contributes nothing externally, so the result degenerates to
/// the finite trace of the stem.
pub fn trace_lasso(automaton: &Automaton, lasso: &LassoExecution) -> Word {
    let stem = trace_finite(automaton, lasso.stem());
    let cycle: Vec<String> = lasso
        .loop_actions()
        .iter()
        .filter(|&&a| automaton.is_external(a))
        .map(|&a| automaton.action_name(a).to_string())
        .collect();
    if cycle.is_empty() {
        Word::Finite(stem)
    } else {
        Word::Lasso(LassoWord { stem: stem.0, cycle })
    }
}

pub fn trace_of(automaton: &Automaton, witness: &ExecutionWitness) -> Word {
    match witness {
        ExecutionWitness::Finite(e) => Word::Finite(trace_finite(automaton, e)),
        ExecutionWitness::Lasso(l) => trace_lasso(automaton, l),
    }
}

/// The full action word (internal actions included) of a finite execution.
pub fn sched_finite(automaton: &Automaton, execution: &FiniteExecution) -> Vec<String> {
    execution
        .actions()
        .iter()
        .map(|&a| automaton.action_name(a).to_string())
        .collect()
}

/// The full action word of a lasso, as (stem actions, loop actions).
pub fn sched_lasso(
    automaton: &Automaton,
    lasso: &LassoExecution,
) -> (Vec<String>, Vec<String>) {
    (
        sched_finite(automaton, lasso.stem()),
        lasso
            .loop_actions()
            .iter()
            .map(|&a| automaton.action_name(a).to_string())
            .collect(),
    )
}

fn meta_of(automaton: &Automaton) -> Result<&CompositionMeta, SemanticsError> {
    match automaton.composition() {
        Some(meta) if meta.components.len() == 2 => Ok(meta),
        _ => Err(SemanticsError::NotAComposition),
    }
}

/// Projects an execution of a recorded binary composition onto component
/// `k` (1 or 2): component states replace composed states and the steps
/// not involving the component are deleted. The projection of a lasso
/// whose loop never touches the component degenerates to a finite
/// execution.
pub fn project(
    automaton: &Automaton,
    witness: &ExecutionWitness,
    k: usize,
) -> Result<ExecutionWitness, SemanticsError> {
    let meta = meta_of(automaton)?;
    if k != 1 && k != 2 {
        return Err(SemanticsError::BadProjectionIndex { k });
    }
    let c = k - 1;
    let component = &meta.components[c];
    let project_finite = |execution: &FiniteExecution| -> FiniteExecution {
        let mut states = vec![meta.state_components[execution.states()[0]][c]];
        let mut actions = Vec::new();
        for (i, &a) in execution.actions().iter().enumerate() {
            if let Some(ca) = meta.action_components[a][c] {
                actions.push(ca);
                states.push(meta.state_components[execution.states()[i + 1]][c]);
            }
        }
        FiniteExecution::new(component, states, actions)
            .expect("projection of a composed execution is an execution of the component")
    };
    match witness {
        ExecutionWitness::Finite(e) => Ok(ExecutionWitness::Finite(project_finite(e))),
        ExecutionWitness::Lasso(l) => {
            let stem = project_finite(l.stem());
            let mut loop_states = vec![meta.state_components[l.loop_states()[0]][c]];
            let mut loop_actions = Vec::new();
            for (i, &a) in l.loop_actions().iter().enumerate() {
                if let Some(ca) = meta.action_components[a][c] {
                    loop_actions.push(ca);
                    loop_states.push(meta.state_components[l.loop_states()[i + 1]][c]);
                }
            }
            if loop_actions.is_empty() {
                Ok(ExecutionWitness::Finite(stem))
            } else {
                Ok(ExecutionWitness::Lasso(
                    LassoExecution::new(component, stem, loop_states, loop_actions).expect(
                        "projection of a composed lasso loop is a loop of the component",
                    ),
                ))
            }
        }
    }
}

/// Restricts a word to the letters drawn from `alphabet`.
pub fn restrict_word(word: &Word, alphabet: &BTreeSet<String>) -> Word {
    let keep = |letters: &[String]| -> Vec<String> {
        letters
            .iter()
            .filter(|l| alphabet.contains(*l))
            .cloned()
            .collect()
    };
    match word {
        Word::Finite(w) => Word::Finite(TraceWord(keep(&w.0))),
        Word::Lasso(w) => {
            let cycle = keep(&w.cycle);
            if cycle.is_empty() {
                Word::Finite(TraceWord(keep(&w.stem)))
            } else {
                Word::Lasso(LassoWord { stem: keep(&w.stem), cycle })
            }
        }
    }
}

/// Restricts a word of a recorded binary composition to component `k`'s
/// alphabet.
pub fn restrict_word_to_component(
    automaton: &Automaton,
    word: &Word,
    k: usize,
) -> Result<Word, SemanticsError> {
    let meta = meta_of(automaton)?;
    if k != 1 && k != 2 {
        return Err(SemanticsError::BadProjectionIndex { k });
    }
    Ok(restrict_word(word, &meta.components[k - 1].action_names()))
}

/// Extended real number: rewards of infinite executions may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn le(&self, other: &ExtReal) -> bool {
        match (self, other) {
            (ExtReal::NegInf, _) => true,
            (_, ExtReal::PosInf) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b,
            _ => false,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self.le(&other) {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

fn transition_index(automaton: &Automaton, from: usize, action: usize, to: usize) -> usize {
    automaton
        .transitions()
        .binary_search(&crate::model::Transition { from, action, to })
        .expect("execution step is a transition")
}

fn finite_reward_sum(automaton: &Automaton, execution: &FiniteExecution) -> f64 {
    execution
        .actions()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let idx = transition_index(
                automaton,
                execution.states()[i],
                a,
                execution.states()[i + 1],
            );
            automaton.reward(idx)
        })
        .sum()
}

fn loop_rewards(automaton: &Automaton, lasso: &LassoExecution) -> Vec<f64> {
    lasso
        .loop_actions()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let idx = transition_index(
                automaton,
                lasso.loop_states()[i],
                a,
                lasso.loop_states()[i + 1],
            );
            automaton.reward(idx)
        })
        .collect()
}

/// The reward of an execution: the sum of its transition rewards. For a
/// lasso the partial sums diverge to ±∞ when one loop period has nonzero
/// total; with a zero-total loop the partial sums oscillate and the limit
/// superior — stem total plus the best partial sum within one period —
/// is reported.
pub fn reward_of(automaton: &Automaton, witness: &ExecutionWitness) -> ExtReal {
    match witness {
        ExecutionWitness::Finite(e) => ExtReal::Finite(finite_reward_sum(automaton, e)),
        ExecutionWitness::Lasso(l) => {
            let per_loop = loop_rewards(automaton, l);
            let total: f64 = per_loop.iter().sum();
            if total > 0.0 {
                ExtReal::PosInf
            } else if total < 0.0 {
                ExtReal::NegInf
            } else {
                let stem = finite_reward_sum(automaton, l.stem());
                let mut best: f64 = 0.0;
                let mut acc = 0.0;
                for r in per_loop {
                    acc += r;
                    best = best.max(acc);
                }
                ExtReal::Finite(stem + best)
            }
        }
    }
}

/// Whether the lasso's reward used the limit-superior convention (finite
/// value with a zero-total loop); reports flag such values.
pub fn reward_used_lim_sup(automaton: &Automaton, witness: &ExecutionWitness) -> bool {
    match witness {
        ExecutionWitness::Finite(_) => false,
        ExecutionWitness::Lasso(l) => loop_rewards(automaton, l).iter().sum::<f64>() == 0.0,
    }
}

/// True when the state enables the success action `w`.
pub fn is_successful_state(automaton: &Automaton, state: usize) -> bool {
    match automaton.action_index(SUCCESS_ACTION) {
        Some(w) => automaton.enabled_at(state).contains(&w),
        None => false,
    }
}

/// Success states of the automaton, as a membership mask.
pub fn success_mask(automaton: &Automaton) -> Vec<bool> {
    (0..automaton.states().len())
        .map(|s| is_successful_state(automaton, s))
        .collect()
}

/// How success of an execution is judged: by passing through a success
/// state, or by actually performing the success action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuccessMode {
    StateBased,
    ActionBased,
}

/// Whether the execution is successful under the given mode.
pub fn execution_successful(
    automaton: &Automaton,
    witness: &ExecutionWitness,
    mode: SuccessMode,
) -> bool {
    match mode {
        SuccessMode::StateBased => {
            let hit = |states: &[usize]| states.iter().any(|&s| is_successful_state(automaton, s));
            match witness {
                ExecutionWitness::Finite(e) => hit(e.states()),
                ExecutionWitness::Lasso(l) => hit(l.stem().states()) || hit(l.loop_states()),
            }
        }
        SuccessMode::ActionBased => {
            let Some(w) = automaton.action_index(SUCCESS_ACTION) else {
                return false;
            };
            match witness {
                ExecutionWitness::Finite(e) => e.actions().contains(&w),
                ExecutionWitness::Lasso(l) => {
                    l.stem().actions().contains(&w) || l.loop_actions().contains(&w)
                }
            }
        }
    }
}

/// The coarse external view used when an I/O automaton participates in a
/// plain (non-I/O) composition: classes are kept, tasks dropped.
pub fn as_lts(automaton: &Automaton) -> Automaton {
    if automaton.mode() == Mode::Lts {
        return automaton.clone();
    }
    Automaton::assemble(
        Mode::Lts,
        automaton.actions().to_vec(),
        automaton.states().to_vec(),
        automaton.starts().clone(),
        automaton.transitions().to_vec(),
        automaton.rewards().to_vec(),
        Vec::new(),
        None,
    )
}
