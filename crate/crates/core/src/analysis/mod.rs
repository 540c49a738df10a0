//! Decision procedures over automata: fair-execution emptiness, trace
//! and quiescent-trace inclusion, the finite and infinite fair-trace
//! languages, convergence checks, and the supporting graph searches.

pub(crate) mod engine;
mod omega;
mod subset;

use crate::model::{Automaton, ExecutionWitness, LassoExecution, LassoWord, TraceWord, Word};
use engine::{fair_search, SearchSpec};
use std::collections::BTreeSet;
use std::fmt;

pub use subset::FiniteTraceAcceptor;

/// A fair execution produced by an emptiness query; finite witnesses end
/// in a quiescent state, lassos discharge every task obligation.
pub type FairWitness = ExecutionWitness;

/// Reachable synchronized-product size up to which the exact ω-inclusion
/// method is attempted.
const EXACT_PRODUCT_GATE: usize = 8;

/// How definitive a report is: `Exact` verdicts are final; `Bounded`
/// holds-verdicts may have missed counterexamples beyond the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Exact,
    Bounded(usize),
}

impl fmt::Display for Completeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completeness::Exact => write!(f, "exact"),
            Completeness::Bounded(k) => write!(f, "bounded({k})"),
        }
    }
}

/// Requested decision mode for ω-behaviour: `Exact` runs the
/// monoid-based inclusion when the instance is small enough and falls
/// back to bounded search otherwise; `Bounded` always bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InclusionMode {
    #[default]
    Exact,
    Bounded,
}

impl std::str::FromStr for InclusionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(InclusionMode::Exact),
            "bounded" => Ok(InclusionMode::Bounded),
            other => Err(format!("unknown mode {other}")),
        }
    }
}

/// Outcome of a language-inclusion query. A counterexample is present
/// exactly when the inclusion fails, and always re-verifies through the
/// corresponding membership operation.
#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub holds: bool,
    pub counterexample: Option<Word>,
    pub completeness: Completeness,
    pub warnings: Vec<String>,
}

impl InclusionReport {
    fn exact(holds: bool, counterexample: Option<Word>) -> InclusionReport {
        InclusionReport { holds, counterexample, completeness: Completeness::Exact, warnings: Vec::new() }
    }
}

/// Searches for a fair execution that visits no avoided state and takes
/// no avoided action (indices into the automaton's action table).
/// Enabledness and quiescence are judged in the unrestricted automaton.
/// `None` certifies that no such execution exists.
pub fn fair_emptiness<F>(
    p: &Automaton,
    avoid_state: F,
    avoid_actions: &BTreeSet<usize>,
) -> Option<FairWitness>
where
    F: Fn(usize) -> bool,
{
    let mut spec = SearchSpec::new(p);
    spec.avoid_state = (0..p.states().len()).map(avoid_state).collect();
    for &a in avoid_actions {
        spec.avoid_action[a] = true;
    }
    fair_search(&spec)
}

/// Can the state be extended into a fair execution? True for every
/// reachable state of a valid I/O automaton; exposed as a checkable
/// invariant rather than assumed.
pub fn fair_completion_exists(a: &Automaton, state: usize) -> bool {
    let mut spec = SearchSpec::new(a);
    spec.roots = [state].into();
    fair_search(&spec).is_some()
}

/// Decides traces(B) ⊆ traces(A); always exact.
pub fn finite_trace_inclusion(a: &Automaton, b: &Automaton) -> InclusionReport {
    let acc_a = vec![true; a.states().len()];
    let acc_b = vec![true; b.states().len()];
    match subset::nfa_inclusion(b, &acc_b, a, &acc_a) {
        Some(word) => {
            debug_assert!(finite_trace_membership(b, &TraceWord(word.clone())));
            debug_assert!(!finite_trace_membership(a, &TraceWord(word.clone())));
            InclusionReport::exact(false, Some(Word::Finite(TraceWord(word))))
        }
        None => InclusionReport::exact(true, None),
    }
}

/// Decides qtraces(B) ⊆ qtraces(A): traces of executions ending in a
/// quiescent state; always exact.
pub fn quiescent_trace_inclusion(a: &Automaton, b: &Automaton) -> InclusionReport {
    let acc = |x: &Automaton| -> Vec<bool> {
        (0..x.states().len()).map(|s| x.quiescent_at(s)).collect()
    };
    match subset::nfa_inclusion(b, &acc(b), a, &acc(a)) {
        Some(word) => {
            debug_assert!(quiescent_trace_membership(b, &TraceWord(word.clone())));
            debug_assert!(!quiescent_trace_membership(a, &TraceWord(word.clone())));
            InclusionReport::exact(false, Some(Word::Finite(TraceWord(word))))
        }
        None => InclusionReport::exact(true, None),
    }
}

pub fn finite_trace_membership(a: &Automaton, word: &TraceWord) -> bool {
    let acc = vec![true; a.states().len()];
    subset::nfa_membership(a, &acc, &word.0)
}

pub fn quiescent_trace_membership(a: &Automaton, word: &TraceWord) -> bool {
    let acc: Vec<bool> = (0..a.states().len()).map(|s| a.quiescent_at(s)).collect();
    subset::nfa_membership(a, &acc, &word.0)
}

/// Acceptor for the finite fair traces: traces of fair executions that
/// are finite words — executions ending quiescent, or diverging fairly
/// through internal actions forever.
pub fn finite_fairtrace_language(a: &Automaton) -> FiniteTraceAcceptor {
    FiniteTraceAcceptor::new(a.clone(), subset::fair_epsilon_mask(a))
}

pub fn finite_fairtrace_membership(a: &Automaton, word: &TraceWord) -> bool {
    subset::nfa_membership(a, &subset::fair_epsilon_mask(a), &word.0)
}

/// Does some fair execution of the automaton have the infinite trace
/// `stem·cycle^ω`? Returns such an execution as a lasso. Exact.
pub fn lasso_fairtrace_membership(a: &Automaton, word: &LassoWord) -> Option<LassoExecution> {
    omega::tracker_membership(a, word)
}

/// Default lasso enumeration bound for a pair of automata.
pub fn default_lasso_bound(a: &Automaton, b: &Automaton) -> usize {
    a.states().len() * b.states().len() + b.states().len()
}

/// Decides fairtraces(B) ⊆ fairtraces(A). The finite-word part is always
/// exact; the infinite part is exact when the mode allows it and the
/// instance is small enough, and otherwise a bounded lasso search whose
/// holds-verdict is only as strong as the bound. Counterexamples are
/// re-verified by membership before being reported.
pub fn fair_trace_inclusion(
    a: &Automaton,
    b: &Automaton,
    bound: Option<usize>,
    mode: InclusionMode,
) -> InclusionReport {
    let bound = bound.unwrap_or_else(|| default_lasso_bound(a, b));

    // Finite fair traces, exactly.
    let mask_a = &finite_fairtrace_language(a);
    let mask_b = &finite_fairtrace_language(b);
    if let Some(word) = subset::nfa_inclusion(
        mask_b.automaton(),
        mask_b.accepting_mask(),
        mask_a.automaton(),
        mask_a.accepting_mask(),
    ) {
        debug_assert!(finite_fairtrace_membership(b, &TraceWord(word.clone())));
        debug_assert!(!finite_fairtrace_membership(a, &TraceWord(word.clone())));
        return InclusionReport::exact(false, Some(Word::Finite(TraceWord(word))));
    }

    let mut warnings: Vec<String> = Vec::new();
    if mode == InclusionMode::Exact {
        let size = omega::synchronized_product_size(a, b);
        if size <= EXACT_PRODUCT_GATE {
            let alphabet: Vec<String> = a
                .external_names()
                .union(&b.external_names())
                .cloned()
                .collect();
            match (omega::fair_buchi(a, &alphabet), omega::fair_buchi(b, &alphabet)) {
                (Some(ba), Some(bb)) => match omega::omega_inclusion(&ba, &bb, &alphabet) {
                    omega::OmegaOutcome::Included => {
                        return InclusionReport::exact(true, None);
                    }
                    omega::OmegaOutcome::Counterexample(w) => {
                        let in_b = lasso_fairtrace_membership(b, &w).is_some();
                        let in_a = lasso_fairtrace_membership(a, &w).is_some();
                        if in_b && !in_a {
                            return InclusionReport::exact(false, Some(Word::Lasso(w)));
                        }
                        debug_assert!(false, "profile counterexample failed re-verification");
                        warnings.push(
                            "exact search produced an unverifiable counterexample; \
                             falling back to bounded search"
                                .to_string(),
                        );
                    }
                    omega::OmegaOutcome::GaveUp(reason) => {
                        warnings.push(format!("exact mode unavailable: {reason}"));
                    }
                },
                _ => warnings.push(
                    "exact mode unavailable: acceptor construction exceeded caps".to_string(),
                ),
            }
        } else {
            warnings.push(format!(
                "exact mode gated off: synchronized product has {size} states (> {EXACT_PRODUCT_GATE})"
            ));
        }
    }

    match omega::bounded_lasso_counterexample(a, b, bound) {
        Some((w, _witness)) => InclusionReport {
            holds: false,
            counterexample: Some(Word::Lasso(w)),
            completeness: Completeness::Exact,
            warnings,
        },
        None => {
            warnings.push(format!(
                "bound too small to certify: lasso search stopped at |stem|+|loop| <= {bound}"
            ));
            InclusionReport {
                holds: true,
                counterexample: None,
                completeness: Completeness::Bounded(bound),
                warnings,
            }
        }
    }
}

/// No reachable cycle of internal transitions: every execution with a
/// finite trace is finite.
pub fn is_strongly_convergent(a: &Automaton) -> bool {
    let reachable = a.reachable();
    let mut color = vec![0u8; a.states().len()]; // 0 white, 1 gray, 2 black
    for &root in &reachable {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&(s, pos)) = stack.last() {
            let outgoing = a.outgoing(s);
            let mut next = None;
            let mut p = pos;
            while p < outgoing.len() {
                let tr = &a.transitions()[outgoing[p]];
                p += 1;
                if !a.is_internal(tr.action) {
                    continue;
                }
                match color[tr.to] {
                    1 => return false, // internal cycle
                    0 => {
                        next = Some(tr.to);
                        break;
                    }
                    _ => {}
                }
            }
            stack.last_mut().unwrap().1 = p;
            match next {
                Some(to) => {
                    color[to] = 1;
                    stack.push((to, 0));
                }
                None => {
                    color[s] = 2;
                    stack.pop();
                }
            }
        }
    }
    true
}

/// Every state enables finitely many transitions — trivially true for
/// this finite representation, checked for interface fidelity.
pub fn is_finitely_branching(_a: &Automaton) -> bool {
    true
}
