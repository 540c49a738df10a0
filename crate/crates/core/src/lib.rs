//! I/O automata with task-based weak fairness.
//!
//! The crate models input/output automata (input-enabled, with a task
//! partition driving weak fairness) and plain labelled transition systems,
//! and implements the operations needed to compare them by testing:
//!
//! * [`model`] — automata, executions, lassos, words, validation.
//! * [`algebra`] — compatibility checks, parallel composition, and the
//!   test transformations (hiding, input saturation, complementation,
//!   success pruning, reward coding).
//! * [`semantics`] — enabledness, quiescence, fairness of executions,
//!   traces, projections, rewards.
//! * [`analysis`] — reachability-style decision procedures: fair
//!   emptiness, trace/quiescent-trace/fair-trace inclusion, membership
//!   checks, convergence checks.
//! * [`verdicts`] — testing verdicts (may, survival, should, must under
//!   a progress assumption, must under fairness, minimum fair reward)
//!   and admissibility of a test for a given compatibility regime.
//! * [`preorders`] — the trace, quiescent-trace and fair-trace preorders,
//!   the derived testing preorders, and synthesis of distinguishing
//!   witness tests from failed inclusions.
//! * [`harness`] — seeded random generation of automata and tests plus
//!   the named cross-validation suites used by the acceptance gate.
//! * [`dsl`] — the line-oriented textual format used by the CLI and the
//!   built-in fixtures.

pub mod algebra;
pub mod analysis;
pub mod dsl;
pub mod harness;
pub mod model;
pub mod preorders;
pub mod semantics;
pub mod verdicts;

pub use model::{Automaton, FiniteExecution, LassoExecution, LassoWord, Mode, TraceWord};
