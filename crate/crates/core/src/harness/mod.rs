//! Random generation of automata and tests, plus the named
//! cross-validation suites run by the CLI and the acceptance tests.

pub mod fixtures;

mod gen;
mod suites;

pub use gen::{random_io_automaton, random_pair, random_test, Ensure, GenParams, TaskShape};
pub use suites::{run_suite, FailureRecord, SuiteResult, SUITE_NAMES};
