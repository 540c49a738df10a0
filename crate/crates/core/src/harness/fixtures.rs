//! Built-in fixtures, written in the textual format so the same sources
//! feed the library tests and the CLI's name resolution.
//!
//! The FIG1 family is the branching example: A commits internally before
//! offering `a` or `b`, B commits internally to one of them, and T waits
//! for `b` and then reports success — `a` is declared by T but never
//! offered, so composing with T blocks `a`. The SEC6 pair contrasts a
//! single idle state with a single internally-cycling state; SEC6_TEST is
//! the two-state complementary test that separates them under the
//! progress-based must verdict.

use crate::dsl::parse_single;
use crate::model::Automaton;

pub const FIG1_A_SRC: &str = "\
automaton FIG1_A
  kind io
  outputs a b
  internals tau
  states p0 p1 p2 p3
  start p0
  task t_tau = tau
  task t_a = a
  task t_b = b
  trans p0 tau p1
  trans p1 a p2
  trans p1 b p3
end
";

pub const FIG1_B_SRC: &str = "\
automaton FIG1_B
  kind io
  outputs a b
  internals tau
  states q0 q1 q2 q3 q4
  start q0
  task t_tau = tau
  task t_a = a
  task t_b = b
  trans q0 tau q1
  trans q0 tau q2
  trans q1 a q3
  trans q2 b q4
end
";

pub const FIG1_T_SRC: &str = "\
automaton FIG1_T
  kind lts
  inputs a b
  outputs w
  states t0 t1 t2
  start t0
  trans t0 b t1
  trans t1 w t2
end
";

pub const FIG1_T_IO_SRC: &str = "\
automaton FIG1_T_IO
  kind io
  outputs a b w
  states t0 t1 t2
  start t0
  task t_a = a
  task t_b = b
  task t_w = w
  trans t0 b t1
  trans t1 w t2
end
";

pub const SEC6_A_SRC: &str = "\
automaton SEC6_A
  kind io
  states a0
  start a0
end
";

pub const SEC6_B_SRC: &str = "\
automaton SEC6_B
  kind io
  internals tau
  states b0
  start b0
  task t_tau = tau
  trans b0 tau b0
end
";

pub const SEC6_TEST_SRC: &str = "\
automaton SEC6_TEST
  kind io
  outputs w
  internals tau_t
  states u0 u1 u2
  start u0
  task t_tau = tau_t
  task t_w = w
  trans u0 tau_t u1
  trans u1 w u2
end
";

fn parse(src: &str) -> Automaton {
    parse_single(src).expect("fixture source is valid").1
}

pub fn fig1_a() -> Automaton {
    parse(FIG1_A_SRC)
}

pub fn fig1_b() -> Automaton {
    parse(FIG1_B_SRC)
}

pub fn fig1_t() -> Automaton {
    parse(FIG1_T_SRC)
}

pub fn fig1_t_io() -> Automaton {
    parse(FIG1_T_IO_SRC)
}

pub fn sec6_a() -> Automaton {
    parse(SEC6_A_SRC)
}

pub fn sec6_b() -> Automaton {
    parse(SEC6_B_SRC)
}

pub fn sec6_test() -> Automaton {
    parse(SEC6_TEST_SRC)
}

/// All fixtures by name, for CLI name resolution.
pub fn all() -> Vec<(&'static str, Automaton)> {
    vec![
        ("FIG1_A", fig1_a()),
        ("FIG1_B", fig1_b()),
        ("FIG1_T", fig1_t()),
        ("FIG1_T_IO", fig1_t_io()),
        ("SEC6_A", sec6_a()),
        ("SEC6_B", sec6_b()),
        ("SEC6_TEST", sec6_test()),
    ]
}
