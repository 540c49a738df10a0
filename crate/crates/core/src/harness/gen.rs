//! Seeded random generation of I/O automata and of admissible tests for
//! each compatibility regime. All draws go through a counter-based RNG
//! keyed by `GenParams::seed`, so identical parameters replay to
//! identical automata: the draw order is part of the format.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Regime, Signature};
use crate::model::{Automaton, AutomatonSpec, Mode, SUCCESS_ACTION};

/// Granularity of the generated task partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskShape {
    /// One task per local action.
    Singleton,
    /// Local actions grouped into randomly sized blocks.
    Random,
}

/// Structural guarantee requested from the generator. The guarantee is
/// enforced by construction, and the generator's tests re-check it
/// through the analysis module rather than trusting the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensure {
    None,
    /// No internal cycles: internal transitions only move to
    /// strictly higher-numbered states.
    StronglyConvergent,
    /// Finite branching. Every finite-state automaton is finitely
    /// branching, so this requests nothing beyond `None`; it exists so
    /// callers can state the assumption explicitly.
    FinitelyBranching,
}

/// Knobs for the random ensembles. The defaults give the desk-scale
/// ensemble used by the cross-validation suites: at most 5 states, 2
/// inputs, 2 outputs, 1 internal action, transition density 0.3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub max_states: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_internals: usize,
    /// Probability that a given (state, action) pair gets an outgoing
    /// transition; 1.0 realises every pair.
    pub density: f64,
    pub task_shape: TaskShape,
    pub seed: u64,
    pub ensure: Ensure,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            max_states: 5,
            max_inputs: 2,
            max_outputs: 2,
            max_internals: 1,
            density: 0.3,
            task_shape: TaskShape::Singleton,
            seed: 0,
            ensure: Ensure::None,
        }
    }
}

impl GenParams {
    /// The same knobs under a different seed.
    pub fn reseed(&self, seed: u64) -> GenParams {
        GenParams {
            seed,
            ..self.clone()
        }
    }
}

/// Draws a random I/O automaton: alphabet sizes up to the configured
/// maxima, a random transition relation at the configured density, and
/// input-enabling completed with self-loops.
pub fn random_io_automaton(p: &GenParams) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (inputs, outputs, internals) = alphabet(&mut rng, p);
    body(&mut rng, p, Mode::Io, &inputs, &outputs, &internals)
}

/// Draws two automata over one shared alphabet, for preorder probes.
/// Sharing the interface keeps the pair comparable; the bodies are
/// independent draws from the same stream.
pub fn random_pair(p: &GenParams) -> (Automaton, Automaton) {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (inputs, outputs, internals) = alphabet(&mut rng, p);
    let a = body(&mut rng, p, Mode::Io, &inputs, &outputs, &internals);
    let b = body(&mut rng, p, Mode::Io, &inputs, &outputs, &internals);
    (a, b)
}

/// Draws a test admissible for the given regime against the given
/// interface. The shapes per regime:
///
/// * `lts-compatible` — a plain transition system (no tasks, no
///   input-enabling) over the mirrored interface plus `w`.
/// * `strongly-compatible` — an I/O automaton whose inputs are the
///   tested outputs and whose outputs are a random subset of the tested
///   inputs plus `w`; output-disjointness is then automatic.
/// * `empty-input` — complementary shape plus up to one fresh output,
///   so the composition keeps an empty input set.
/// * `complementary` — inputs exactly the tested outputs, outputs
///   exactly the tested inputs plus `w`.
pub fn random_test(p: &GenParams, sig: &Signature, regime: Regime) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let taken = sig.all_names();
    let inputs: Vec<String> = sig.outputs.iter().cloned().collect();
    let mut outputs: Vec<String> = match regime {
        Regime::Complementary | Regime::EmptyInput => sig.inputs.iter().cloned().collect(),
        Regime::StronglyCompatible | Regime::LtsCompatible => sig
            .inputs
            .iter()
            .filter(|_| rng.gen::<f64>() < 0.7)
            .cloned()
            .collect(),
    };
    outputs.push(SUCCESS_ACTION.to_string());
    if regime == Regime::EmptyInput {
        let extra = rng.gen_range(0..=1);
        outputs.extend(fresh_names(&mut rng, extra, "x", &taken));
    }
    let wanted = rng.gen_range(0..=p.max_internals);
    let internals = fresh_names(&mut rng, wanted, "v", &taken);
    let mode = match regime {
        Regime::LtsCompatible => Mode::Lts,
        _ => Mode::Io,
    };
    body(&mut rng, p, mode, &inputs, &outputs, &internals)
}

fn alphabet(rng: &mut ChaCha8Rng, p: &GenParams) -> (Vec<String>, Vec<String>, Vec<String>) {
    let named = |prefix: &str, count: usize| -> Vec<String> {
        (0..count).map(|k| format!("{prefix}{k}")).collect()
    };
    let ni = rng.gen_range(0..=p.max_inputs);
    let no = rng.gen_range(0..=p.max_outputs);
    let nh = rng.gen_range(0..=p.max_internals);
    (named("i", ni), named("o", no), named("h", nh))
}

/// Fresh names `<prefix>0, <prefix>1, …` skipping anything in `taken`.
/// The RNG is unused today but threaded through so the draw order stays
/// stable if naming ever becomes randomised.
fn fresh_names(
    _rng: &mut ChaCha8Rng,
    count: usize,
    prefix: &str,
    taken: &BTreeSet<String>,
) -> Vec<String> {
    let mut names = Vec::new();
    let mut k = 0usize;
    while names.len() < count {
        let candidate = format!("{prefix}{k}");
        if !taken.contains(&candidate) {
            names.push(candidate);
        }
        k += 1;
    }
    names
}

/// Draws the state graph: a state count, one transition coin per
/// (state, action) pair, an occasional second target for nondeterminism,
/// self-loop completion of input-enabling (I/O mode), and the task
/// partition (I/O mode).
fn body(
    rng: &mut ChaCha8Rng,
    p: &GenParams,
    mode: Mode,
    inputs: &[String],
    outputs: &[String],
    internals: &[String],
) -> Automaton {
    let n = rng.gen_range(1..=p.max_states.max(1));
    let states: Vec<String> = (0..n).map(|s| format!("s{s}")).collect();
    let mut transitions: Vec<(String, String, String, f64)> = Vec::new();
    let mut edges: BTreeSet<(usize, String, usize)> = BTreeSet::new();

    let all_actions: Vec<(&String, bool)> = inputs
        .iter()
        .map(|a| (a, false))
        .chain(outputs.iter().map(|a| (a, false)))
        .chain(internals.iter().map(|a| (a, true)))
        .collect();

    for s in 0..n {
        for &(action, is_internal) in &all_actions {
            if rng.gen::<f64>() >= p.density {
                continue;
            }
            // Strong convergence restricts internal moves to strictly
            // higher-numbered states, which rules out internal cycles.
            let convergent = is_internal && p.ensure == Ensure::StronglyConvergent;
            if convergent && s + 1 >= n {
                continue;
            }
            let lo = if convergent { s + 1 } else { 0 };
            let mut targets = 1usize;
            if rng.gen::<f64>() < 0.25 {
                targets += 1;
            }
            for _ in 0..targets {
                let to = rng.gen_range(lo..n);
                if edges.insert((s, action.clone(), to)) {
                    transitions.push((
                        states[s].clone(),
                        action.clone(),
                        states[to].clone(),
                        0.0,
                    ));
                }
            }
        }
    }

    if mode == Mode::Io {
        for s in 0..n {
            for input in inputs {
                let enabled = edges.iter().any(|(from, a, _)| *from == s && a == input);
                if !enabled {
                    transitions.push((states[s].clone(), input.clone(), states[s].clone(), 0.0));
                }
            }
        }
    }

    let tasks = if mode == Mode::Io {
        partition(rng, p.task_shape, outputs, internals)
    } else {
        Vec::new()
    };

    let spec = AutomatonSpec {
        mode: Some(mode),
        inputs: inputs.to_vec(),
        outputs: outputs.to_vec(),
        internals: internals.to_vec(),
        states,
        starts: vec!["s0".to_string()],
        tasks,
        transitions,
    };
    spec.validate().expect("generated description must validate")
}

/// Splits the local actions into a task partition. Singleton tasks are
/// named after their action; random blocks get counter names.
fn partition(
    rng: &mut ChaCha8Rng,
    shape: TaskShape,
    outputs: &[String],
    internals: &[String],
) -> Vec<(String, Vec<String>)> {
    let locals: Vec<&String> = outputs.iter().chain(internals.iter()).collect();
    match shape {
        TaskShape::Singleton => locals
            .iter()
            .map(|a| (format!("t_{a}"), vec![(*a).clone()]))
            .collect(),
        TaskShape::Random => {
            let mut blocks: Vec<Vec<String>> = Vec::new();
            for a in locals {
                if blocks.is_empty() || rng.gen::<f64>() < 0.5 {
                    blocks.push(vec![a.clone()]);
                } else {
                    let k = rng.gen_range(0..blocks.len());
                    blocks[k].push(a.clone());
                }
            }
            blocks
                .into_iter()
                .enumerate()
                .map(|(k, actions)| (format!("k{k}"), actions))
                .collect()
        }
    }
}
