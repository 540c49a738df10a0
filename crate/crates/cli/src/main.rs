//! Command-line front end for the automata library: validate and
//! compose text-format files, run testing verdicts, decide refinement
//! preorders, synthesize distinguishing tests, and drive the named
//! randomized cross-validation suites.
//!
//! Automaton arguments are file paths, except for built-in fixture
//! names (`FIG1_A`, `SEC6_B`, ...), which resolve without touching the
//! filesystem. Exit codes: 0 when the queried property holds or every
//! item passes, 1 when it fails or the automata are distinguished, 2 on
//! usage or input errors — including a test that is inadmissible under
//! the requested regime, in which case the diagnostics name the
//! violated clause.

use clap::{Args, Parser, Subcommand, ValueEnum};
use iofair::algebra::{self, Regime};
use iofair::analysis::InclusionMode;
use iofair::dsl;
use iofair::harness::{fixtures, run_suite, GenParams};
use iofair::model::{Automaton, ExecutionWitness, Mode, Word};
use iofair::preorders::{self, PreorderReport};
use iofair::verdicts::{self, Verdict};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs};

/// Schema tag stamped on every JSON report.
const SCHEMA: &str = "iofair-report/1";

/// Environment variable overriding the default lasso search bound.
const LASSO_BOUND_VAR: &str = "IOFAIR_LASSO_BOUND";

/// Testing verdicts, refinement preorders and witness synthesis for
/// I/O automata with task-based weak fairness.
#[derive(Parser)]
#[command(
    name = "iofair",
    version,
    after_help = "Automaton arguments accept built-in fixture names in place of file \
                  paths: FIG1_A, FIG1_B, FIG1_T, FIG1_T_IO, SEC6_A, SEC6_B, SEC6_TEST.\n\
                  IOFAIR_LASSO_BOUND sets the lasso search bound when --lasso-bound is absent."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse automaton files and check the well-formedness rules
    Validate {
        /// Files to validate, each holding one or more automaton blocks
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Compose automata and emit the product in the text format
    Compose {
        /// Automata to compose, in order (components are numbered from 1)
        #[arg(required = true)]
        files: Vec<String>,
        /// Write the product here instead of stdout
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run one testing verdict for a system against a test
    Check(CheckArgs),
    /// Decide a refinement preorder: does B refine A?
    Preorder(PreorderArgs),
    /// Synthesize a test distinguishing two automata, or report none
    Witness(WitnessArgs),
    /// Run a named randomized cross-validation suite
    Harness(HarnessArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Verdict to decide
    verdict: VerdictKind,
    /// The system under test
    #[arg(long)]
    system: String,
    /// The test automaton
    #[arg(long)]
    test: String,
    /// Admissibility regime for the pair; defaults per verdict
    /// (may/surv/should: lts, must-pr: complementary,
    /// must-f/must-f-ab: strongly-compatible)
    #[arg(long)]
    regime: Option<Regime>,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PreorderArgs {
    /// Relation to decide
    relation: RelationKind,
    /// Left automaton (the refined one)
    a: String,
    /// Right automaton (the refining one)
    b: String,
    /// Lasso search bound for the fair-trace relations
    #[arg(long, value_name = "N")]
    lasso_bound: Option<usize>,
    /// Decision mode for infinite behaviour (fair and must-f only)
    #[arg(long, default_value = "exact")]
    mode: InclusionMode,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct WitnessArgs {
    /// Preorder whose failure the test should witness
    relation: WitnessKind,
    /// Left automaton (the one the test should accept)
    a: String,
    /// Right automaton (the one the test should reject)
    b: String,
    /// Lasso search bound for fair-must
    #[arg(long, value_name = "N")]
    lasso_bound: Option<usize>,
    /// Decision mode for infinite behaviour (fair-must only)
    #[arg(long, default_value = "exact")]
    mode: InclusionMode,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HarnessArgs {
    /// Suite name: thm5_1, thm6_4, thm8_1, thm9_3, eq_1_2, projections,
    /// fair_completion, fig1, sec6
    suite: String,
    /// Random trials to run (the fixture suites ignore this)
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Base seed for the trial stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the result as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerdictKind {
    May,
    Surv,
    Should,
    MustPr,
    MustF,
    MustFAb,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationKind {
    Trace,
    Quiescent,
    Fair,
    May,
    MustF,
    RewardF,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    May,
    FairMust,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Validate { files } => cmd_validate(&files),
        Command::Compose { files, out } => cmd_compose(&files, out),
        Command::Check(args) => cmd_check(args),
        Command::Preorder(args) => cmd_preorder(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Harness(args) => cmd_harness(args),
    }
}

/// Resolves a positional automaton argument: a fixture name, or a path
/// to a file holding exactly one automaton block.
fn resolve(arg: &str) -> Result<(String, Automaton), String> {
    for (name, auto) in fixtures::all() {
        if name == arg {
            return Ok((name.to_string(), auto));
        }
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    let (name, auto) = dsl::parse_single(&text).map_err(|e| format!("{arg}: {e}"))?;
    Ok((name, auto))
}

/// The lasso bound: the flag when given, else the environment override,
/// else the library default.
fn effective_bound(flag: Option<usize>) -> Result<Option<usize>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env::var(LASSO_BOUND_VAR) {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{LASSO_BOUND_VAR} is not a number: {raw}")),
        Err(env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{LASSO_BOUND_VAR}: {e}")),
    }
}

fn print_json(report: &Value) {
    println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
}

// ---------------------------------------------------------------------
// validate / compose
// ---------------------------------------------------------------------

fn cmd_validate(files: &[String]) -> Result<u8, String> {
    let mut all_ok = true;
    for file in files {
        let text = fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
        match dsl::parse_dsl(&text) {
            Err(e) => {
                all_ok = false;
                println!("{file}: {e}");
            }
            Ok(blocks) if blocks.is_empty() => {
                all_ok = false;
                println!("{file}: no automaton blocks");
            }
            Ok(blocks) => {
                for (name, spec) in blocks {
                    match spec.validate() {
                        Ok(auto) => println!(
                            "{file}: {name} ok ({} kind, {} states, {} transitions)",
                            auto.mode(),
                            auto.states().len(),
                            auto.transitions().len()
                        ),
                        Err(e) => {
                            all_ok = false;
                            println!("{file}: {name} {e}");
                        }
                    }
                }
            }
        }
    }
    Ok(if all_ok { 0 } else { 2 })
}

fn cmd_compose(files: &[String], out: Option<PathBuf>) -> Result<u8, String> {
    if files.len() < 2 {
        return Err("compose needs at least two automata".into());
    }
    let parts: Vec<(String, Automaton)> =
        files.iter().map(|f| resolve(f)).collect::<Result<_, _>>()?;
    let refs: Vec<&Automaton> = parts.iter().map(|(_, a)| a).collect();
    let all_io = refs.iter().all(|a| a.mode() == Mode::Io);
    // Task-preserving composition whenever every component supports it;
    // otherwise the plain product, which drops fairness structure.
    let product = if all_io {
        algebra::compose(&refs)
    } else {
        algebra::compose_plain(&refs)
    }
    .map_err(|e| e.to_string())?;
    let name = parts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join("_");
    let text = dsl::emit_dsl(&name, &product);
    match out {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            println!(
                "wrote {} ({} composition, {} states, {} transitions)",
                path.display(),
                if all_io { "task-preserving" } else { "plain" },
                product.states().len(),
                product.transitions().len()
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------
// check
// ---------------------------------------------------------------------

fn verdict_name(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::May => "may",
        VerdictKind::Surv => "surv",
        VerdictKind::Should => "should",
        VerdictKind::MustPr => "must-pr",
        VerdictKind::MustF => "must-f",
        VerdictKind::MustFAb => "must-f-ab",
    }
}

fn default_regime(kind: VerdictKind) -> Regime {
    match kind {
        VerdictKind::May | VerdictKind::Surv | VerdictKind::Should => Regime::LtsCompatible,
        VerdictKind::MustPr => Regime::Complementary,
        VerdictKind::MustF | VerdictKind::MustFAb => Regime::StronglyCompatible,
    }
}

fn run_verdict(kind: VerdictKind, a: &Automaton, t: &Automaton) -> Result<Verdict, String> {
    match kind {
        VerdictKind::May => verdicts::may(a, t),
        VerdictKind::Surv => verdicts::surv(a, t),
        VerdictKind::Should => verdicts::should(a, t),
        VerdictKind::MustPr => verdicts::must_pr(a, t),
        VerdictKind::MustF => verdicts::must_f(a, t),
        VerdictKind::MustFAb => verdicts::must_f_ab(a, t),
    }
    .map_err(|e| e.to_string())
}

fn cmd_check(args: CheckArgs) -> Result<u8, String> {
    let (system_name, system) = resolve(&args.system)?;
    let (test_name, test) = resolve(&args.test)?;
    let regime = args.regime.unwrap_or_else(|| default_regime(args.verdict));

    let compat = verdicts::admissible_single(&system, &test, regime);
    if !compat.ok {
        if args.json {
            print_json(&json!({
                "schema": SCHEMA,
                "command": "check",
                "verdict": verdict_name(args.verdict),
                "system": system_name,
                "test": test_name,
                "regime": regime.to_string(),
                "admissible": false,
                "violations": compat.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "holds": Value::Null,
                "witness": Value::Null,
            }));
        } else {
            eprintln!("{compat}");
        }
        return Ok(2);
    }

    let verdict = run_verdict(args.verdict, &system, &test)?;
    if args.json {
        let witness = verdict
            .witness
            .as_ref()
            .map(|w| execution_json(&verdict.product, w))
            .unwrap_or(Value::Null);
        print_json(&json!({
            "schema": SCHEMA,
            "command": "check",
            "verdict": verdict_name(args.verdict),
            "system": system_name,
            "test": test_name,
            "regime": regime.to_string(),
            "admissible": true,
            "violations": [],
            "holds": verdict.holds,
            "completeness": "exact",
            "witness": witness,
        }));
    } else {
        println!("regime {regime}: admissible");
        let outcome = if verdict.holds { "holds" } else { "does not hold" };
        println!("{}({system_name}, {test_name}): {outcome}", verdict_name(args.verdict));
        if let Some(w) = &verdict.witness {
            println!("witness: {}", w.render(&verdict.product));
        }
    }
    Ok(if verdict.holds { 0 } else { 1 })
}

// ---------------------------------------------------------------------
// preorder / witness
// ---------------------------------------------------------------------

fn word_json(word: &Word) -> Value {
    match word {
        Word::Finite(t) => json!({ "kind": "finite", "letters": t.0 }),
        Word::Lasso(l) => json!({ "kind": "lasso", "stem": l.stem, "cycle": l.cycle }),
    }
}

fn execution_json(p: &Automaton, witness: &ExecutionWitness) -> Value {
    let states =
        |xs: &[usize]| xs.iter().map(|&s| p.state_name(s).to_string()).collect::<Vec<_>>();
    let actions =
        |xs: &[usize]| xs.iter().map(|&a| p.action_name(a).to_string()).collect::<Vec<_>>();
    match witness {
        ExecutionWitness::Finite(e) => json!({
            "kind": "finite",
            "states": states(e.states()),
            "actions": actions(e.actions()),
        }),
        ExecutionWitness::Lasso(l) => json!({
            "kind": "lasso",
            "stem_states": states(l.stem().states()),
            "stem_actions": actions(l.stem().actions()),
            "loop_states": states(l.loop_states()),
            "loop_actions": actions(l.loop_actions()),
        }),
    }
}

fn preorder_json(report: &PreorderReport, command: &str, left: &str, right: &str) -> Value {
    let counterexample =
        report.counterexample.as_ref().map(word_json).unwrap_or(Value::Null);
    let witness_test = report
        .witness_test
        .as_ref()
        .map(|t| Value::String(dsl::emit_dsl("wt", t)))
        .unwrap_or(Value::Null);
    json!({
        "schema": SCHEMA,
        "command": command,
        "relation": report.relation,
        "left": left,
        "right": right,
        "signatures_match": report.signatures_match,
        "holds": report.holds,
        "counterexample": counterexample,
        "witness_test": witness_test,
        "completeness": report.completeness.to_string(),
        "flags": report.flags,
    })
}

fn print_preorder_text(report: &PreorderReport, left: &str, right: &str) {
    let outcome = if report.holds { "holds" } else { "does not hold" };
    println!("{}({left}, {right}): {outcome} ({})", report.relation, report.completeness);
    if let Some(word) = &report.counterexample {
        println!("counterexample: {word}");
    }
    if report.witness_test.is_some() {
        println!("distinguishing test synthesized; print it with the witness subcommand");
    }
    for flag in &report.flags {
        println!("note: {flag}");
    }
}

fn cmd_preorder(args: PreorderArgs) -> Result<u8, String> {
    let (left, a) = resolve(&args.a)?;
    let (right, b) = resolve(&args.b)?;
    let bound = effective_bound(args.lasso_bound)?;
    let report = match args.relation {
        RelationKind::Trace => preorders::trace_preorder(&a, &b),
        RelationKind::Quiescent => preorders::quiescent_preorder(&a, &b),
        RelationKind::Fair => preorders::fair_preorder(&a, &b, bound, args.mode),
        RelationKind::May => preorders::may_preorder(&a, &b),
        RelationKind::MustF => preorders::must_f_preorder(&a, &b, bound, args.mode),
        RelationKind::RewardF => preorders::reward_f_preorder(&a, &b, bound),
    };
    if args.json {
        print_json(&preorder_json(&report, "preorder", &left, &right));
    } else {
        print_preorder_text(&report, &left, &right);
    }
    Ok(if report.holds { 0 } else { 1 })
}

fn cmd_witness(args: WitnessArgs) -> Result<u8, String> {
    let (left, a) = resolve(&args.a)?;
    let (right, b) = resolve(&args.b)?;
    let bound = effective_bound(args.lasso_bound)?;
    let report = match args.relation {
        WitnessKind::May => preorders::may_preorder(&a, &b),
        WitnessKind::FairMust => preorders::must_f_preorder(&a, &b, bound, args.mode),
    };
    if args.json {
        let mut value = preorder_json(&report, "witness", &left, &right);
        let object = value.as_object_mut().expect("reports are objects");
        object.insert("distinguished".into(), json!(!report.holds));
        print_json(&value);
    } else if report.holds {
        println!("none");
    } else if let Some(test) = &report.witness_test {
        // Nothing but the test itself, so the output re-parses as a
        // document.
        print!("{}", dsl::emit_dsl("wt", test));
    } else {
        eprintln!("distinguished, but no test could be synthesized");
        for flag in &report.flags {
            eprintln!("note: {flag}");
        }
    }
    Ok(if report.holds { 0 } else { 1 })
}

// ---------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------

fn cmd_harness(args: HarnessArgs) -> Result<u8, String> {
    let params = GenParams { seed: args.seed, ..GenParams::default() };
    let result = run_suite(&args.suite, args.trials, &params)?;
    let passed = result.passed();
    if args.json {
        let mut value = serde_json::to_value(&result).expect("suite results serialize");
        let object = value.as_object_mut().expect("suite results are objects");
        object.insert("schema".into(), json!(SCHEMA));
        object.insert("command".into(), json!("harness"));
        object.insert("seed".into(), json!(args.seed));
        object.insert("passed".into(), json!(passed));
        print_json(&value);
    } else {
        println!(
            "suite {}: {} trials, {} failures, {} ms: {}",
            result.suite,
            result.trials,
            result.failures.len(),
            result.runtime_ms,
            if passed { "pass" } else { "FAIL" }
        );
        for failure in &result.failures {
            println!(
                "  seed={} pair=[{}] stage={}",
                failure.seed,
                failure.pair.join(", "),
                failure.stage
            );
        }
    }
    Ok(if passed { 0 } else { 1 })
}
