//! Line-oriented textual format for automata.
//!
//! ```text
//! # a comment
//! automaton NAME
//!   kind io
//!   inputs a b
//!   outputs c w
//!   internals t
//!   states s0 s1
//!   start s0
//!   task k = c t
//!   trans s0 a s1
//!   trans s0 c s1 reward 1
//! end
//! ```
//!
//! A document is a sequence of such blocks. `#` starts a comment anywhere
//! on a line. `kind` defaults to `io`. Rewards are only meaningful on
//! tests used for reward comparison; they default to 0.

use crate::model::{ActionClass, Automaton, AutomatonSpec, Mode};
use std::collections::BTreeMap;
use thiserror::Error;

/// A parse failure, pointing at the offending line (1-based).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Parses a document into named raw descriptions, in source order.
/// Actions must be declared before the transitions that use them, so
/// the offending line can be named; validation beyond that is left to
/// [`AutomatonSpec::validate`].
pub fn parse_dsl(text: &str) -> Result<Vec<(String, AutomatonSpec)>, ParseError> {
    let mut blocks: Vec<(String, AutomatonSpec)> = Vec::new();
    let mut current: Option<(String, AutomatonSpec, bool)> = None; // (name, spec, kind seen)

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "automaton" => {
                if current.is_some() {
                    return Err(err(line_no, "automaton block is not closed by `end`"));
                }
                if tokens.len() != 2 {
                    return Err(err(line_no, "expected `automaton NAME`"));
                }
                let name = tokens[1].to_string();
                if blocks.iter().any(|(n, _)| *n == name) {
                    return Err(err(line_no, format!("duplicate automaton name {name}")));
                }
                current = Some((name, AutomatonSpec::default(), false));
            }
            "end" => {
                let Some((name, spec, _)) = current.take() else {
                    return Err(err(line_no, "`end` outside an automaton block"));
                };
                blocks.push((name, spec));
            }
            keyword => {
                let Some((_, spec, kind_seen)) = current.as_mut() else {
                    return Err(err(line_no, format!("`{keyword}` outside an automaton block")));
                };
                match keyword {
                    "kind" => {
                        if *kind_seen {
                            return Err(err(line_no, "duplicate `kind` line"));
                        }
                        *kind_seen = true;
                        match tokens.get(1) {
                            Some(&"io") => spec.mode = Some(Mode::Io),
                            Some(&"lts") => spec.mode = Some(Mode::Lts),
                            _ => return Err(err(line_no, "expected `kind io` or `kind lts`")),
                        }
                        if tokens.len() != 2 {
                            return Err(err(line_no, "expected `kind io` or `kind lts`"));
                        }
                    }
                    "inputs" => spec.inputs.extend(names(&tokens[1..])),
                    "outputs" => spec.outputs.extend(names(&tokens[1..])),
                    "internals" => spec.internals.extend(names(&tokens[1..])),
                    "states" => spec.states.extend(names(&tokens[1..])),
                    "start" => {
                        if tokens.len() < 2 {
                            return Err(err(line_no, "expected `start STATE...`"));
                        }
                        spec.starts.extend(names(&tokens[1..]));
                    }
                    "task" => {
                        if tokens.len() < 3 || tokens[2] != "=" {
                            return Err(err(line_no, "expected `task NAME = ACTION...`"));
                        }
                        let task_name = tokens[1].to_string();
                        if spec.tasks.iter().any(|(n, _)| *n == task_name) {
                            return Err(err(line_no, format!("duplicate task name {task_name}")));
                        }
                        spec.tasks.push((task_name, names(&tokens[3..])));
                    }
                    "trans" => {
                        let reward = match tokens.len() {
                            4 => 0.0,
                            6 if tokens[4] == "reward" => {
                                tokens[5].parse::<f64>().map_err(|_| {
                                    err(line_no, format!("bad reward literal {}", tokens[5]))
                                })?
                            }
                            _ => {
                                return Err(err(
                                    line_no,
                                    "expected `trans FROM ACTION TO [reward R]`",
                                ))
                            }
                        };
                        let action = tokens[2];
                        if !spec.inputs.iter().any(|a| a == action)
                            && !spec.outputs.iter().any(|a| a == action)
                            && !spec.internals.iter().any(|a| a == action)
                        {
                            return Err(err(line_no, format!("undeclared action {action}")));
                        }
                        spec.transitions.push((
                            tokens[1].to_string(),
                            tokens[2].to_string(),
                            tokens[3].to_string(),
                            reward,
                        ));
                    }
                    other => {
                        return Err(err(line_no, format!("unknown keyword `{other}`")));
                    }
                }
            }
        }
    }
    if current.is_some() {
        return Err(err(text.lines().count(), "automaton block is not closed by `end`"));
    }
    Ok(blocks)
}

/// Parses a document that must contain exactly one automaton and
/// validates it.
pub fn parse_single(text: &str) -> Result<(String, Automaton), String> {
    let blocks = parse_dsl(text).map_err(|e| e.to_string())?;
    match blocks.as_slice() {
        [(name, spec)] => {
            let auto = spec.validate().map_err(|e| e.to_string())?;
            Ok((name.clone(), auto))
        }
        [] => Err("document contains no automaton".into()),
        many => Err(format!(
            "document contains {} automata; expected exactly one",
            many.len()
        )),
    }
}

fn names(tokens: &[&str]) -> Vec<String> {
    tokens.iter().map(|t| t.to_string()).collect()
}

/// Emits an automaton block in canonical form. State ids containing `.`
/// (composed automata) are rewritten with `_` so the output re-parses;
/// the rewriting is made injective by suffixing on collision.
pub fn emit_dsl(name: &str, automaton: &Automaton) -> String {
    let rename = state_renaming(automaton);
    let mut out = String::new();
    out.push_str(&format!("automaton {name}\n"));
    out.push_str(&format!("  kind {}\n", automaton.mode()));
    for (label, class) in [
        ("inputs", ActionClass::Input),
        ("outputs", ActionClass::Output),
        ("internals", ActionClass::Internal),
    ] {
        let names = automaton.class_names(class);
        if !names.is_empty() {
            out.push_str(&format!(
                "  {label} {}\n",
                names.into_iter().collect::<Vec<_>>().join(" ")
            ));
        }
    }
    if !automaton.states().is_empty() {
        out.push_str(&format!(
            "  states {}\n",
            automaton
                .states()
                .iter()
                .map(|s| rename[s.as_str()].clone())
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    if !automaton.starts().is_empty() {
        out.push_str(&format!(
            "  start {}\n",
            automaton
                .starts()
                .iter()
                .map(|&s| rename[automaton.state_name(s)].clone())
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    for task in automaton.tasks() {
        out.push_str(&format!(
            "  task {} = {}\n",
            task.name,
            task.actions
                .iter()
                .map(|&a| automaton.action_name(a).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    for (i, t) in automaton.transitions().iter().enumerate() {
        let reward = automaton.reward(i);
        let suffix = if reward != 0.0 {
            format!(" reward {reward}")
        } else {
            String::new()
        };
        out.push_str(&format!(
            "  trans {} {} {}{suffix}\n",
            rename[automaton.state_name(t.from)],
            automaton.action_name(t.action),
            rename[automaton.state_name(t.to)],
        ));
    }
    out.push_str("end\n");
    out
}

fn state_renaming(automaton: &Automaton) -> BTreeMap<&str, String> {
    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let mut rename = BTreeMap::new();
    for state in automaton.states() {
        let base = state.replace('.', "_");
        let entry = used.entry(base.clone()).or_insert(0);
        *entry += 1;
        let fresh = if *entry == 1 {
            base
        } else {
            format!("{base}_{entry}")
        };
        rename.insert(state.as_str(), fresh);
    }
    rename
}
