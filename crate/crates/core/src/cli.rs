//! The `pomset` command-line front end.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::equiv::{pa_atoms, AtomReport};
use crate::error::{Error, Result};
use crate::kleene::{compile, expr_equiv, extract};
use crate::oracle::{oracle_equiv, Bound};
use crate::pa::{check_structure, support_analysis, Pa, Runner};
use crate::pomset::SpTerm;
use crate::srexpr::{lang_up_to, Expr};
use crate::wellstruct::well_structure;

/// Process exit status: 0 for success or a positive answer, 1 for a
/// negative answer, 2 for usage and input errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExitStatus(pub i32);

impl ExitStatus {
    pub const TRUE: ExitStatus = ExitStatus(0);
    pub const FALSE: ExitStatus = ExitStatus(1);
    pub const ERROR: ExitStatus = ExitStatus(2);

    fn from_bool(b: bool) -> ExitStatus {
        if b {
            ExitStatus::TRUE
        } else {
            ExitStatus::FALSE
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "pomset",
    version,
    about = "Decide equivalence of series-rational expressions and work with pomset automata"
)]
struct Cli {
    /// Print one JSON object instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether two expressions denote the same pomset language.
    Equiv {
        e1: String,
        e2: String,
        /// Cross-check against brute-force enumeration up to N events.
        #[arg(long, value_name = "N")]
        oracle: Option<usize>,
    },
    /// Test whether a pomset belongs to a language.
    #[command(group(ArgGroup::new("source").required(true).args(["expr", "pa"])))]
    Member {
        #[arg(long, value_name = "E")]
        expr: Option<String>,
        #[arg(long, value_name = "FILE", requires = "state")]
        pa: Option<PathBuf>,
        #[arg(long, value_name = "Q", requires = "pa")]
        state: Option<String>,
        pomset: String,
    },
    /// Compile an expression to an automaton file.
    Compile {
        expr: String,
        #[arg(short = 'o', value_name = "FILE")]
        output: PathBuf,
    },
    /// Print an expression for the language of a state.
    Extract {
        file: PathBuf,
        #[arg(long, value_name = "Q")]
        state: String,
    },
    /// List the atoms of a well-structured automaton.
    Atoms { file: PathBuf },
    /// Rewrite an automaton into a well-structured one.
    Normalize {
        file: PathBuf,
        #[arg(short = 'o', value_name = "FILE")]
        output: PathBuf,
        /// States whose languages must be preserved (default: all).
        #[arg(long, value_name = "Q,...", value_delimiter = ',')]
        track: Vec<String>,
    },
    /// Report structural properties of an automaton.
    Check { file: PathBuf },
    /// List the pomsets of an expression with at most N events.
    Lang {
        expr: String,
        #[arg(long, value_name = "N")]
        max_size: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    details: Value,
}

struct Outcome {
    report: Report,
    text: Vec<String>,
    status: ExitStatus,
    warning: Option<String>,
}

/// Parses `argv` (including the program name), runs the command, and
/// writes its output.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    ExitStatus::TRUE
                }
                _ => {
                    let _ = write!(err, "{e}");
                    ExitStatus::ERROR
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            if let Some(w) = &outcome.warning {
                let _ = writeln!(err, "warning: {w}");
            }
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string(&outcome.report).expect("serializable"));
            } else {
                for line in &outcome.text {
                    let _ = writeln!(out, "{line}");
                }
            }
            outcome.status
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({ "error": e.to_string() }));
            }
            let _ = writeln!(err, "error: {e}");
            ExitStatus::ERROR
        }
    }
}

fn outcome(command: &'static str, inputs: Value, result: Value, details: Value, text: Vec<String>, status: ExitStatus) -> Outcome {
    Outcome {
        report: Report { command, inputs, result, details },
        text,
        status,
        warning: None,
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Equiv { e1, e2, oracle } => {
            let e = Expr::parse(&e1)?;
            let f = Expr::parse(&e2)?;
            let same = expr_equiv(&e, &f)?;
            let mut text = vec![if same { "equivalent" } else { "not equivalent" }.to_string()];
            let mut details = json!({});
            let mut status = ExitStatus::from_bool(same);
            let mut warning = None;
            if let Some(n) = oracle {
                let n = Bound::new(n)?.max_events();
                let agrees = oracle_equiv(&e, &f, n);
                details = json!({ "oracle_bound": n, "oracle_equivalent": agrees });
                if let Some(w) = witness(&e, &f, n) {
                    details["witness"] = json!(w.to_string());
                    text.push(format!("witness: {w}"));
                }
                if same && !agrees {
                    warning = Some(format!(
                        "the decision procedure says equivalent, but the languages differ within {n} events"
                    ));
                    status = ExitStatus::ERROR;
                } else if !same && agrees {
                    text.push(format!("no difference within {n} events"));
                }
            }
            let mut o = outcome("equiv", json!({ "e1": e1, "e2": e2 }), json!(same), details, text, status);
            o.warning = warning;
            Ok(o)
        }
        Command::Member { expr, pa, state, pomset } => {
            let u = SpTerm::parse(&pomset)?;
            let (member, inputs) = match (expr, pa, state) {
                (Some(src), _, _) => {
                    let e = Expr::parse(&src)?;
                    let (pa, roots) = compile(std::slice::from_ref(&e));
                    let member = Runner::new(&pa)?.accepts(roots[&e], &u);
                    (member, json!({ "expr": src, "pomset": pomset }))
                }
                (None, Some(file), Some(state)) => {
                    let pa = Pa::load(&file)?;
                    let q = pa.lookup(&state)?;
                    let member = Runner::new(&pa)?.accepts(q, &u);
                    (member, json!({ "pa": file.display().to_string(), "state": state, "pomset": pomset }))
                }
                _ => return Err(Error::Precondition("give --expr, or --pa with --state".into())),
            };
            let text = vec![if member { "member" } else { "not member" }.to_string()];
            Ok(outcome("member", inputs, json!(member), json!({ "pomset": u.to_string() }), text, ExitStatus::from_bool(member)))
        }
        Command::Compile { expr, output } => {
            let e = Expr::parse(&expr)?;
            let (pa, roots) = compile(std::slice::from_ref(&e));
            pa.save(&output)?;
            let root = pa.name(roots[&e]).to_string();
            let text = vec![format!("wrote {} states to {}; root state: {root}", pa.num_states(), output.display())];
            Ok(outcome(
                "compile",
                json!({ "expr": expr, "output": output.display().to_string() }),
                json!(root),
                json!({ "states": pa.num_states() }),
                text,
                ExitStatus::TRUE,
            ))
        }
        Command::Extract { file, state } => {
            let pa = Pa::load(&file)?;
            let e = extract(&pa, pa.lookup(&state)?)?;
            Ok(outcome(
                "extract",
                json!({ "file": file.display().to_string(), "state": state }),
                json!(e.to_string()),
                json!({}),
                vec![e.to_string()],
                ExitStatus::TRUE,
            ))
        }
        Command::Atoms { file } => {
            let pa = Pa::load(&file)?;
            if !check_structure(&pa).well_structured {
                return Err(Error::Precondition(
                    "atoms are only defined for well-structured automata; run `normalize` first".into(),
                ));
            }
            let atoms = pa_atoms(&pa)?;
            let report = AtomReport { pa: &pa, atoms: &atoms };
            let lines = report.lines();
            let result: Vec<Value> = lines
                .iter()
                .map(|(names, fork_target)| json!({ "states": names, "fork_target": fork_target }))
                .collect();
            let text = report.to_string().lines().map(str::to_string).collect();
            Ok(outcome(
                "atoms",
                json!({ "file": file.display().to_string() }),
                json!(result),
                json!({ "count": lines.len() }),
                text,
                ExitStatus::TRUE,
            ))
        }
        Command::Normalize { file, output, track } => {
            let pa = Pa::load(&file)?;
            let tracked: BTreeSet<_> = if track.is_empty() {
                pa.states().collect()
            } else {
                track.iter().map(|n| pa.lookup(n)).collect::<Result<_>>()?
            };
            let (ws, _) = well_structure(&pa, &tracked)?;
            ws.save(&output)?;
            let names = pa.names_of(&tracked);
            let text = vec![format!("wrote {} states to {}", ws.num_states(), output.display())];
            Ok(outcome(
                "normalize",
                json!({ "file": file.display().to_string(), "output": output.display().to_string(), "track": names }),
                json!(true),
                json!({ "states": ws.num_states() }),
                text,
                ExitStatus::TRUE,
            ))
        }
        Command::Check { file } => {
            let pa = Pa::load(&file)?;
            let sa = support_analysis(&pa);
            let cycle = pa.fork_cycle_witness();
            let report = check_structure(&pa);
            let mut text = vec![
                format!("states: {}", pa.num_states()),
                format!("fork_acyclic: {}", cycle.is_none()),
            ];
            if let Some(c) = &cycle {
                let names: Vec<&str> = c.iter().map(|q| pa.name(*q)).collect();
                text.push(format!("fork_cycle: {}", names.join(" -> ")));
            }
            text.push(format!("depth: {}", sa.depth()));
            text.push(format!(
                "n_forking_min: {}",
                report.n_forking_min.map_or("none".to_string(), |n| n.to_string())
            ));
            text.push(format!("parsimonious: {}", report.parsimonious));
            text.push(format!("flat_branching: {}", report.flat_branching));
            text.push(format!("well_structured: {}", report.well_structured));
            let details = json!({
                "states": pa.num_states(),
                "fork_acyclic": cycle.is_none(),
                "fork_cycle": cycle.map(|c| c.iter().map(|q| pa.name(*q).to_string()).collect::<Vec<_>>()),
                "depth": sa.depth(),
            });
            Ok(outcome(
                "check",
                json!({ "file": file.display().to_string() }),
                serde_json::to_value(&report).expect("serializable"),
                details,
                text,
                ExitStatus::TRUE,
            ))
        }
        Command::Lang { expr, max_size } => {
            let n = Bound::new(max_size)?.max_events();
            let e = Expr::parse(&expr)?;
            let lang: Vec<String> = lang_up_to(&e, n).iter().map(ToString::to_string).collect();
            Ok(outcome(
                "lang",
                json!({ "expr": expr, "max_size": n }),
                json!(lang),
                json!({ "count": lang.len() }),
                lang.clone(),
                ExitStatus::TRUE,
            ))
        }
    }
}

/// A smallest pomset of at most `n` events in exactly one of the languages.
fn witness(e: &Expr, f: &Expr, n: usize) -> Option<SpTerm> {
    let l = lang_up_to(e, n);
    let r = lang_up_to(f, n);
    l.symmetric_difference(&r).min_by_key(|u| (u.size(), (*u).clone())).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (ExitStatus, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["pomset"];
        argv.extend_from_slice(args);
        let status = run(argv, &mut out, &mut err);
        (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn equiv_exit_codes() {
        assert_eq!(run_str(&["equiv", "a || b", "b || a"]).0, ExitStatus::TRUE);
        assert_eq!(run_str(&["equiv", "a || b", "a . b"]).0, ExitStatus::FALSE);
        assert_eq!(run_str(&["equiv", "a +", "b"]).0, ExitStatus::ERROR);
        assert_eq!(run_str(&["frobnicate"]).0, ExitStatus::ERROR);
    }

    #[test]
    fn json_key_order_is_stable() {
        let (_, out, _) = run_str(&["--json", "lang", "a*", "--max-size", "2"]);
        assert_eq!(
            out.trim(),
            r#"{"command":"lang","inputs":{"expr":"a*","max_size":2},"result":["1","a","a . a"],"details":{"count":3}}"#
        );
    }

    #[test]
    fn oracle_witness_is_reported() {
        let (status, out, _) = run_str(&["equiv", "a*", "a . a*", "--oracle", "3"]);
        assert_eq!(status, ExitStatus::FALSE);
        assert!(out.contains("witness: 1"), "{out}");
    }

    #[test]
    fn member_requires_a_source() {
        assert_eq!(run_str(&["member", "a"]).0, ExitStatus::ERROR);
        assert_eq!(run_str(&["member", "--expr", "a . (b || c)", "a . (c || b)"]).0, ExitStatus::TRUE);
        assert_eq!(run_str(&["member", "--expr", "a . b", "b . a"]).0, ExitStatus::FALSE);
    }
}
