//! JSON file format.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Pa, StateId};
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pomset::Letter;
use crate::syntax;

/// The on-disk shape of an automaton, before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaFile {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub accepting: Vec<String>,
    #[serde(default)]
    pub delta: Vec<DeltaEntry>,
    #[serde(default)]
    pub gamma: Vec<GammaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub from: String,
    pub label: String,
    pub to: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntry {
    pub from: String,
    pub fork: Vec<(String, u64)>,
    pub to: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Every way in which `file` fails to describe a well-formed automaton.
pub fn validate(file: &PaFile) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |path: String, message: String| out.push(Diagnostic { path, message });

    let mut letters = HashSet::new();
    for (i, a) in file.alphabet.iter().enumerate() {
        if !syntax::is_letter(a) {
            diag(format!("alphabet[{i}]"), format!("`{a}` is not a valid letter"));
        } else if !letters.insert(a.as_str()) {
            diag(format!("alphabet[{i}]"), format!("duplicate letter `{a}`"));
        }
    }

    let mut states = HashSet::new();
    for (i, s) in file.states.iter().enumerate() {
        if s.is_empty() {
            diag(format!("states[{i}]"), "state names must be non-empty".into());
        } else if !states.insert(s.as_str()) {
            diag(format!("states[{i}]"), format!("duplicate state `{s}`"));
        }
    }

    let check_state = |path: String, s: &str, diag: &mut dyn FnMut(String, String)| {
        if !states.contains(s) {
            diag(path, format!("unknown state `{s}`"));
        }
    };

    for (i, s) in file.accepting.iter().enumerate() {
        check_state(format!("accepting[{i}]"), s, &mut diag);
    }

    let mut delta_keys = HashSet::new();
    for (i, d) in file.delta.iter().enumerate() {
        check_state(format!("delta[{i}].from"), &d.from, &mut diag);
        if !letters.contains(d.label.as_str()) {
            diag(format!("delta[{i}].label"), format!("`{}` is not in the alphabet", d.label));
        }
        if d.to.is_empty() {
            diag(format!("delta[{i}].to"), "target list must be non-empty".into());
        }
        for (j, t) in d.to.iter().enumerate() {
            check_state(format!("delta[{i}].to[{j}]"), t, &mut diag);
        }
        if !delta_keys.insert((d.from.as_str(), d.label.as_str())) {
            diag(
                format!("delta[{i}]"),
                format!("duplicate entry for (`{}`, `{}`)", d.from, d.label),
            );
        }
    }

    let mut gamma_keys = HashSet::new();
    for (i, g) in file.gamma.iter().enumerate() {
        check_state(format!("gamma[{i}].from"), &g.from, &mut diag);
        let mut members = BTreeMap::new();
        for (j, (s, n)) in g.fork.iter().enumerate() {
            check_state(format!("gamma[{i}].fork[{j}]"), s, &mut diag);
            if *n == 0 {
                diag(format!("gamma[{i}].fork[{j}]"), "multiplicity must be positive".into());
            }
            if members.insert(s.as_str(), *n).is_some() {
                diag(format!("gamma[{i}].fork[{j}]"), format!("state `{s}` listed twice"));
            }
        }
        if g.to.is_empty() {
            diag(format!("gamma[{i}].to"), "target list must be non-empty".into());
        }
        for (j, t) in g.to.iter().enumerate() {
            check_state(format!("gamma[{i}].to[{j}]"), t, &mut diag);
        }
        if !gamma_keys.insert((g.from.as_str(), members)) {
            diag(format!("gamma[{i}]"), format!("duplicate fork entry for `{}`", g.from));
        }
    }
    out
}

impl Pa {
    /// Builds an automaton from a file description, rejecting it if
    /// [`validate`] reports anything.
    pub fn from_file(file: &PaFile) -> Result<Pa> {
        let diags = validate(file);
        if let Some(d) = diags.iter().find(|d| d.message.starts_with("duplicate state")) {
            let name = file.states[path_index(&d.path)].clone();
            return Err(Error::DuplicateState(name));
        }
        if !diags.is_empty() {
            let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
            return Err(Error::Schema(lines.join("; ")));
        }
        let mut pa = Pa::new(file.alphabet.iter().map(|a| Letter::new(a).expect("validated")));
        for s in &file.states {
            pa.add_state(s)?;
        }
        for s in &file.accepting {
            let q = pa.lookup(s)?;
            pa.set_accepting(q, true);
        }
        for d in &file.delta {
            let q = pa.lookup(&d.from)?;
            let a = Letter::new(&d.label)?;
            for t in &d.to {
                let r = pa.lookup(t)?;
                pa.add_delta(q, a.clone(), r);
            }
        }
        for g in &file.gamma {
            let q = pa.lookup(&g.from)?;
            let mut fork = Multiset::new();
            for (s, n) in &g.fork {
                fork.insert_n(pa.lookup(s)?, *n as usize);
            }
            for t in &g.to {
                let r = pa.lookup(t)?;
                pa.add_gamma(q, fork.clone(), r);
            }
        }
        Ok(pa)
    }

    /// The canonical file description: every list sorted by name.
    pub fn to_file(&self) -> PaFile {
        let sorted = |qs: &BTreeSet<StateId>| self.names_of(qs);
        let mut delta = Vec::new();
        let mut gamma = Vec::new();
        for q in self.states() {
            for (a, rs) in self.deltas(q) {
                delta.push(DeltaEntry {
                    from: self.name(q).to_string(),
                    label: a.to_string(),
                    to: sorted(rs),
                });
            }
            for (fork, rs) in self.forks(q) {
                let mut pairs: Vec<(String, u64)> = fork
                    .entries()
                    .iter()
                    .map(|(s, n)| (self.name(*s).to_string(), *n as u64))
                    .collect();
                pairs.sort();
                gamma.push(GammaEntry {
                    from: self.name(q).to_string(),
                    fork: pairs,
                    to: sorted(rs),
                });
            }
        }
        delta.sort_by(|x, y| (&x.from, &x.label).cmp(&(&y.from, &y.label)));
        gamma.sort_by(|x, y| (&x.from, &x.fork).cmp(&(&y.from, &y.fork)));
        let mut states: Vec<String> = self.names.clone();
        states.sort();
        PaFile {
            alphabet: self.alphabet.iter().map(ToString::to_string).collect(),
            states,
            accepting: self.names_of(&self.accepting_states().collect::<BTreeSet<_>>()),
            delta,
            gamma,
        }
    }

    pub fn from_json(text: &str) -> Result<Pa> {
        let file: PaFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Pa::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Pa> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Pa::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// Equality of canonical file descriptions.
    pub fn same_as(&self, other: &Pa) -> bool {
        self.to_file() == other.to_file()
    }

    /// Renames states; names absent from `rename` are kept.
    pub(crate) fn renamed(&self, rename: &HashMap<StateId, String>) -> Result<Pa> {
        let mut out = self.clone();
        out.by_name.clear();
        for q in self.states() {
            if let Some(n) = rename.get(&q) {
                out.names[q.index()] = n.clone();
            }
            if out.by_name.insert(out.names[q.index()].clone(), q).is_some() {
                return Err(Error::DuplicateState(out.names[q.index()].clone()));
            }
        }
        Ok(out)
    }
}

fn path_index(path: &str) -> usize {
    path.trim_start_matches(|c: char| !c.is_ascii_digit())
        .trim_end_matches(']')
        .parse()
        .unwrap_or(0)
}
