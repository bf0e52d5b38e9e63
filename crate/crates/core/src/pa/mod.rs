//! Pomset automata: data model, file format, support analysis, runs and
//! structural checks.

mod io;
mod run;
mod structure;
mod support;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pomset::Letter;

pub use io::{validate, DeltaEntry, Diagnostic, GammaEntry, PaFile};
pub use run::{accepts_empty, leadsto, membership, LeadsTo, Runner};
pub use structure::{check_structure, StructureReport};
pub use support::{support_analysis, SupportAnalysis};

/// Index of a state within one automaton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub(crate) u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The multiset of states a parallel transition forks into.
pub type Fork = Multiset<StateId>;

static NO_STATES: BTreeSet<StateId> = BTreeSet::new();

/// A pomset automaton. Every state has a unique name; transitions only
/// mention existing states and every stored fork has a non-empty result.
#[derive(Clone, Default)]
pub struct Pa {
    alphabet: BTreeSet<Letter>,
    names: Vec<String>,
    by_name: HashMap<String, StateId>,
    accepting: Vec<bool>,
    delta: Vec<BTreeMap<Letter, BTreeSet<StateId>>>,
    gamma: Vec<BTreeMap<Fork, BTreeSet<StateId>>>,
}

impl Pa {
    pub fn new(alphabet: impl IntoIterator<Item = Letter>) -> Self {
        Pa {
            alphabet: alphabet.into_iter().collect(),
            ..Pa::default()
        }
    }

    pub fn add_state(&mut self, name: &str) -> Result<StateId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateState(name.to_string()));
        }
        let id = StateId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        self.accepting.push(false);
        self.delta.push(BTreeMap::new());
        self.gamma.push(BTreeMap::new());
        Ok(id)
    }

    /// Adds a state named `base`, or `base` with the shortest `'` suffix
    /// that makes it unique.
    pub fn add_fresh_state(&mut self, base: &str) -> StateId {
        let mut name = base.to_string();
        while self.by_name.contains_key(&name) {
            name.push('\'');
        }
        self.add_state(&name).expect("name is fresh")
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q.index()] = accepting;
    }

    /// Adds `r ∈ δ(q, a)`, extending the alphabet if needed.
    pub fn add_delta(&mut self, q: StateId, a: Letter, r: StateId) {
        self.alphabet.insert(a.clone());
        self.delta[q.index()].entry(a).or_default().insert(r);
    }

    /// Adds `r ∈ γ(q, φ)`.
    pub fn add_gamma(&mut self, q: StateId, fork: Fork, r: StateId) {
        self.gamma[q.index()].entry(fork).or_default().insert(r);
    }

    pub fn alphabet(&self) -> &BTreeSet<Letter> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len() as u32).map(StateId)
    }

    /// States ordered by name.
    pub fn states_by_name(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.states().collect();
        v.sort_by(|x, y| self.name(*x).cmp(self.name(*y)));
        v
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q.index()]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<StateId> {
        self.state(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|q| self.is_accepting(*q))
    }

    pub fn delta(&self, q: StateId, a: &Letter) -> &BTreeSet<StateId> {
        self.delta[q.index()].get(a).unwrap_or(&NO_STATES)
    }

    pub fn deltas(&self, q: StateId) -> &BTreeMap<Letter, BTreeSet<StateId>> {
        &self.delta[q.index()]
    }

    pub fn gamma(&self, q: StateId, fork: &Fork) -> &BTreeSet<StateId> {
        self.gamma[q.index()].get(fork).unwrap_or(&NO_STATES)
    }

    /// Stored forks of `q` with their (non-empty) results.
    pub fn forks(&self, q: StateId) -> &BTreeMap<Fork, BTreeSet<StateId>> {
        &self.gamma[q.index()]
    }

    pub fn num_gamma_entries(&self) -> usize {
        self.gamma.iter().map(BTreeMap::len).sum()
    }

    pub fn num_delta_entries(&self) -> usize {
        self.delta.iter().map(BTreeMap::len).sum()
    }

    /// Immediate support edges out of `q`: sequential successors, fork
    /// results and fork targets.
    pub fn successors(&self, q: StateId) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for rs in self.delta[q.index()].values() {
            out.extend(rs.iter().copied());
        }
        for (fork, rs) in &self.gamma[q.index()] {
            out.extend(rs.iter().copied());
            out.extend(fork.distinct().copied());
        }
        out
    }

    /// Every state that is a target of some fork.
    pub fn fork_targets(&self) -> BTreeSet<StateId> {
        self.gamma
            .iter()
            .flat_map(|m| m.keys())
            .flat_map(|f| f.distinct().copied())
            .collect()
    }

    pub fn names_of<'a>(&self, qs: impl IntoIterator<Item = &'a StateId>) -> Vec<String> {
        let mut v: Vec<String> = qs.into_iter().map(|q| self.name(*q).to_string()).collect();
        v.sort();
        v
    }

    /// The smallest support-closed set of states containing `seed`.
    pub fn support_closure(&self, seed: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<StateId> = seed.into_iter().collect();
        while let Some(q) = stack.pop() {
            if seen.insert(q) {
                stack.extend(self.successors(q));
            }
        }
        seen
    }

    /// The automaton with states `keep`, which must be support-closed.
    pub fn restrict(&self, keep: &BTreeSet<StateId>) -> Result<Pa> {
        Ok(self.restrict_with_map(keep)?.0)
    }

    /// Like [`Pa::restrict`], also returning the original id of every
    /// retained state, indexed by its new id.
    pub fn restrict_with_map(&self, keep: &BTreeSet<StateId>) -> Result<(Pa, Vec<StateId>)> {
        for &q in keep {
            if let Some(&missing) = self.successors(q).iter().find(|r| !keep.contains(r)) {
                return Err(Error::NotSupportClosed {
                    state: self.name(q).to_string(),
                    missing: self.name(missing).to_string(),
                });
            }
        }
        let mut out = Pa::new(self.alphabet.iter().cloned());
        let mut map = HashMap::new();
        let mut back = Vec::new();
        for &q in keep {
            let id = out.add_state(self.name(q))?;
            out.set_accepting(id, self.is_accepting(q));
            map.insert(q, id);
            back.push(q);
        }
        for &q in keep {
            let p = map[&q];
            for (a, rs) in self.deltas(q) {
                for r in rs {
                    out.add_delta(p, a.clone(), map[r]);
                }
            }
            for (fork, rs) in self.forks(q) {
                let f = fork.map(|s| map[s]);
                for r in rs {
                    out.add_gamma(p, f.clone(), map[r]);
                }
            }
        }
        Ok((out, back))
    }

    pub fn fork_to_string(&self, fork: &Fork) -> String {
        let names: Vec<&str> = fork.iter().map(|q| self.name(*q)).collect();
        format!("[{}]", names.join(", "))
    }
}

impl fmt::Debug for Pa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Pa {{")?;
        for q in self.states_by_name() {
            let mark = if self.is_accepting(q) { " (accepting)" } else { "" };
            writeln!(f, "  {}{}", self.name(q), mark)?;
            for (a, rs) in self.deltas(q) {
                writeln!(f, "    --{a}--> {}", self.names_of(rs).join(", "))?;
            }
            for (fork, rs) in self.forks(q) {
                writeln!(f, "    =={}==> {}", self.fork_to_string(fork), self.names_of(rs).join(", "))?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut pa = Pa::default();
        let a = pa.add_fresh_state("TOP");
        let b = pa.add_fresh_state("TOP");
        assert_eq!(pa.name(a), "TOP");
        assert_eq!(pa.name(b), "TOP'");
        assert!(matches!(pa.add_state("TOP"), Err(Error::DuplicateState(_))));
    }

    #[test]
    fn closure_and_restriction() {
        let mut pa = Pa::default();
        let q0 = pa.add_state("q0").unwrap();
        let q1 = pa.add_state("q1").unwrap();
        let q2 = pa.add_state("q2").unwrap();
        let q3 = pa.add_state("q3").unwrap();
        pa.add_delta(q0, l("a"), q1);
        pa.add_gamma(q1, [q2, q3].into_iter().collect(), q1);
        pa.set_accepting(q3, true);
        assert_eq!(pa.support_closure([q1]), BTreeSet::from([q1, q2, q3]));
        assert!(pa.support_closure([]).is_empty());
        let sub = pa.restrict(&BTreeSet::from([q1, q2, q3])).unwrap();
        assert_eq!(sub.num_states(), 3);
        assert_eq!(sub.num_gamma_entries(), 1);
        assert!(sub.is_accepting(sub.lookup("q3").unwrap()));
        let err = pa.restrict(&BTreeSet::from([q0])).unwrap_err();
        assert_eq!(
            err,
            Error::NotSupportClosed { state: "q0".into(), missing: "q1".into() }
        );
        assert_eq!(pa.restrict(&BTreeSet::new()).unwrap().num_states(), 0);
    }
}
