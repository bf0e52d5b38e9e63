//! Atoms of well-structured automata and the state-equivalence decision.
//!
//! An atom is a set of states `α` such that some pomset is accepted by
//! exactly the states in `α`. Two states accept the same language iff no
//! atom separates them. Atoms are computed level by level in the support
//! depth: forks of states at one level are read as letters ranging over
//! atoms of the level below, turning the automaton into an ordinary NFA.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pa::{check_structure, support_analysis, Pa, StateId};
use crate::pomset::Letter;

pub type Atom = BTreeSet<StateId>;

/// A letter of the atom NFA: an action, or a multiset of atoms standing
/// for every parallel composition of pomsets drawn from those atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ExtSym {
    Letter(Letter),
    Fork(Multiset<Atom>),
}

#[derive(Clone, Debug, Default)]
pub struct AtomNfa {
    pub num_states: usize,
    pub accepting: BTreeSet<StateId>,
    pub symbols: BTreeSet<ExtSym>,
    pub transitions: BTreeMap<(StateId, ExtSym), BTreeSet<StateId>>,
}

impl AtomNfa {
    pub fn step(&self, q: StateId, sym: &ExtSym) -> BTreeSet<StateId> {
        self.transitions.get(&(q, sym.clone())).cloned().unwrap_or_default()
    }
}

fn require_well_structured(pa: &Pa) -> Result<()> {
    pa.require_fork_acyclic()?;
    if !check_structure(pa).well_structured {
        return Err(Error::Precondition("automaton is not well-structured".into()));
    }
    Ok(())
}

/// Reads each fork `(q, ⟦q1, …, qn⟧ → s)` as transitions `q → s` on every
/// `⟦α1, …, αn⟧` with `qi ∈ αi`, for `αi` among `atoms_below`.
pub fn build_atom_nfa(pa: &Pa, atoms_below: &BTreeSet<Atom>) -> AtomNfa {
    let mut nfa = AtomNfa {
        num_states: pa.num_states(),
        accepting: pa.accepting_states().collect(),
        symbols: pa.alphabet().iter().cloned().map(ExtSym::Letter).collect(),
        transitions: BTreeMap::new(),
    };
    for q in pa.states() {
        for (a, rs) in pa.deltas(q) {
            nfa.transitions
                .entry((q, ExtSym::Letter(a.clone())))
                .or_default()
                .extend(rs.iter().copied());
        }
        for (fork, rs) in pa.forks(q) {
            let options: Vec<Vec<&Atom>> = fork
                .iter()
                .map(|t| atoms_below.iter().filter(|a| a.contains(t)).collect())
                .collect();
            let mut choice = Vec::with_capacity(options.len());
            for_each_choice(&options, &mut choice, &mut |picked| {
                let sym = ExtSym::Fork(picked.iter().map(|a| (*a).clone()).collect());
                nfa.symbols.insert(sym.clone());
                nfa.transitions.entry((q, sym)).or_default().extend(rs.iter().copied());
            });
        }
    }
    nfa
}

fn for_each_choice<'a>(options: &[Vec<&'a Atom>], picked: &mut Vec<&'a Atom>, f: &mut impl FnMut(&[&'a Atom])) {
    if picked.len() == options.len() {
        f(picked);
        return;
    }
    for &a in &options[picked.len()] {
        picked.push(a);
        for_each_choice(options, picked, f);
        picked.pop();
    }
}

/// The acceptance classes `{q : w ∈ L(q)}` over all words `w`, found by
/// determinizing the reversed automaton from the accepting states.
pub fn nfa_atoms(nfa: &AtomNfa) -> BTreeSet<Atom> {
    let mut rev: BTreeMap<&ExtSym, BTreeMap<StateId, Vec<StateId>>> = BTreeMap::new();
    for ((q, sym), rs) in &nfa.transitions {
        let by_target = rev.entry(sym).or_default();
        for r in rs {
            by_target.entry(*r).or_default().push(*q);
        }
    }
    let start: Atom = nfa.accepting.clone();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for sym in &nfa.symbols {
            let mut pre = Atom::new();
            if let Some(by_target) = rev.get(sym) {
                for t in &s {
                    if let Some(qs) = by_target.get(t) {
                        pre.extend(qs.iter().copied());
                    }
                }
            }
            if seen.insert(pre.clone()) {
                queue.push_back(pre);
            }
        }
    }
    seen
}

/// The atoms of a well-structured, fork-acyclic automaton. The automaton
/// without states has the single atom `∅`.
pub fn pa_atoms(pa: &Pa) -> Result<BTreeSet<Atom>> {
    require_well_structured(pa)?;
    let sa = support_analysis(pa);
    let mut atoms = BTreeSet::from([Atom::new()]);
    for d in 1..=sa.depth() {
        let level: BTreeSet<StateId> = pa.states().filter(|q| sa.depth_of(*q) <= d).collect();
        let (sub, back) = pa.restrict_with_map(&level)?;
        let mut to_sub = BTreeMap::new();
        for (i, q) in back.iter().enumerate() {
            to_sub.insert(*q, StateId(i as u32));
        }
        let below: BTreeSet<Atom> = atoms
            .iter()
            .map(|a| a.iter().map(|q| to_sub[q]).collect())
            .collect();
        let nfa = build_atom_nfa(&sub, &below);
        atoms = nfa_atoms(&nfa)
            .into_iter()
            .map(|a| a.iter().map(|q| back[q.index()]).collect())
            .collect();
    }
    Ok(atoms)
}

/// Whether `q1` and `q2` accept the same language.
pub fn state_equiv(pa: &Pa, q1: StateId, q2: StateId) -> Result<bool> {
    if q1.index() >= pa.num_states() || q2.index() >= pa.num_states() {
        return Err(Error::UnknownState(format!("{:?}", q1.max(q2))));
    }
    require_well_structured(pa)?;
    if q1 == q2 {
        return Ok(true);
    }
    let (sub, back) = pa.restrict_with_map(&pa.support_closure([q1, q2]))?;
    let find = |q: StateId| StateId(back.iter().position(|x| *x == q).expect("retained") as u32);
    let (s1, s2) = (find(q1), find(q2));
    Ok(pa_atoms(&sub)?
        .iter()
        .all(|a| a.contains(&s1) == a.contains(&s2)))
}

/// One line per atom: member names sorted, followed by a marker when the
/// atom contains a fork target.
pub struct AtomReport<'a> {
    pub pa: &'a Pa,
    pub atoms: &'a BTreeSet<Atom>,
}

impl AtomReport<'_> {
    pub fn lines(&self) -> Vec<(Vec<String>, bool)> {
        let targets = self.pa.fork_targets();
        let mut out: Vec<(Vec<String>, bool)> = self
            .atoms
            .iter()
            .map(|a| (self.pa.names_of(a), a.iter().any(|q| targets.contains(q))))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for AtomReport<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (names, fork_target) in self.lines() {
            write!(f, "{{{}}}", names.join(", "))?;
            if fork_target {
                f.write_str("  [fork target]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_accepting_state_has_two_atoms() {
        let mut pa = Pa::new([Letter::new("a").unwrap()]);
        let q = pa.add_state("q").unwrap();
        pa.set_accepting(q, true);
        let atoms = nfa_atoms(&build_atom_nfa(&pa, &BTreeSet::new()));
        assert_eq!(atoms, BTreeSet::from([BTreeSet::from([q]), BTreeSet::new()]));
    }

    #[test]
    fn empty_automaton_has_the_empty_atom() {
        let pa = Pa::default();
        assert_eq!(pa_atoms(&pa).unwrap(), BTreeSet::from([Atom::new()]));
    }

    #[test]
    fn identical_rows_are_never_separated() {
        let a = Letter::new("a").unwrap();
        let mut pa = Pa::new([a.clone()]);
        let p = pa.add_state("p").unwrap();
        let q = pa.add_state("q").unwrap();
        let f = pa.add_state("f").unwrap();
        pa.set_accepting(f, true);
        pa.add_delta(p, a.clone(), f);
        pa.add_delta(q, a.clone(), f);
        pa.add_delta(f, a, p);
        for atom in pa_atoms(&pa).unwrap() {
            assert_eq!(atom.contains(&p), atom.contains(&q));
        }
        assert!(state_equiv(&pa, p, q).unwrap());
        assert!(!state_equiv(&pa, p, f).unwrap());
    }
}
