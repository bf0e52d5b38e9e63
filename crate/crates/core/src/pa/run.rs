//! Runs: empty-pomset reachability and membership.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::structure::check_structure_with;
use super::{Pa, StateId};
use crate::error::Result;
use crate::multiset::Multiset;
use crate::pomset::{Shape, SpTerm};

/// The relation `p ⤳ q`: `p` reaches `q` reading the empty pomset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadsTo {
    rows: Vec<FixedBitSet>,
}

impl LeadsTo {
    pub fn holds(&self, p: StateId, q: StateId) -> bool {
        self.rows[p.index()].contains(q.index())
    }

    pub fn from(&self, p: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.rows[p.index()].ones().map(|i| StateId(i as u32))
    }

    /// Whether `p ⤳ f` for some accepting `f`.
    pub fn accepts_empty(&self, pa: &Pa, p: StateId) -> bool {
        self.from(p).any(|q| pa.is_accepting(q))
    }

    pub fn pairs(&self) -> BTreeSet<(StateId, StateId)> {
        let mut out = BTreeSet::new();
        for (p, row) in self.rows.iter().enumerate() {
            for q in row.ones() {
                out.insert((StateId(p as u32), StateId(q as u32)));
            }
        }
        out
    }
}

/// Least reflexive, transitive relation containing `q ⤳ s` whenever
/// `s ∈ γ(q, φ)` and every member of `φ` leads to an accepting state.
pub fn leadsto(pa: &Pa) -> LeadsTo {
    let n = pa.num_states();
    let mut rows: Vec<FixedBitSet> = (0..n)
        .map(|i| {
            let mut r = FixedBitSet::with_capacity(n);
            r.insert(i);
            r
        })
        .collect();
    let mut accepting = FixedBitSet::with_capacity(n);
    for q in pa.accepting_states() {
        accepting.insert(q.index());
    }
    loop {
        let empty_ok: Vec<bool> = rows.iter().map(|r| !r.is_disjoint(&accepting)).collect();
        let mut changed = false;
        for q in pa.states() {
            for (fork, rs) in pa.forks(q) {
                if fork.distinct().all(|t| empty_ok[t.index()]) {
                    for r in rs {
                        if !rows[q.index()].contains(r.index()) {
                            rows[q.index()].insert(r.index());
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
        for k in 0..n {
            let via = rows[k].clone();
            for row in rows.iter_mut() {
                if row.contains(k) {
                    row.union_with(&via);
                }
            }
        }
    }
    LeadsTo { rows }
}

/// Whether `q` accepts the empty pomset.
pub fn accepts_empty(pa: &Pa, q: StateId) -> bool {
    leadsto(pa).accepts_empty(pa, q)
}

/// Whether `q` accepts `u`. Builds a fresh [`Runner`]; reuse one for
/// repeated queries.
pub fn membership(pa: &Pa, q: StateId, u: &SpTerm) -> Result<bool> {
    Ok(Runner::new(pa)?.accepts(q, u))
}

type Reach = Rc<BTreeSet<StateId>>;

/// Memoized membership queries against one fork-acyclic automaton.
pub struct Runner<'a> {
    pa: &'a Pa,
    leads: LeadsTo,
    fast: bool,
    memo: HashMap<(StateId, SpTerm), Reach>,
}

impl<'a> Runner<'a> {
    /// Uses the syntax-directed algorithm when the automaton is
    /// well-structured, and the general one otherwise.
    pub fn new(pa: &'a Pa) -> Result<Self> {
        let mut r = Self::general(pa)?;
        r.fast = check_structure_with(pa, &r.leads).well_structured;
        Ok(r)
    }

    /// Always uses the general algorithm.
    pub fn general(pa: &'a Pa) -> Result<Self> {
        pa.require_fork_acyclic()?;
        Ok(Runner {
            pa,
            leads: leadsto(pa),
            fast: false,
            memo: HashMap::new(),
        })
    }

    pub fn uses_fast_path(&self) -> bool {
        self.fast
    }

    pub fn leads(&self) -> &LeadsTo {
        &self.leads
    }

    pub fn accepts(&mut self, q: StateId, u: &SpTerm) -> bool {
        let pa = self.pa;
        self.reach(q, u).iter().any(|r| pa.is_accepting(*r))
    }

    /// All states `r` with a run from `q` to `r` labelled `u`.
    pub fn reach(&mut self, q: StateId, u: &SpTerm) -> Reach {
        if self.fast {
            self.reach_structured(q, u)
        } else {
            self.reach_general(q, u)
        }
    }

    fn reach_general(&mut self, q: StateId, u: &SpTerm) -> Reach {
        let key = (q, u.clone());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let starts: Vec<StateId> = self.leads.from(q).collect();
        let factors = u.factorize_seq();
        let mut out = BTreeSet::new();
        if factors.is_empty() {
            out.extend(starts);
        } else {
            // The first unit run consumes a non-empty prefix of the
            // sequential factors.
            for j in 1..=factors.len() {
                let prefix = SpTerm::seq_all(factors[..j].iter().cloned());
                let suffix = SpTerm::seq_all(factors[j..].iter().cloned());
                let mut mids = BTreeSet::new();
                for &q0 in &starts {
                    mids.extend(self.unit_general(q0, &prefix));
                }
                for q1 in mids {
                    out.extend(self.reach_general(q1, &suffix).iter().copied());
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    /// Targets of unit runs from `q` labelled by the non-empty `p`.
    fn unit_general(&mut self, q: StateId, p: &SpTerm) -> BTreeSet<StateId> {
        let pa = self.pa;
        let mut out = BTreeSet::new();
        if let Shape::Prim(a) = p.shape() {
            out.extend(pa.delta(q, a).iter().copied());
        }
        let parts = p.factorize_par();
        for (fork, rs) in pa.forks(q) {
            if fork.is_empty() || rs.is_subset(&out) {
                continue;
            }
            let targets: Vec<StateId> = fork.iter().copied().collect();
            if self.distribute(&targets, &parts) {
                out.extend(rs.iter().copied());
            }
        }
        out
    }

    /// Whether the parallel factors in `parts` can be split among
    /// `targets`, each accepting the parallel composition of its share.
    fn distribute(&mut self, targets: &[StateId], parts: &Multiset<SpTerm>) -> bool {
        let (&t, rest) = targets.split_first().expect("fork is non-empty");
        if rest.is_empty() {
            return self.accepts_general(t, &SpTerm::par_all(parts.iter().cloned()));
        }
        for share in parts.submultisets() {
            let w = SpTerm::par_all(share.iter().cloned());
            if self.accepts_general(t, &w) {
                let left = parts.difference(&share).expect("share is a sub-multiset");
                if self.distribute(rest, &left) {
                    return true;
                }
            }
        }
        false
    }

    fn accepts_general(&mut self, q: StateId, u: &SpTerm) -> bool {
        let pa = self.pa;
        self.reach_general(q, u).iter().any(|r| pa.is_accepting(*r))
    }

    /// In a well-structured automaton every sequential factor is read by
    /// exactly one unit run, and a parallel factor with `n` components by a
    /// fork of arity `n` giving one component to each target.
    fn reach_structured(&mut self, q: StateId, u: &SpTerm) -> Reach {
        let key = (q, u.clone());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let pa = self.pa;
        let out = match u.shape() {
            Shape::Empty => BTreeSet::from([q]),
            Shape::Prim(a) => pa.delta(q, a).clone(),
            Shape::Par(parts) => {
                let parts: Vec<SpTerm> = parts.iter().cloned().collect();
                let mut out = BTreeSet::new();
                for (fork, rs) in pa.forks(q) {
                    if fork.len() != parts.len() || rs.is_subset(&out) {
                        continue;
                    }
                    let targets: Vec<StateId> = fork.iter().copied().collect();
                    let mut used = vec![false; parts.len()];
                    if self.match_parts(&targets, &parts, &mut used) {
                        out.extend(rs.iter().copied());
                    }
                }
                out
            }
            Shape::Seq(factors) => {
                let mut cur = BTreeSet::from([q]);
                for v in factors {
                    let mut next = BTreeSet::new();
                    for s in cur {
                        next.extend(self.reach_structured(s, v).iter().copied());
                    }
                    cur = next;
                    if cur.is_empty() {
                        break;
                    }
                }
                cur
            }
        };
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    fn match_parts(&mut self, targets: &[StateId], parts: &[SpTerm], used: &mut [bool]) -> bool {
        let Some((&t, rest)) = targets.split_first() else {
            return true;
        };
        for i in 0..parts.len() {
            // Equal parts are interchangeable; trying the first unused one suffices.
            if used[i] || (0..i).any(|j| !used[j] && parts[j] == parts[i]) {
                continue;
            }
            let pa = self.pa;
            let ok = self.reach_structured(t, &parts[i]).iter().any(|r| pa.is_accepting(*r));
            if ok {
                used[i] = true;
                if self.match_parts(rest, parts, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        false
    }
}
