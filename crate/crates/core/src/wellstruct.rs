//! Normalizing transformations producing well-structured automata.
//!
//! Each stage repairs one structural defect: [`parsimonize`] stops fork
//! targets from accepting the empty pomset, [`remove_nullary_forks`] and
//! [`remove_unary_forks`] eliminate forks of arity 0 and 1, and
//! [`flatten_forks`] removes accepting forks below fork targets. The
//! stages that only weakly implement their input are followed by
//! [`strengthen`], which re-adds the original states.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::pa::{check_structure, leadsto, Fork, Pa, StateId};

/// For each original state `q`, states of the new automaton whose
/// languages together make up the language of `q`.
pub type WeakMap = BTreeMap<StateId, BTreeSet<StateId>>;

/// Re-adds every state in the domain of `m` to `new`, so that the result
/// implements `old` on those states. New states whose names clash with a
/// re-added state are renamed with a `#w` suffix.
pub fn strengthen(old: &Pa, new: &Pa, m: &WeakMap) -> Result<Pa> {
    for (q, xs) in m {
        if q.index() >= old.num_states() {
            return Err(Error::UnknownState(format!("{q:?}")));
        }
        if let Some(x) = xs.iter().find(|x| x.index() >= new.num_states()) {
            return Err(Error::UnknownState(format!("{x:?}")));
        }
    }
    let readded: BTreeSet<&str> = m.keys().map(|q| old.name(*q)).collect();
    let mut rename = HashMap::new();
    let mut taken: BTreeSet<String> = new.states().map(|x| new.name(x).to_string()).collect();
    taken.extend(readded.iter().map(|s| s.to_string()));
    for x in new.states() {
        if readded.contains(new.name(x)) {
            let mut name = format!("{}#w", new.name(x));
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            rename.insert(x, name);
        }
    }
    let mut out = new.renamed(&rename)?;
    let leads = leadsto(old);
    for (&q, xs) in m {
        let id = out.add_state(old.name(q))?;
        out.set_accepting(id, leads.accepts_empty(old, q));
        for &x in xs {
            for (a, rs) in new.deltas(x) {
                for &r in rs {
                    out.add_delta(id, a.clone(), r);
                }
            }
            for (fork, rs) in new.forks(x) {
                for &r in rs {
                    out.add_gamma(id, fork.clone(), r);
                }
            }
        }
    }
    Ok(out)
}

/// A copy of the states of `pa` (same ids and names) without transitions.
fn skeleton(pa: &Pa, keep_accepting: bool) -> Pa {
    let mut out = Pa::new(pa.alphabet().iter().cloned());
    for q in pa.states() {
        let id = out.add_state(pa.name(q)).expect("names are unique");
        debug_assert_eq!(id, q);
        out.set_accepting(id, keep_accepting && pa.is_accepting(q));
    }
    out
}

/// Adds an accepting sink `TOP` that takes over acceptance of the empty
/// pomset, and lets forks skip targets that accept it.
pub fn parsimonize(pa: &Pa) -> Result<(Pa, WeakMap)> {
    pa.require_fork_acyclic()?;
    let leads = leadsto(pa);
    let nullable: Vec<bool> = pa.states().map(|q| leads.accepts_empty(pa, q)).collect();
    let mut out = skeleton(pa, false);
    let top = out.add_fresh_state("TOP");
    out.set_accepting(top, true);
    for q in pa.states() {
        for (a, rs) in pa.deltas(q) {
            for &r in rs {
                out.add_delta(q, a.clone(), r);
                if nullable[r.index()] {
                    out.add_delta(q, a.clone(), top);
                }
            }
        }
        for (chi, rs) in pa.forks(q) {
            let skippable = chi.filter(|r| nullable[r.index()]);
            for psi in skippable.submultisets() {
                let phi = chi.difference(&psi).expect("psi is part of chi");
                for &r in rs {
                    out.add_gamma(q, phi.clone(), r);
                    if nullable[r.index()] && !phi.is_empty() {
                        out.add_gamma(q, phi.clone(), top);
                    }
                }
            }
        }
    }
    let m = pa
        .states()
        .map(|q| {
            let mut xs = BTreeSet::from([q]);
            if nullable[q.index()] {
                xs.insert(top);
            }
            (q, xs)
        })
        .collect();
    Ok((out, m))
}

/// Replaces nullary forks by closing every transition under empty runs
/// on both ends.
pub fn remove_nullary_forks(pa: &Pa) -> Result<(Pa, WeakMap)> {
    pa.require_fork_acyclic()?;
    if !check_structure(pa).parsimonious {
        return Err(Error::Precondition(
            "removing nullary forks requires a parsimonious automaton".into(),
        ));
    }
    let leads = leadsto(pa);
    let mut out = skeleton(pa, true);
    for p in pa.states() {
        for q in leads.from(p) {
            for (a, rs) in pa.deltas(q) {
                for &r in rs {
                    for s in leads.from(r) {
                        out.add_delta(p, a.clone(), s);
                    }
                }
            }
            for (phi, rs) in pa.forks(q) {
                if phi.is_empty() {
                    continue;
                }
                for &r in rs {
                    for s in leads.from(r) {
                        out.add_gamma(p, phi.clone(), s);
                    }
                }
            }
        }
    }
    let m = pa.states().map(|q| (q, leads.from(q).collect())).collect();
    Ok((out, m))
}

type Stack = Vec<StateId>;

struct UnaryRemoval<'a> {
    pa: &'a Pa,
    bound: usize,
    /// `up[q]`: stacks `w` with `q ↑ w`, top first.
    up: Vec<Option<Vec<Stack>>>,
}

impl UnaryRemoval<'_> {
    fn up(&mut self, q: StateId) -> Vec<Stack> {
        if let Some(ws) = &self.up[q.index()] {
            return ws.clone();
        }
        let mut out = vec![vec![q]];
        for (fork, rs) in self.pa.forks(q) {
            if fork.len() != 1 {
                continue;
            }
            let r = *fork.iter().next().expect("unary");
            for w in self.up(r) {
                for &q2 in rs {
                    let mut s = w.clone();
                    s.push(q2);
                    out.push(s);
                }
            }
        }
        out.sort();
        out.dedup();
        self.up[q.index()] = Some(out.clone());
        out
    }

    fn push(&self, out: &mut BTreeSet<Stack>, top: StateId, middle: &[StateId], rest: &[StateId]) {
        let mut s = Vec::with_capacity(1 + middle.len() + rest.len());
        s.push(top);
        s.extend_from_slice(middle);
        s.extend_from_slice(rest);
        // Frames below a unary fork have strictly smaller depth, so the
        // bound cannot be exceeded for fork-acyclic inputs.
        debug_assert!(s.len() <= self.bound, "stack exceeds automaton depth");
        if s.len() <= self.bound {
            out.insert(s);
        }
    }

    fn delta(&mut self, w: &[StateId], a: &crate::pomset::Letter) -> BTreeSet<Stack> {
        let (q, x) = w.split_first().expect("stacks are non-empty");
        let mut out = BTreeSet::new();
        for rw in self.up(*q) {
            let (r, middle) = rw.split_first().expect("non-empty");
            for &q2 in self.pa.delta(*r, a) {
                self.push(&mut out, q2, middle, x);
            }
        }
        if self.pa.is_accepting(*q) && !x.is_empty() {
            out.extend(self.delta(x, a));
        }
        out
    }

    fn gamma(&mut self, w: &[StateId]) -> BTreeMap<Fork, BTreeSet<Stack>> {
        let (q, x) = w.split_first().expect("stacks are non-empty");
        let mut out: BTreeMap<Fork, BTreeSet<Stack>> = BTreeMap::new();
        for rw in self.up(*q) {
            let (r, middle) = rw.split_first().expect("non-empty");
            for (phi, rs) in self.pa.forks(*r) {
                if phi.len() < 2 {
                    continue;
                }
                let entry = out.entry(phi.clone()).or_default();
                for &q2 in rs {
                    self.push(entry, q2, middle, x);
                }
            }
        }
        if self.pa.is_accepting(*q) && !x.is_empty() {
            for (phi, ss) in self.gamma(x) {
                out.entry(phi).or_default().extend(ss);
            }
        }
        out.retain(|_, ss| !ss.is_empty());
        out
    }
}

/// Replaces unary forks by keeping a stack of pending continuations.
/// Every original state survives, under its own name, as the stack holding
/// only itself; longer stacks are named by joining their entries with `|`.
pub fn remove_unary_forks(pa: &Pa) -> Result<Pa> {
    let sa = pa.require_fork_acyclic()?;
    let report = check_structure(pa);
    if !report.parsimonious || !report.is_n_forking(1) {
        return Err(Error::Precondition(
            "removing unary forks requires a parsimonious, 1-forking automaton".into(),
        ));
    }
    let mut ur = UnaryRemoval {
        pa,
        bound: sa.depth(),
        up: vec![None; pa.num_states()],
    };
    let mut out = Pa::new(pa.alphabet().iter().cloned());
    let mut ids: HashMap<Stack, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    for q in pa.states() {
        let id = out.add_state(pa.name(q))?;
        ids.insert(vec![q], id);
        queue.push_back(vec![q]);
    }
    let mut intern = |w: Stack, out: &mut Pa, queue: &mut VecDeque<Stack>| -> StateId {
        if let Some(&id) = ids.get(&w) {
            return id;
        }
        let name: Vec<&str> = w.iter().map(|q| pa.name(*q)).collect();
        let id = out.add_fresh_state(&name.join("|"));
        ids.insert(w.clone(), id);
        queue.push_back(w);
        id
    };
    while let Some(w) = queue.pop_front() {
        let id = intern(w.clone(), &mut out, &mut queue);
        out.set_accepting(id, w.iter().all(|q| pa.is_accepting(*q)));
        for a in pa.alphabet() {
            for s in ur.delta(&w, a) {
                let t = intern(s, &mut out, &mut queue);
                out.add_delta(id, a.clone(), t);
            }
        }
        for (phi, ss) in ur.gamma(&w) {
            // Fork targets are original states, whose singleton stacks
            // were added first and so share their ids.
            for s in ss {
                let t = intern(s, &mut out, &mut queue);
                out.add_gamma(id, phi.clone(), t);
            }
        }
    }
    Ok(out)
}

/// All `φ` with `ψ ◀ φ`: repeatedly replace one member `p` of the fork by
/// `χ`, where `p` has an accepting fork into `χ`.
fn expansions(pa: &Pa, psi: &Fork, memo: &mut HashMap<Fork, BTreeSet<Fork>>) -> BTreeSet<Fork> {
    if let Some(e) = memo.get(psi) {
        return e.clone();
    }
    let mut seen = BTreeSet::from([psi.clone()]);
    let mut queue = VecDeque::from([psi.clone()]);
    while let Some(phi) = queue.pop_front() {
        for p in phi.distinct() {
            for (chi, rs) in pa.forks(*p) {
                if rs.iter().any(|r| pa.is_accepting(*r)) {
                    let next = phi.remove_one(p).expect("p occurs").sum(chi);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    memo.insert(psi.clone(), seen.clone());
    seen
}

/// Splits every state `q` into `q^r`, which may not reach acceptance
/// through a fork, and `q^f`, which can only do so; forks then target
/// `^r` states exclusively.
pub fn flatten_forks(pa: &Pa) -> Result<(Pa, WeakMap)> {
    pa.require_fork_acyclic()?;
    let report = check_structure(pa);
    if !report.parsimonious || !report.is_n_forking(2) {
        return Err(Error::Precondition(
            "flattening forks requires a parsimonious, 2-forking automaton".into(),
        ));
    }
    let mut out = Pa::new(pa.alphabet().iter().cloned());
    let reg: Vec<StateId> = pa.states().map(|q| out.add_fresh_state(&format!("{}^r", pa.name(q)))).collect();
    let fin: Vec<StateId> = pa.states().map(|q| out.add_fresh_state(&format!("{}^f", pa.name(q)))).collect();
    let top = out.add_fresh_state("TOP");
    out.set_accepting(top, true);
    let mut memo = HashMap::new();
    for p in pa.states() {
        let pr = reg[p.index()];
        for (a, qs) in pa.deltas(p) {
            for &q in qs {
                out.add_delta(pr, a.clone(), reg[q.index()]);
                out.add_delta(pr, a.clone(), fin[q.index()]);
            }
            if qs.iter().any(|q| pa.is_accepting(*q)) {
                out.add_delta(pr, a.clone(), top);
            }
        }
        for (psi, qs) in pa.forks(p) {
            let accepting = qs.iter().any(|q| pa.is_accepting(*q));
            for phi in expansions(pa, psi, &mut memo) {
                let fork = phi.map(|s| reg[s.index()]);
                for &q in qs {
                    out.add_gamma(pr, fork.clone(), reg[q.index()]);
                    out.add_gamma(pr, fork.clone(), fin[q.index()]);
                }
                if accepting {
                    out.add_gamma(fin[p.index()], fork, top);
                }
            }
        }
    }
    let m = pa
        .states()
        .map(|q| {
            let mut xs = BTreeSet::from([reg[q.index()], fin[q.index()]]);
            if pa.is_accepting(q) {
                xs.insert(top);
            }
            (q, xs)
        })
        .collect();
    Ok((out, m))
}

fn restrict_to(pa: &Pa, tracked: &[String]) -> Result<Pa> {
    let seeds = tracked.iter().map(|n| pa.lookup(n)).collect::<Result<Vec<_>>>()?;
    pa.restrict(&pa.support_closure(seeds))
}

/// Runs every stage, keeping only what the tracked states need. Returns a
/// well-structured, fork-acyclic automaton in which each tracked state
/// keeps its name and language, together with the position of each
/// tracked state in it.
pub fn well_structure(pa: &Pa, tracked: &BTreeSet<StateId>) -> Result<(Pa, BTreeMap<StateId, StateId>)> {
    pa.require_fork_acyclic()?;
    let names: Vec<String> = tracked.iter().map(|q| pa.name(*q).to_string()).collect();
    let mut cur = restrict_to(pa, &names)?;

    let (a0, m0) = parsimonize(&cur)?;
    cur = restrict_to(&strengthen(&cur, &a0, &only_tracked(&cur, &m0, &names)?)?, &names)?;

    let (a1, m1) = remove_nullary_forks(&cur)?;
    cur = restrict_to(&strengthen(&cur, &a1, &only_tracked(&cur, &m1, &names)?)?, &names)?;

    cur = restrict_to(&remove_unary_forks(&cur)?, &names)?;

    let (a3, m3) = flatten_forks(&cur)?;
    cur = restrict_to(&strengthen(&cur, &a3, &only_tracked(&cur, &m3, &names)?)?, &names)?;

    let mut map = BTreeMap::new();
    for &q in tracked {
        map.insert(q, cur.lookup(pa.name(q))?);
    }
    Ok((cur, map))
}

fn only_tracked(pa: &Pa, m: &WeakMap, tracked: &[String]) -> Result<WeakMap> {
    let mut out = WeakMap::new();
    for n in tracked {
        let q = pa.lookup(n)?;
        out.insert(q, m.get(&q).cloned().unwrap_or_default());
    }
    Ok(out)
}
