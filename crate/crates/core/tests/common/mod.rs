//! Helpers shared by the integration tests, including oracles that are
//! deliberately written without reusing the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use pomset_automata::pa::Pa;
use pomset_automata::{Letter, SpTerm, StateId};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Pa {
    Pa::load(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn q(pa: &Pa, name: &str) -> StateId {
    pa.lookup(name).unwrap_or_else(|_| panic!("no state named {name}"))
}

pub fn letter(s: &str) -> Letter {
    Letter::new(s).unwrap()
}

pub fn pomset(s: &str) -> SpTerm {
    SpTerm::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn pomsets(xs: &[&str]) -> BTreeSet<SpTerm> {
    xs.iter().map(|s| pomset(s)).collect()
}

pub fn names(pa: &Pa, qs: &BTreeSet<StateId>) -> BTreeSet<String> {
    qs.iter().map(|s| pa.name(*s).to_string()).collect()
}

pub fn name_set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `q ⤳ s` by naive saturation: start from the identity and keep adding
/// pairs justified by one rule application until nothing changes.
pub fn small_step_leadsto(pa: &Pa) -> BTreeSet<(StateId, StateId)> {
    let states: Vec<StateId> = pa.states().collect();
    let mut rel: BTreeSet<(StateId, StateId)> = states.iter().map(|&p| (p, p)).collect();
    loop {
        let mut added = Vec::new();
        for &(p, m) in &rel {
            for &(m2, s) in &rel {
                if m == m2 && !rel.contains(&(p, s)) {
                    added.push((p, s));
                }
            }
        }
        for &p in &states {
            for (fork, rs) in pa.forks(p) {
                let threads_finish = fork
                    .iter()
                    .all(|t| rel.iter().any(|&(a, f)| a == *t && pa.is_accepting(f)));
                if threads_finish {
                    for &r in rs {
                        if !rel.contains(&(p, r)) {
                            added.push((p, r));
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            return rel;
        }
        rel.extend(added);
    }
}

/// Number of sp-pomsets with exactly `n` events over `k` letters, from the
/// counting recurrence on primes.
///
/// A parallel term is a multiset of at least two non-parallel factors
/// (counted with the Euler transform over smaller sizes); a sequential term
/// is a list of at least two non-sequential factors.
pub fn count_sp(k: u128, n: usize) -> u128 {
    let atom = |m: usize| if m == 1 { k } else { 0 };
    let mut seq = vec![0u128; n + 1];
    let mut par = vec![0u128; n + 1];
    let mut lists = vec![0u128; n + 1];
    lists[0] = 1;
    for m in 1..=n {
        let mut ms = vec![0u128; m + 1];
        ms[0] = 1;
        for size in 1..m {
            let types = atom(size) + seq[size];
            let mut next = vec![0u128; m + 1];
            for total in 0..=m {
                let mut copies = 0;
                while total + copies * size <= m {
                    next[total + copies * size] += ms[total] * multichoose(types, copies);
                    copies += 1;
                }
            }
            ms = next;
        }
        par[m] = ms[m];
        lists[m] = (1..=m).map(|j| (atom(j) + par[j]) * lists[m - j]).sum();
        seq[m] = lists[m] - (atom(m) + par[m]);
    }
    atom(n) + seq[n] + par[n]
}

fn multichoose(types: u128, copies: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..copies as u128 {
        r = r * (types + i) / (i + 1);
    }
    r
}

/// Runs between states, by saturation of the run rules: the unit runs
/// (reading nothing, one letter, or one fork whose threads each reach an
/// accepting state) closed under sequential composition. Only pomsets of
/// at most `n` events are kept. Exponential, for tiny automata only.
pub fn rule_semantics(pa: &Pa, n: usize) -> Vec<BTreeSet<SpTerm>> {
    let states: Vec<StateId> = pa.states().collect();
    let mut runs: BTreeMap<(StateId, StateId), BTreeSet<SpTerm>> = BTreeMap::new();
    for &p in &states {
        runs.entry((p, p)).or_default().insert(SpTerm::empty());
        for (a, rs) in pa.deltas(p) {
            for &r in rs {
                runs.entry((p, r)).or_default().insert(SpTerm::prim(a.clone()));
            }
        }
    }
    loop {
        let accepted = |runs: &BTreeMap<(StateId, StateId), BTreeSet<SpTerm>>, t: StateId| {
            let mut out = BTreeSet::new();
            for ((a, f), us) in runs {
                if *a == t && pa.is_accepting(*f) {
                    out.extend(us.iter().cloned());
                }
            }
            out
        };
        let mut added: Vec<((StateId, StateId), SpTerm)> = Vec::new();
        for ((p, m), us) in &runs {
            for ((m2, s), vs) in &runs {
                if m != m2 {
                    continue;
                }
                for u in us {
                    for v in vs {
                        if u.size() + v.size() <= n {
                            let w = u.seq(v);
                            if !runs.get(&(*p, *s)).is_some_and(|r| r.contains(&w)) {
                                added.push(((*p, *s), w));
                            }
                        }
                    }
                }
            }
        }
        for &p in &states {
            for (fork, rs) in pa.forks(p) {
                let mut combos = vec![SpTerm::empty()];
                for t in fork.iter() {
                    let acc = accepted(&runs, *t);
                    let mut next = Vec::new();
                    for c in &combos {
                        for u in &acc {
                            if c.size() + u.size() <= n {
                                next.push(c.par(u));
                            }
                        }
                    }
                    combos = next;
                }
                for &r in rs {
                    for c in &combos {
                        if !runs.get(&(p, r)).is_some_and(|s| s.contains(c)) {
                            added.push(((p, r), c.clone()));
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (k, u) in added {
            runs.entry(k).or_default().insert(u);
        }
    }
    states
        .iter()
        .map(|&p| {
            let mut out = BTreeSet::new();
            for ((a, f), us) in &runs {
                if *a == p && pa.is_accepting(*f) {
                    out.extend(us.iter().cloned());
                }
            }
            out
        })
        .collect()
}
