//! Brute-force bounded semantics and seeded random corpora, used as ground
//! truth in tests and by the CLI's `--oracle` flag.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pa::{Pa, Runner, StateId};
use crate::pomset::{Letter, Shape, SpTerm};
use crate::srexpr::{lang_up_to, Expr};

/// Largest event count accepted by default.
pub const DEFAULT_CEILING: usize = 7;

/// A bound on the number of events in enumerated pomsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound(usize);

impl Bound {
    pub fn new(max_events: usize) -> Result<Bound> {
        Self::with_ceiling(max_events, DEFAULT_CEILING)
    }

    pub fn with_ceiling(max_events: usize, ceiling: usize) -> Result<Bound> {
        if max_events > ceiling {
            return Err(Error::Precondition(format!(
                "bound {max_events} exceeds the ceiling of {ceiling} events"
            )));
        }
        Ok(Bound(max_events))
    }

    pub fn max_events(self) -> usize {
        self.0
    }
}

/// Every series-parallel pomset over `alphabet` with at most `n` events.
pub fn enumerate_sp(alphabet: &BTreeSet<Letter>, n: usize) -> BTreeSet<SpTerm> {
    enumerate_by_size(alphabet, n).into_iter().flatten().collect()
}

/// `out[k]` holds the pomsets with exactly `k` events.
pub fn enumerate_by_size(alphabet: &BTreeSet<Letter>, n: usize) -> Vec<Vec<SpTerm>> {
    // not_seq[k]: size-k terms usable as sequential factors (primitive or
    // parallel); not_par[k]: usable as parallel factors.
    let mut not_seq: Vec<Vec<SpTerm>> = vec![Vec::new(); n + 1];
    let mut not_par: Vec<Vec<SpTerm>> = vec![Vec::new(); n + 1];
    // seq_lists[k]: non-empty lists of sequential factors of total size k.
    let mut seq_lists: Vec<Vec<Vec<SpTerm>>> = vec![Vec::new(); n + 1];
    let mut out = vec![Vec::new(); n + 1];
    out[0].push(SpTerm::empty());
    for k in 1..=n {
        if k == 1 {
            for a in alphabet {
                let t = SpTerm::prim(a.clone());
                not_seq[1].push(t.clone());
                not_par[1].push(t);
            }
        } else {
            // Parallel terms: multisets of at least two non-parallel terms.
            let pool: Vec<&SpTerm> = (1..k).flat_map(|i| not_par[i].iter()).collect();
            let mut chosen = Vec::new();
            let mut pars = Vec::new();
            multisets(&pool, 0, k, &mut chosen, &mut pars);
            not_seq[k].extend(pars);
        }
        let mut lists: Vec<Vec<SpTerm>> = not_seq[k].iter().map(|t| vec![t.clone()]).collect();
        for i in 1..k {
            for head in &not_seq[i] {
                for tail in &seq_lists[k - i] {
                    let mut l = Vec::with_capacity(tail.len() + 1);
                    l.push(head.clone());
                    l.extend(tail.iter().cloned());
                    lists.push(l);
                }
            }
        }
        let seqs: Vec<SpTerm> = lists
            .iter()
            .filter(|l| l.len() >= 2)
            .map(|l| SpTerm::seq_all(l.iter().cloned()))
            .collect();
        seq_lists[k] = lists;
        out[k] = not_seq[k].iter().chain(&seqs).cloned().collect();
        not_par[k].extend(seqs);
    }
    out
}

/// Multisets of at least two elements of `pool[from..]` with sizes summing
/// to `left`, each generated once by choosing indices in ascending order.
fn multisets(pool: &[&SpTerm], from: usize, left: usize, chosen: &mut Vec<SpTerm>, out: &mut Vec<SpTerm>) {
    if left == 0 {
        if chosen.len() >= 2 {
            out.push(SpTerm::par_all(chosen.iter().cloned()));
        }
        return;
    }
    for i in from..pool.len() {
        let t = pool[i];
        if t.size() <= left {
            chosen.push(t.clone());
            multisets(pool, i, left - t.size(), chosen, out);
            chosen.pop();
        }
    }
}

/// The pomsets of at most `n` events accepted by `q`.
pub fn pa_lang_up_to(pa: &Pa, q: StateId, n: usize) -> Result<BTreeSet<SpTerm>> {
    Ok(pa_langs_up_to(pa, &[q], n)?.remove(&q).unwrap_or_default())
}

/// Bounded languages of several states, sharing one memo table.
pub fn pa_langs_up_to(
    pa: &Pa,
    qs: &[StateId],
    n: usize,
) -> Result<BTreeMap<StateId, BTreeSet<SpTerm>>> {
    let mut runner = Runner::new(pa)?;
    let universe = enumerate_sp(pa.alphabet(), n);
    let mut out = BTreeMap::new();
    for &q in qs {
        let lang = universe.iter().filter(|u| runner.accepts(q, u)).cloned().collect();
        out.insert(q, lang);
    }
    Ok(out)
}

/// Bounded language equality: necessary for `⟦e⟧ = ⟦f⟧`.
pub fn oracle_equiv(e: &Expr, f: &Expr, n: usize) -> bool {
    lang_up_to(e, n) == lang_up_to(f, n)
}

/// Seeded generator of random expressions and automata.
pub struct Corpus {
    rng: ChaCha8Rng,
    letters: Vec<Letter>,
}

impl Corpus {
    /// A generator over the first `alphabet_size` of `a, b, c, …`.
    pub fn new(seed: u64, alphabet_size: usize) -> Corpus {
        let letters = (0..alphabet_size)
            .map(|i| Letter::new(&((b'a' + i as u8) as char).to_string()).expect("valid letter"))
            .collect();
        Corpus {
            rng: ChaCha8Rng::seed_from_u64(seed),
            letters,
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn letter(&mut self) -> Letter {
        self.letters.choose(&mut self.rng).expect("non-empty alphabet").clone()
    }

    /// A random expression of depth at most `max_depth`.
    pub fn expr(&mut self, max_depth: usize) -> Expr {
        if max_depth == 0 || self.rng.random_ratio(1, 4) {
            return match self.rng.random_range(0..10) {
                0 => Expr::Zero,
                1 | 2 => Expr::One,
                _ => Expr::prim(self.letter()),
            };
        }
        let d = max_depth - 1;
        match self.rng.random_range(0..9) {
            0 | 1 => Expr::plus(self.expr(d), self.expr(d)),
            2..=4 => Expr::dot(self.expr(d), self.expr(d)),
            5 | 6 => Expr::par(self.expr(d), self.expr(d)),
            _ => Expr::star(self.expr(d)),
        }
    }

    /// A pair of expressions built from shared material: either a rewrite
    /// of one into the other by a valid law (usually equivalent), a local
    /// mutation (usually not), or a recombination of common subterms.
    pub fn expr_pair(&mut self, max_depth: usize) -> (Expr, Expr) {
        let e = self.expr(max_depth);
        let f = match self.rng.random_range(0..10) {
            0..=3 => {
                let mut f = e.clone();
                for _ in 0..self.rng.random_range(1..=3) {
                    f = self.at_random_node(&f, Self::apply_law);
                }
                f
            }
            4..=6 => self.at_random_node(&e, Self::mutate),
            _ => {
                let subs = subterms(&e);
                let x = subs.choose(&mut self.rng).expect("non-empty").clone();
                let y = subs.choose(&mut self.rng).expect("non-empty").clone();
                match self.rng.random_range(0..4) {
                    0 => Expr::plus(e.clone(), x),
                    1 => Expr::dot(x, y),
                    2 => Expr::par(y, x),
                    _ => Expr::plus(y, Expr::dot(x.clone(), Expr::star(x))),
                }
            }
        };
        if self.rng.random_bool(0.5) {
            (e, f)
        } else {
            (f, e)
        }
    }

    fn at_random_node(&mut self, e: &Expr, op: fn(&mut Self, &Expr) -> Expr) -> Expr {
        let target = self.rng.random_range(0..e.node_count());
        let mut counter = 0;
        self.rebuild(e, target, &mut counter, op)
    }

    fn rebuild(&mut self, e: &Expr, target: usize, counter: &mut usize, op: fn(&mut Self, &Expr) -> Expr) -> Expr {
        let here = *counter;
        *counter += 1;
        if here == target {
            return op(self, e);
        }
        match e {
            Expr::Zero | Expr::One | Expr::Prim(_) => e.clone(),
            Expr::Plus(a, b) => {
                let a = self.rebuild(a, target, counter, op);
                Expr::plus(a, self.rebuild(b, target, counter, op))
            }
            Expr::Dot(a, b) => {
                let a = self.rebuild(a, target, counter, op);
                Expr::dot(a, self.rebuild(b, target, counter, op))
            }
            Expr::Par(a, b) => {
                let a = self.rebuild(a, target, counter, op);
                Expr::par(a, self.rebuild(b, target, counter, op))
            }
            Expr::Star(a) => Expr::star(self.rebuild(a, target, counter, op)),
        }
    }

    /// Rewrites by a law that holds in every pomset language model.
    fn apply_law(&mut self, e: &Expr) -> Expr {
        let c = |x: &std::sync::Arc<Expr>| (**x).clone();
        let generic = |rng: &mut ChaCha8Rng, e: &Expr| match rng.random_range(0..5) {
            0 => Expr::plus(e.clone(), e.clone()),
            1 => Expr::plus(Expr::Zero, e.clone()),
            2 => Expr::dot(Expr::One, e.clone()),
            3 => Expr::par(e.clone(), Expr::One),
            _ => Expr::dot(e.clone(), Expr::One),
        };
        let pick = self.rng.random_range(0..3);
        match (e, pick) {
            (Expr::Plus(a, b), 0) => Expr::plus(c(b), c(a)),
            (Expr::Par(a, b), 0) => Expr::par(c(b), c(a)),
            (Expr::Star(a), 0) => Expr::plus(Expr::One, Expr::dot(c(a), e.clone())),
            (Expr::Star(a), 1) => Expr::plus(Expr::One, Expr::dot(e.clone(), c(a))),
            (Expr::Dot(a, b), 0) => match (&**a, &**b) {
                (_, Expr::Plus(x, y)) => Expr::plus(Expr::dot(c(a), c(x)), Expr::dot(c(a), c(y))),
                (Expr::Plus(x, y), _) => Expr::plus(Expr::dot(c(x), c(b)), Expr::dot(c(y), c(b))),
                (Expr::Dot(x, y), _) => Expr::dot(c(x), Expr::dot(c(y), c(b))),
                _ => generic(&mut self.rng, e),
            },
            (Expr::Par(a, b), 1) => match (&**a, &**b) {
                (_, Expr::Plus(x, y)) => Expr::plus(Expr::par(c(a), c(x)), Expr::par(c(a), c(y))),
                (Expr::Par(x, y), _) => Expr::par(c(x), Expr::par(c(y), c(b))),
                _ => generic(&mut self.rng, e),
            },
            (Expr::Plus(a, b), 1) => match &**a {
                Expr::Plus(x, y) => Expr::plus(c(x), Expr::plus(c(y), c(b))),
                _ => Expr::plus(e.clone(), c(b)),
            },
            _ => generic(&mut self.rng, e),
        }
    }

    /// A small change that usually alters the language.
    fn mutate(&mut self, e: &Expr) -> Expr {
        let c = |x: &std::sync::Arc<Expr>| (**x).clone();
        match e {
            Expr::Dot(a, b) if self.rng.random_bool(0.5) => Expr::dot(c(b), c(a)),
            Expr::Dot(a, b) => Expr::par(c(a), c(b)),
            Expr::Par(a, b) => Expr::dot(c(a), c(b)),
            Expr::Star(a) if self.rng.random_bool(0.5) => Expr::dot(c(a), e.clone()),
            Expr::Star(a) => Expr::plus(Expr::One, c(a)),
            Expr::Plus(a, _) => c(a),
            Expr::Prim(_) => Expr::prim(self.letter()),
            Expr::Zero => Expr::One,
            Expr::One => Expr::Zero,
        }
    }

    /// A random fork-acyclic automaton with between 2 and `max_states`
    /// states, including nullary and unary forks and accepting fork
    /// targets.
    ///
    /// Each state gets a level; sequential edges and fork results never
    /// raise the level and fork targets lie strictly below, so no fork
    /// target can reach its forking state.
    pub fn pa(&mut self, max_states: usize) -> Pa {
        let n = self.rng.random_range(2..=max_states.max(2));
        let mut pa = Pa::new(self.letters.iter().cloned());
        let mut level = Vec::with_capacity(n);
        let qs: Vec<StateId> = (0..n)
            .map(|i| pa.add_state(&format!("q{i}")).expect("distinct names"))
            .collect();
        for (i, &q) in qs.iter().enumerate() {
            level.push(self.rng.random_range(0..3usize).min(i));
            pa.set_accepting(q, self.rng.random_ratio(2, 5));
        }
        let at_most = |lv: usize, level: &[usize]| -> Vec<StateId> {
            (0..n).filter(|&j| level[j] <= lv).map(|j| qs[j]).collect()
        };
        for i in 0..n {
            let same_or_lower = at_most(level[i], &level);
            for _ in 0..self.rng.random_range(0..=2) {
                let a = self.letter();
                let r = *same_or_lower.choose(&mut self.rng).expect("contains i");
                pa.add_delta(qs[i], a, r);
            }
            if level[i] == 0 {
                continue;
            }
            let lower = at_most(level[i] - 1, &level);
            for _ in 0..self.rng.random_range(0..=2) {
                let arity = match self.rng.random_range(0..10) {
                    0 => 0,
                    1 | 2 => 1,
                    3..=7 => 2,
                    _ => 3,
                };
                let fork: Multiset<StateId> = (0..arity)
                    .map(|_| *lower.choose(&mut self.rng).expect("level above zero"))
                    .collect();
                let r = *same_or_lower.choose(&mut self.rng).expect("contains i");
                pa.add_gamma(qs[i], fork, r);
            }
        }
        pa
    }
}

/// All subterms of `e`, including `e` itself, in pre-order.
pub fn subterms(e: &Expr) -> Vec<Expr> {
    let mut out = vec![e.clone()];
    match e {
        Expr::Zero | Expr::One | Expr::Prim(_) => {}
        Expr::Plus(a, b) | Expr::Dot(a, b) | Expr::Par(a, b) => {
            out.extend(subterms(a));
            out.extend(subterms(b));
        }
        Expr::Star(a) => out.extend(subterms(a)),
    }
    out
}

/// Whether a term is a sequential prime, i.e. empty-free and not a
/// sequential composition.
pub fn is_sequential_prime(u: &SpTerm) -> bool {
    matches!(u.shape(), Shape::Prim(_) | Shape::Par(_))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet(s: &[&str]) -> BTreeSet<Letter> {
        s.iter().map(|a| Letter::new(a).unwrap()).collect()
    }

    #[test]
    fn small_enumerations() {
        let one = enumerate_sp(&alphabet(&["a"]), 0);
        assert_eq!(one, BTreeSet::from([SpTerm::empty()]));
        let two: BTreeSet<String> = enumerate_sp(&alphabet(&["a"]), 2)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(two, ["1", "a", "a . a", "a || a"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let by_size = enumerate_by_size(&alphabet(&["a", "b"]), 5);
        for (k, terms) in by_size.iter().enumerate() {
            let set: BTreeSet<_> = terms.iter().collect();
            assert_eq!(set.len(), terms.len(), "size {k}");
            assert!(terms.iter().all(|t| t.size() == k));
        }
    }

    #[test]
    fn bounds_respect_ceiling() {
        assert!(Bound::new(7).is_ok());
        assert!(Bound::new(8).is_err());
        assert_eq!(Bound::with_ceiling(9, 10).unwrap().max_events(), 9);
    }

    #[test]
    fn oracle_equiv_examples() {
        let a = Expr::parse("a").unwrap();
        let aa = Expr::parse("a . a").unwrap();
        assert!(oracle_equiv(&a, &a, 3));
        assert!(!oracle_equiv(&a, &aa, 2));
        assert!(oracle_equiv(&a, &aa, 0));
    }

    #[test]
    fn corpus_is_reproducible_and_fork_acyclic() {
        let mut c1 = Corpus::new(7, 3);
        let mut c2 = Corpus::new(7, 3);
        for _ in 0..50 {
            let e = c1.expr(4);
            assert_eq!(e, c2.expr(4));
            assert!(e.depth() <= 4);
            assert!(e.letters().len() <= 3);
        }
        for _ in 0..50 {
            let pa = c1.pa(8);
            assert!(pa.num_states() <= 8);
            assert!(pa.is_fork_acyclic());
        }
    }
}
