//! Translations between expressions and automata, and the decision
//! procedure for expression equivalence built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::equiv::state_equiv;
use crate::error::Result;
use crate::multiset::Multiset;
use crate::pa::{Pa, StateId};
use crate::pomset::Letter;
use crate::srexpr::{simp_dot, simp_par, simp_plus, simp_star, simplify, Expr};
use crate::wellstruct::well_structure;

/// Guards against runaway closures; real supports are far smaller.
const MAX_SUPPORT: usize = 200_000;

/// Parallel transitions out of an expression: fork into the multiset,
/// continue in any of the results.
pub type GammaEntries = BTreeMap<Multiset<Expr>, BTreeSet<Expr>>;

fn postfix(ts: BTreeSet<Expr>, f: &Expr) -> BTreeSet<Expr> {
    ts.into_iter().map(|t| Expr::dot(t, f.clone())).collect()
}

/// Expressions reached from `e` by reading `a`.
pub fn delta_derivative(e: &Expr, a: &Letter) -> BTreeSet<Expr> {
    match e {
        Expr::Zero | Expr::One | Expr::Par(..) => BTreeSet::new(),
        Expr::Prim(b) => {
            if a == b {
                BTreeSet::from([Expr::One])
            } else {
                BTreeSet::new()
            }
        }
        Expr::Plus(l, r) => {
            let mut out = delta_derivative(l, a);
            out.extend(delta_derivative(r, a));
            out
        }
        Expr::Dot(l, r) => {
            let mut out = postfix(delta_derivative(l, a), r);
            if l.nullable() {
                out.extend(delta_derivative(r, a));
            }
            out
        }
        Expr::Star(l) => postfix(delta_derivative(l, a), e),
    }
}

fn merge(into: &mut GammaEntries, from: GammaEntries) {
    for (fork, rs) in from {
        into.entry(fork).or_default().extend(rs);
    }
}

/// Forks available from `e`, each with its continuations.
pub fn gamma_derivative(e: &Expr) -> GammaEntries {
    match e {
        Expr::Zero | Expr::One | Expr::Prim(_) => GammaEntries::new(),
        Expr::Par(l, r) => GammaEntries::from([(
            [(**l).clone(), (**r).clone()].into_iter().collect(),
            BTreeSet::from([Expr::One]),
        )]),
        Expr::Plus(l, r) => {
            let mut out = gamma_derivative(l);
            merge(&mut out, gamma_derivative(r));
            out
        }
        Expr::Dot(l, r) => {
            let mut out: GammaEntries = gamma_derivative(l)
                .into_iter()
                .map(|(fork, rs)| (fork, postfix(rs, r)))
                .collect();
            if l.nullable() {
                merge(&mut out, gamma_derivative(r));
            }
            out
        }
        Expr::Star(l) => gamma_derivative(l)
            .into_iter()
            .map(|(fork, rs)| (fork, postfix(rs, e)))
            .collect(),
    }
}

/// Expressions reachable from `e` through derivatives and fork targets.
pub fn expr_support(e: &Expr) -> BTreeSet<Expr> {
    let (pa, _) = compile(std::slice::from_ref(e));
    pa.states().map(|q| Expr::parse(pa.name(q)).expect("state names are printed expressions")).collect()
}

/// The automaton whose states are the expressions reachable from `es`,
/// named by their printed form; a state accepts exactly the language of
/// its expression.
pub fn compile(es: &[Expr]) -> (Pa, BTreeMap<Expr, StateId>) {
    let alphabet: BTreeSet<Letter> = es.iter().flat_map(Expr::letters).collect();
    let mut pa = Pa::new(alphabet.iter().cloned());
    let mut ids: HashMap<Expr, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |e: &Expr, pa: &mut Pa, queue: &mut VecDeque<Expr>| -> StateId {
        if let Some(&q) = ids.get(e) {
            return q;
        }
        assert!(pa.num_states() < MAX_SUPPORT, "derivative closure does not terminate");
        let q = pa.add_state(&e.to_string()).expect("printing is injective");
        pa.set_accepting(q, e.nullable());
        ids.insert(e.clone(), q);
        queue.push_back(e.clone());
        q
    };
    let mut roots = BTreeMap::new();
    for e in es {
        roots.insert(e.clone(), intern(e, &mut pa, &mut queue));
    }
    while let Some(e) = queue.pop_front() {
        let q = intern(&e, &mut pa, &mut queue);
        for a in &alphabet {
            for t in delta_derivative(&e, a) {
                let r = intern(&t, &mut pa, &mut queue);
                pa.add_delta(q, a.clone(), r);
            }
        }
        for (fork, rs) in gamma_derivative(&e) {
            let targets: Multiset<StateId> = fork.map(|t| intern(t, &mut pa, &mut queue));
            for t in rs {
                let r = intern(&t, &mut pa, &mut queue);
                pa.add_gamma(q, targets.clone(), r);
            }
        }
    }
    (pa, roots)
}

/// An expression denoting the language of `q`, built by eliminating states
/// one strongly connected component of the support at a time.
pub fn extract(pa: &Pa, q: StateId) -> Result<Expr> {
    let sa = pa.require_fork_acyclic()?;
    let needed = pa.support_closure([q]);
    let mut exprs: HashMap<StateId, Expr> = HashMap::new();
    for comp in sa.components() {
        if !comp.iter().any(|p| needed.contains(p)) {
            continue;
        }
        for (p, e) in extract_component(pa, comp, &exprs) {
            exprs.insert(p, e);
        }
    }
    Ok(simplify(&exprs[&q]))
}

fn extract_component(pa: &Pa, comp: &[StateId], lower: &HashMap<StateId, Expr>) -> Vec<(StateId, Expr)> {
    let mut inner: Vec<StateId> = comp.to_vec();
    inner.sort_by(|x, y| pa.name(*x).cmp(pa.name(*y)));
    let inside: BTreeSet<StateId> = inner.iter().copied().collect();
    let mut outside = BTreeSet::new();
    for &p in &inner {
        for rs in pa.deltas(p).values().chain(pa.forks(p).values()) {
            outside.extend(rs.iter().filter(|r| !inside.contains(r)).copied());
        }
    }
    let cols: Vec<StateId> = inner.iter().chain(outside.iter()).copied().collect();
    let col: HashMap<StateId, usize> = cols.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = inner.len();

    // m[i][j]: runs from inner[i] to cols[j] through already eliminated
    // states only; initially single unit runs.
    let mut m = vec![vec![Expr::Zero; cols.len()]; n];
    for (i, &p) in inner.iter().enumerate() {
        for (a, rs) in pa.deltas(p) {
            for r in rs {
                let j = col[r];
                m[i][j] = simp_plus(m[i][j].clone(), Expr::prim(a.clone()));
            }
        }
        for (fork, rs) in pa.forks(p) {
            let fe = fork
                .iter()
                .fold(Expr::One, |acc, t| simp_par(acc, lower[t].clone()));
            for r in rs {
                let j = col[r];
                m[i][j] = simp_plus(m[i][j].clone(), fe.clone());
            }
        }
    }
    for k in 0..n {
        let loop_k = simp_star(m[k][k].clone());
        let row_k = m[k].clone();
        for row in m.iter_mut() {
            let via = row[k].clone();
            if matches!(via, Expr::Zero) {
                continue;
            }
            let pre = simp_dot(via, loop_k.clone());
            for (j, cell) in row.iter_mut().enumerate() {
                if matches!(row_k[j], Expr::Zero) {
                    continue;
                }
                let path = simp_dot(pre.clone(), row_k[j].clone());
                *cell = simp_plus(cell.clone(), path);
            }
        }
    }
    inner
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut e = if pa.is_accepting(p) { Expr::One } else { Expr::Zero };
            for (j, &r) in cols.iter().enumerate() {
                if matches!(m[i][j], Expr::Zero) {
                    continue;
                }
                if j < n {
                    if pa.is_accepting(r) {
                        e = simp_plus(e, m[i][j].clone());
                    }
                } else {
                    e = simp_plus(e, simp_dot(m[i][j].clone(), lower[&r].clone()));
                }
            }
            (p, e)
        })
        .collect()
}

/// Whether `e` and `f` denote the same pomset language.
pub fn expr_equiv(e: &Expr, f: &Expr) -> Result<bool> {
    if e == f {
        return Ok(true);
    }
    let (pa, roots) = compile(&[e.clone(), f.clone()]);
    let tracked = BTreeSet::from([roots[e], roots[f]]);
    let (ws, map) = well_structure(&pa, &tracked)?;
    state_equiv(&ws, map[&roots[e]], map[&roots[f]])
}
