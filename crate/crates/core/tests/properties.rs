mod common;

use std::collections::BTreeSet;

use common::*;
use pomset_automata::kleene::compile;
use pomset_automata::multiset::Multiset;
use pomset_automata::oracle::{enumerate_by_size, enumerate_sp, pa_lang_up_to, pa_langs_up_to, Corpus};
use pomset_automata::pa::{leadsto, support_analysis, Runner};
use pomset_automata::srexpr::{lang_up_to, simplify};
use pomset_automata::{Expr, Kind, Letter, SpTerm};
use proptest::prelude::*;

fn alphabet(k: usize) -> BTreeSet<Letter> {
    ["a", "b", "c"][..k].iter().map(|s| letter(s)).collect()
}

fn sp_term() -> impl Strategy<Value = SpTerm> {
    let leaf = prop_oneof![
        1 => Just(SpTerm::empty()),
        4 => prop::sample::select(vec!["a", "b", "c"]).prop_map(|s| SpTerm::prim(letter(s))),
    ];
    leaf.prop_recursive(4, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(SpTerm::seq_all),
            prop::collection::vec(inner, 2..4).prop_map(SpTerm::par_all),
        ]
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        1 => Just(Expr::Zero),
        1 => Just(Expr::One),
        4 => prop::sample::select(vec!["a", "b", "c"]).prop_map(|s| Expr::prim(letter(s))),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(e, f)| Expr::plus(e, f)),
            (inner.clone(), inner.clone()).prop_map(|(e, f)| Expr::dot(e, f)),
            (inner.clone(), inner.clone()).prop_map(|(e, f)| Expr::par(e, f)),
            inner.prop_map(Expr::star),
        ]
    })
}

fn bounded_product(us: &BTreeSet<SpTerm>, vs: &BTreeSet<SpTerm>, n: usize, par: bool) -> BTreeSet<SpTerm> {
    let mut out = BTreeSet::new();
    for u in us {
        for v in vs {
            if u.size() + v.size() <= n {
                out.insert(if par { u.par(v) } else { u.seq(v) });
            }
        }
    }
    out
}

#[test]
fn enumeration_counts_match_the_recurrence() {
    for k in 1..=3 {
        let by_size = enumerate_by_size(&alphabet(k), 5);
        for (n, terms) in by_size.iter().enumerate().skip(1) {
            assert_eq!(terms.len() as u128, count_sp(k as u128, n), "k={k} n={n}");
        }
    }
    // Unlabelled series-parallel posets: 1, 2, 5, 15, 48, 167.
    let counts: Vec<u128> = (1..=6).map(|n| count_sp(1, n)).collect();
    assert_eq!(counts, [1, 2, 5, 15, 48, 167]);
}

#[test]
fn enumerated_terms_have_exactly_one_kind_and_obey_the_laws() {
    let all: Vec<SpTerm> = enumerate_sp(&alphabet(2), 4).into_iter().collect();
    let e = SpTerm::empty();
    for u in &all {
        let kinds = [Kind::Empty, Kind::Primitive, Kind::Sequential, Kind::Parallel];
        assert_eq!(kinds.iter().filter(|k| u.kind() == **k).count(), 1);
        assert_eq!(&u.seq(&e), u);
        assert_eq!(&e.par(u), u);
        assert_eq!(&SpTerm::seq_all(u.factorize_seq()), u);
        assert_eq!(&SpTerm::par_all(u.factorize_par().iter().cloned()), u);
    }
    let small: Vec<&SpTerm> = all.iter().filter(|u| u.size() <= 2).collect();
    for u in &small {
        for v in &small {
            assert_eq!(u.par(v), v.par(u));
            assert_eq!(u.cmp(v) == std::cmp::Ordering::Equal, u == v);
            for w in &small {
                assert_eq!(u.seq(v).seq(w), u.seq(&v.seq(w)));
                assert_eq!(u.par(v).par(w), u.par(&v.par(w)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pomset_text_round_trips(u in sp_term()) {
        let printed = u.to_string();
        prop_assert_eq!(SpTerm::parse(&printed).unwrap(), u);
    }

    #[test]
    fn factorizations_recompose(u in sp_term()) {
        let seq = u.factorize_seq();
        prop_assert_eq!(seq.is_empty(), u.is_empty());
        prop_assert!(seq.iter().all(|f| !matches!(f.kind(), Kind::Sequential | Kind::Empty)));
        prop_assert_eq!(SpTerm::seq_all(seq), u.clone());
        let par = u.factorize_par();
        prop_assert!(par.iter().all(|f| !matches!(f.kind(), Kind::Parallel | Kind::Empty)));
        prop_assert_eq!(SpTerm::par_all(par.iter().cloned()), u);
    }

    #[test]
    fn composition_laws(u in sp_term(), v in sp_term(), w in sp_term()) {
        prop_assert_eq!(u.seq(&v).seq(&w), u.seq(&v.seq(&w)));
        prop_assert_eq!(u.par(&v).par(&w), u.par(&v.par(&w)));
        prop_assert_eq!(u.par(&v), v.par(&u));
        prop_assert_eq!(u.seq(&v).size(), u.size() + v.size());
    }

    #[test]
    fn ordering_is_total_and_consistent(u in sp_term(), v in sp_term(), w in sp_term()) {
        prop_assert_eq!(u.cmp(&v), v.cmp(&u).reverse());
        prop_assert_eq!(u.cmp(&v) == std::cmp::Ordering::Equal, u == v);
        if u <= v && v <= w {
            prop_assert!(u <= w);
        }
    }

    #[test]
    fn multiset_laws(xs in prop::collection::vec(0u8..4, 0..6), ys in prop::collection::vec(0u8..4, 0..6)) {
        let a: Multiset<u8> = xs.iter().copied().collect();
        let b: Multiset<u8> = ys.iter().copied().collect();
        let s = a.sum(&b);
        prop_assert_eq!(s.len(), a.len() + b.len());
        prop_assert_eq!(s.clone(), b.sum(&a));
        prop_assert!(a.is_submultiset_of(&s));
        prop_assert_eq!(s.difference(&a), Some(b.clone()));
        let subs = a.submultisets();
        let expected: usize = a.entries().iter().map(|(_, m)| m + 1).product();
        prop_assert_eq!(subs.len(), expected);
        prop_assert!(subs.iter().all(|x| x.is_submultiset_of(&a)));
    }

    #[test]
    fn expr_text_round_trips(e in expr()) {
        prop_assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn nullable_matches_the_empty_pomset(e in expr()) {
        prop_assert_eq!(e.nullable(), lang_up_to(&e, 0).contains(&SpTerm::empty()));
    }

    #[test]
    fn bounded_languages_grow_with_the_bound(e in expr()) {
        let l3 = lang_up_to(&e, 3);
        let l4 = lang_up_to(&e, 4);
        prop_assert!(l3.is_subset(&l4));
        prop_assert!(l4.iter().all(|u| u.size() <= 4));
        prop_assert_eq!(l3, l4.into_iter().filter(|u| u.size() <= 3).collect::<BTreeSet<_>>());
    }

    #[test]
    fn languages_are_homomorphic(e in expr(), f in expr()) {
        let n = 4;
        let (le, lf) = (lang_up_to(&e, n), lang_up_to(&f, n));
        let union: BTreeSet<_> = le.union(&lf).cloned().collect();
        prop_assert_eq!(lang_up_to(&Expr::plus(e.clone(), f.clone()), n), union);
        prop_assert_eq!(lang_up_to(&Expr::dot(e.clone(), f.clone()), n), bounded_product(&le, &lf, n, false));
        prop_assert_eq!(lang_up_to(&Expr::par(e, f), n), bounded_product(&le, &lf, n, true));
    }

    #[test]
    fn simplify_preserves_meaning(e in expr()) {
        let s = simplify(&e);
        prop_assert_eq!(lang_up_to(&s, 4), lang_up_to(&e, 4));
        prop_assert_eq!(s.nullable(), e.nullable());
        prop_assert!(s.node_count() <= e.node_count());
    }

    #[test]
    fn compiled_expressions_accept_their_language(e in expr()) {
        let (pa, ids) = compile(std::slice::from_ref(&e));
        prop_assert!(pa.is_fork_acyclic());
        prop_assert_eq!(pa_lang_up_to(&pa, ids[&e], 4).unwrap(), lang_up_to(&e, 4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leadsto_matches_small_step_saturation(seed in any::<u64>()) {
        let pa = Corpus::new(seed, 2).pa(7);
        prop_assert_eq!(leadsto(&pa).pairs(), small_step_leadsto(&pa));
    }

    #[test]
    fn support_is_a_preorder_compatible_with_depth(seed in any::<u64>()) {
        let pa = Corpus::new(seed, 2).pa(8);
        prop_assert!(pa.is_fork_acyclic());
        let sa = support_analysis(&pa);
        let qs: Vec<_> = pa.states().collect();
        for &x in &qs {
            prop_assert!(sa.supports(x, x));
            for &y in &qs {
                if x != y && sa.supports(x, y) && sa.supports(y, x) {
                    prop_assert_eq!(sa.scc_index(x), sa.scc_index(y));
                }
                if sa.strictly_supports(x, y) {
                    prop_assert!(sa.depth_of(x) < sa.depth_of(y));
                }
                for &z in &qs {
                    if sa.supports(x, y) && sa.supports(y, z) {
                        prop_assert!(sa.supports(x, z));
                    }
                }
            }
            for s in pa.successors(x) {
                prop_assert!(sa.supports(s, x));
            }
        }
        prop_assert!(qs.iter().all(|&x| sa.depth_of(x) <= sa.depth()));
    }

    #[test]
    fn restriction_to_a_closure_preserves_languages(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let pa = Corpus::new(seed, 2).pa(7);
        let qs: Vec<_> = pa.states().collect();
        let root = qs[pick.index(qs.len())];
        let keep = pa.support_closure([root]);
        let (small, old) = pa.restrict_with_map(&keep).unwrap();
        prop_assert_eq!(pa.support_closure(keep.iter().copied()), keep.clone());
        let new_root = small.lookup(pa.name(root)).unwrap();
        prop_assert_eq!(old[new_root.index()], root);
        prop_assert_eq!(pa_lang_up_to(&small, new_root, 4).unwrap(), pa_lang_up_to(&pa, root, 4).unwrap());
    }

    #[test]
    fn membership_matches_rule_semantics(seed in any::<u64>()) {
        let pa = Corpus::new(seed, 2).pa(5);
        let expected = rule_semantics(&pa, 3);
        let qs: Vec<_> = pa.states().collect();
        let got = pa_langs_up_to(&pa, &qs, 3).unwrap();
        for s in pa.states() {
            prop_assert_eq!(&got[&s], &expected[s.index()], "state {}", pa.name(s));
        }
    }

    #[test]
    fn fast_path_agrees_with_general_runs(seed in any::<u64>()) {
        let mut corpus = Corpus::new(seed, 2);
        let e = corpus.expr(3);
        let (pa, _) = compile(&[e]);
        let Ok((ws, _)) = pomset_automata::wellstruct::well_structure(&pa, &pa.states().take(1).collect()) else {
            return Err(TestCaseError::fail("well_structure failed"));
        };
        let mut fast = Runner::new(&ws).unwrap();
        let mut general = Runner::general(&ws).unwrap();
        prop_assert!(fast.uses_fast_path());
        for u in enumerate_sp(ws.alphabet(), 4) {
            for s in ws.states() {
                prop_assert_eq!(fast.accepts(s, &u), general.accepts(s, &u));
            }
        }
    }

    #[test]
    fn io_round_trips(seed in any::<u64>()) {
        let pa = Corpus::new(seed, 3).pa(8);
        let text = pa.to_json();
        let back = pomset_automata::Pa::from_json(&text).unwrap();
        prop_assert!(back.same_as(&pa));
        prop_assert_eq!(back.to_json(), text);
    }
}
