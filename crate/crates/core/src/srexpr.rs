//! Series-rational expressions: syntax, bounded semantics, nullability.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::pomset::{Letter, SpTerm};
use crate::syntax::{Cursor, Token};

/// A series-rational expression. Equality is structural: `a + b` and
/// `b + a` are different expressions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Zero,
    One,
    Prim(Letter),
    Plus(Arc<Expr>, Arc<Expr>),
    Dot(Arc<Expr>, Arc<Expr>),
    Par(Arc<Expr>, Arc<Expr>),
    Star(Arc<Expr>),
}

impl Expr {
    pub fn prim(a: Letter) -> Expr {
        Expr::Prim(a)
    }

    pub fn plus(e: Expr, f: Expr) -> Expr {
        Expr::Plus(Arc::new(e), Arc::new(f))
    }

    pub fn dot(e: Expr, f: Expr) -> Expr {
        Expr::Dot(Arc::new(e), Arc::new(f))
    }

    pub fn par(e: Expr, f: Expr) -> Expr {
        Expr::Par(Arc::new(e), Arc::new(f))
    }

    pub fn star(e: Expr) -> Expr {
        Expr::Star(Arc::new(e))
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut cur = Cursor::new(src)?;
        let e = parse_alt(&mut cur)?;
        cur.expect_end()?;
        Ok(e)
    }

    /// Whether the expression denotes a language containing the empty pomset.
    pub fn nullable(&self) -> bool {
        match self {
            Expr::Zero | Expr::Prim(_) => false,
            Expr::One | Expr::Star(_) => true,
            Expr::Plus(e, f) => e.nullable() || f.nullable(),
            Expr::Dot(e, f) | Expr::Par(e, f) => e.nullable() && f.nullable(),
        }
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<Letter>) {
        match self {
            Expr::Zero | Expr::One => {}
            Expr::Prim(a) => {
                out.insert(a.clone());
            }
            Expr::Plus(e, f) | Expr::Dot(e, f) | Expr::Par(e, f) => {
                e.collect_letters(out);
                f.collect_letters(out);
            }
            Expr::Star(e) => e.collect_letters(out),
        }
    }

    /// Height of the syntax tree; constants and letters have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Zero | Expr::One | Expr::Prim(_) => 0,
            Expr::Plus(e, f) | Expr::Dot(e, f) | Expr::Par(e, f) => 1 + e.depth().max(f.depth()),
            Expr::Star(e) => 1 + e.depth(),
        }
    }

    /// Number of syntax nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Zero | Expr::One | Expr::Prim(_) => 1,
            Expr::Plus(e, f) | Expr::Dot(e, f) | Expr::Par(e, f) => {
                1 + e.node_count() + f.node_count()
            }
            Expr::Star(e) => 1 + e.node_count(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Plus(..) => 1,
            Expr::Par(..) => 2,
            Expr::Dot(..) => 3,
            Expr::Star(_) => 4,
            _ => 5,
        }
    }
}

/// All pomsets of at most `n` events denoted by `e`.
pub fn lang_up_to(e: &Expr, n: usize) -> BTreeSet<SpTerm> {
    let mut memo = HashMap::new();
    lang_memo(e, n, &mut memo)
}

fn lang_memo(e: &Expr, n: usize, memo: &mut HashMap<Expr, BTreeSet<SpTerm>>) -> BTreeSet<SpTerm> {
    if let Some(l) = memo.get(e) {
        return l.clone();
    }
    let out = match e {
        Expr::Zero => BTreeSet::new(),
        Expr::One => BTreeSet::from([SpTerm::empty()]),
        Expr::Prim(a) => {
            if n >= 1 {
                BTreeSet::from([SpTerm::prim(a.clone())])
            } else {
                BTreeSet::new()
            }
        }
        Expr::Plus(e, f) => {
            let mut l = lang_memo(e, n, memo);
            l.extend(lang_memo(f, n, memo));
            l
        }
        Expr::Dot(e, f) => {
            let l = lang_memo(e, n, memo);
            let r = lang_memo(f, n, memo);
            product(&l, &r, n, SpTerm::seq)
        }
        Expr::Par(e, f) => {
            let l = lang_memo(e, n, memo);
            let r = lang_memo(f, n, memo);
            product(&l, &r, n, SpTerm::par)
        }
        Expr::Star(e) => {
            let body = lang_memo(e, n, memo);
            let mut acc = BTreeSet::from([SpTerm::empty()]);
            loop {
                let next = product(&body, &acc, n, SpTerm::seq);
                let before = acc.len();
                acc.extend(next);
                if acc.len() == before {
                    break;
                }
            }
            acc
        }
    };
    memo.insert(e.clone(), out.clone());
    out
}

fn product(
    l: &BTreeSet<SpTerm>,
    r: &BTreeSet<SpTerm>,
    n: usize,
    op: impl Fn(&SpTerm, &SpTerm) -> SpTerm,
) -> BTreeSet<SpTerm> {
    let mut out = BTreeSet::new();
    for u in l {
        for v in r {
            if u.size() + v.size() <= n {
                out.insert(op(u, v));
            }
        }
    }
    out
}

/// Applies the unit, zero and idempotence laws bottom-up and nests
/// products to the left. Never changes the denoted language.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Zero | Expr::One | Expr::Prim(_) => e.clone(),
        Expr::Plus(a, b) => simp_plus(simplify(a), simplify(b)),
        Expr::Dot(a, b) => simp_dot(simplify(a), simplify(b)),
        Expr::Par(a, b) => simp_par(simplify(a), simplify(b)),
        Expr::Star(a) => simp_star(simplify(a)),
    }
}

fn summands(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Plus(a, b) => {
            summands(a, out);
            summands(b, out);
        }
        Expr::Zero => {}
        _ => {
            if !out.contains(e) {
                out.push(e.clone());
            }
        }
    }
}

/// `e + f` with zero summands and repeated summands dropped; the result is
/// a left-nested sum in first-occurrence order.
pub(crate) fn simp_plus(e: Expr, f: Expr) -> Expr {
    let mut parts = Vec::new();
    summands(&e, &mut parts);
    summands(&f, &mut parts);
    let mut it = parts.into_iter();
    match it.next() {
        None => Expr::Zero,
        Some(first) => it.fold(first, Expr::plus),
    }
}

pub(crate) fn simp_dot(e: Expr, f: Expr) -> Expr {
    match (&e, &f) {
        (Expr::Zero, _) | (_, Expr::Zero) => Expr::Zero,
        (Expr::One, _) => f,
        (_, Expr::One) => e,
        (_, Expr::Dot(f1, f2)) => Expr::dot(simp_dot(e, f1.as_ref().clone()), f2.as_ref().clone()),
        _ => Expr::dot(e, f),
    }
}

pub(crate) fn simp_par(e: Expr, f: Expr) -> Expr {
    match (&e, &f) {
        (Expr::Zero, _) | (_, Expr::Zero) => Expr::Zero,
        (Expr::One, _) => f,
        (_, Expr::One) => e,
        (_, Expr::Par(f1, f2)) => Expr::par(simp_par(e, f1.as_ref().clone()), f2.as_ref().clone()),
        _ => Expr::par(e, f),
    }
}

pub(crate) fn simp_star(e: Expr) -> Expr {
    match e {
        Expr::Zero | Expr::One => Expr::One,
        Expr::Star(_) => e,
        _ => Expr::star(e),
    }
}

fn parse_alt(cur: &mut Cursor) -> Result<Expr> {
    let mut e = parse_par(cur)?;
    while cur.eat(&Token::Plus) {
        e = Expr::plus(e, parse_par(cur)?);
    }
    Ok(e)
}

fn parse_par(cur: &mut Cursor) -> Result<Expr> {
    let mut e = parse_seq(cur)?;
    while cur.eat(&Token::Par) {
        e = Expr::par(e, parse_seq(cur)?);
    }
    Ok(e)
}

fn parse_seq(cur: &mut Cursor) -> Result<Expr> {
    let mut e = parse_star(cur)?;
    while cur.eat(&Token::Dot) {
        e = Expr::dot(e, parse_star(cur)?);
    }
    Ok(e)
}

fn parse_star(cur: &mut Cursor) -> Result<Expr> {
    let mut e = parse_atom(cur)?;
    while cur.eat(&Token::Star) {
        e = Expr::star(e);
    }
    Ok(e)
}

fn parse_atom(cur: &mut Cursor) -> Result<Expr> {
    match cur.peek().cloned() {
        Some(Token::Zero) => {
            cur.next();
            Ok(Expr::Zero)
        }
        Some(Token::One) => {
            cur.next();
            Ok(Expr::One)
        }
        Some(Token::Letter(l)) => {
            cur.next();
            Ok(Expr::Prim(Letter::new(&l)?))
        }
        Some(Token::Open) => {
            cur.next();
            let e = parse_alt(cur)?;
            if !cur.eat(&Token::Close) {
                return Err(cur.unexpected("`)`"));
            }
            Ok(e)
        }
        _ => Err(cur.unexpected("`0`, `1`, a letter or `(`")),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        fn binary(l: &Expr, op: &str, r: &Expr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            // Operators associate to the left, so a right operand of equal
            // precedence needs parentheses.
            operand(l, prec, f)?;
            f.write_str(op)?;
            operand(r, prec + 1, f)
        }
        match self {
            Expr::Zero => f.write_str("0"),
            Expr::One => f.write_str("1"),
            Expr::Prim(a) => write!(f, "{a}"),
            Expr::Plus(l, r) => binary(l, " + ", r, 1, f),
            Expr::Par(l, r) => binary(l, " || ", r, 2, f),
            Expr::Dot(l, r) => binary(l, " . ", r, 3, f),
            Expr::Star(e) => {
                operand(e, 4, f)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    fn pomsets(items: &[&str]) -> BTreeSet<SpTerm> {
        items.iter().map(|s| SpTerm::parse(s).unwrap()).collect()
    }

    #[test]
    fn precedence_is_star_dot_par_plus() {
        let a = Expr::prim(l("a"));
        let b = Expr::prim(l("b"));
        let c = Expr::prim(l("c"));
        assert_eq!(e("a . b* || c"), Expr::par(Expr::dot(a.clone(), Expr::star(b.clone())), c.clone()));
        assert_eq!(e("a + b || c"), Expr::plus(a.clone(), Expr::par(b.clone(), c.clone())));
        assert_eq!(e("0 + 1"), Expr::plus(Expr::Zero, Expr::One));
        assert_eq!(e("a**"), Expr::star(Expr::star(a)));
    }

    #[test]
    fn printing_round_trips() {
        assert_eq!(e("((a))").to_string(), "a");
        for s in [
            "a . b* || c",
            "a + (b + c)",
            "a + b + c",
            "a . (b . c)",
            "(a || b)*",
            "(a . b)* . c",
            "a || (b || c)",
            "(a + 1) . (b || 0)",
            "foo_1 . bar*",
        ] {
            let parsed = e(s);
            assert_eq!(parsed.to_string(), s);
            assert_eq!(e(&parsed.to_string()), parsed);
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        assert!(matches!(Expr::parse("a +"), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(Expr::parse("(a . b"), Err(Error::Syntax { position: 6, .. })));
        assert!(matches!(Expr::parse("a b"), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(Expr::parse("*"), Err(Error::Syntax { position: 0, .. })));
    }

    #[test]
    fn nullability() {
        assert!(e("1").nullable());
        assert!(e("(a . b)*").nullable());
        assert!(!e("a . b").nullable());
        assert!(e("a* || (1 + b)").nullable());
        assert!(!e("a* || b").nullable());
        assert!(!e("0").nullable());
        assert!(!lang_up_to(&e("a . b"), 2).contains(&SpTerm::empty()));
    }

    #[test]
    fn bounded_languages() {
        assert!(lang_up_to(&e("0"), 5).is_empty());
        assert_eq!(lang_up_to(&e("a*"), 2), pomsets(&["1", "a", "a . a"]));
        assert_eq!(lang_up_to(&e("a . (b || c) . a"), 4), pomsets(&["a . (b || c) . a"]));
        assert!(lang_up_to(&e("a . (b || c) . a"), 3).is_empty());
        assert_eq!(
            lang_up_to(&e("(a || b)*"), 4),
            pomsets(&["1", "a || b", "(a || b) . (a || b)"])
        );
        assert_eq!(lang_up_to(&e("(1 + a)*"), 1), pomsets(&["1", "a"]));
    }

    #[test]
    fn simplification_rules() {
        assert_eq!(simplify(&e("a + 0")), e("a"));
        assert_eq!(simplify(&Expr::dot(Expr::One, Expr::dot(e("b"), Expr::One))), e("b"));
        assert_eq!(simplify(&e("0 . a + b . 0")), Expr::Zero);
        assert_eq!(simplify(&e("(a || 1) + 0*")), e("a + 1"));
        assert_eq!(simplify(&e("a + (b + a) + 1*")), e("a + b + 1"));
        assert_eq!(simplify(&e("(a + 0)**")), e("a*"));
    }

    #[test]
    fn depth_and_letters() {
        assert_eq!(e("a").depth(), 0);
        assert_eq!(e("(a + b) . c*").depth(), 2);
        assert_eq!(e("(a + b) . c*").letters(), [l("a"), l("b"), l("c")].into_iter().collect());
    }
}
