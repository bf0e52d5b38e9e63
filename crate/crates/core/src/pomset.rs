//! Series-parallel pomsets in canonical form.
//!
//! Every series-parallel pomset has a unique representation as an
//! [`SpTerm`]: sequential composition is flattened into a list, parallel
//! composition into a multiset, and the empty pomset never occurs as a
//! proper subterm. Equality, ordering and hashing of terms therefore
//! coincide with isomorphism of the pomsets they denote.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::syntax::{self, Cursor, Token};

/// An action label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(name: &str) -> Result<Self> {
        if syntax::is_letter(name) {
            Ok(Letter(name.into()))
        } else {
            Err(Error::Syntax {
                position: 0,
                message: format!("`{name}` is not a letter"),
            })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Empty,
    Primitive,
    Sequential,
    Parallel,
}

/// Canonical shape of a term. Variants are ordered `Empty < Prim < Seq < Par`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Empty,
    Prim(Letter),
    /// At least two factors, none empty or sequential.
    Seq(Vec<SpTerm>),
    /// At least two factors, none empty or parallel.
    Par(Multiset<SpTerm>),
}

struct Node {
    shape: Shape,
    size: usize,
}

/// A series-parallel pomset. Cheap to clone.
#[derive(Clone)]
pub struct SpTerm(Arc<Node>);

impl PartialEq for SpTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.shape == other.0.shape
    }
}

impl Eq for SpTerm {}

impl PartialOrd for SpTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SpTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.shape.cmp(&other.0.shape)
    }
}

impl Hash for SpTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.shape.hash(state);
    }
}

impl SpTerm {
    fn from_shape(shape: Shape) -> Self {
        let size = match &shape {
            Shape::Empty => 0,
            Shape::Prim(_) => 1,
            Shape::Seq(fs) => fs.iter().map(SpTerm::size).sum(),
            Shape::Par(fs) => fs.iter().map(SpTerm::size).sum(),
        };
        SpTerm(Arc::new(Node { shape, size }))
    }

    pub fn empty() -> Self {
        Self::from_shape(Shape::Empty)
    }

    pub fn prim(a: Letter) -> Self {
        Self::from_shape(Shape::Prim(a))
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    /// Number of events.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn kind(&self) -> Kind {
        match self.shape() {
            Shape::Empty => Kind::Empty,
            Shape::Prim(_) => Kind::Primitive,
            Shape::Seq(_) => Kind::Sequential,
            Shape::Par(_) => Kind::Parallel,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.shape(), Shape::Empty)
    }

    /// `U · V`.
    pub fn seq(&self, other: &SpTerm) -> SpTerm {
        Self::seq_all([self.clone(), other.clone()])
    }

    /// `U ∥ V`.
    pub fn par(&self, other: &SpTerm) -> SpTerm {
        Self::par_all([self.clone(), other.clone()])
    }

    /// Sequential composition of any number of terms, left to right.
    pub fn seq_all(terms: impl IntoIterator<Item = SpTerm>) -> SpTerm {
        let mut factors = Vec::new();
        for t in terms {
            match t.shape() {
                Shape::Empty => {}
                Shape::Seq(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(t),
            }
        }
        match factors.len() {
            0 => SpTerm::empty(),
            1 => factors.pop().unwrap(),
            _ => Self::from_shape(Shape::Seq(factors)),
        }
    }

    /// Parallel composition of any number of terms.
    pub fn par_all(terms: impl IntoIterator<Item = SpTerm>) -> SpTerm {
        let mut factors = Multiset::new();
        for t in terms {
            match t.shape() {
                Shape::Empty => {}
                Shape::Par(fs) => {
                    for (f, n) in fs.entries() {
                        factors.insert_n(f.clone(), *n);
                    }
                }
                _ => factors.insert(t),
            }
        }
        match factors.len() {
            0 => SpTerm::empty(),
            1 => factors.iter().next().unwrap().clone(),
            _ => Self::from_shape(Shape::Par(factors)),
        }
    }

    /// The unique `V1, …, Vn` (each empty-free and not sequential) with
    /// `self = V1 · … · Vn`. Empty for the empty pomset.
    pub fn factorize_seq(&self) -> Vec<SpTerm> {
        match self.shape() {
            Shape::Empty => Vec::new(),
            Shape::Seq(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// The unique multiset of non-empty, non-parallel terms whose parallel
    /// composition is `self`.
    pub fn factorize_par(&self) -> Multiset<SpTerm> {
        match self.shape() {
            Shape::Empty => Multiset::new(),
            Shape::Par(fs) => fs.clone(),
            _ => Multiset::singleton(self.clone()),
        }
    }

    /// Letters occurring in the term.
    pub fn letters(&self) -> std::collections::BTreeSet<Letter> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut std::collections::BTreeSet<Letter>) {
        match self.shape() {
            Shape::Empty => {}
            Shape::Prim(a) => {
                out.insert(a.clone());
            }
            Shape::Seq(fs) => fs.iter().for_each(|f| f.collect_letters(out)),
            Shape::Par(fs) => fs.distinct().for_each(|f| f.collect_letters(out)),
        }
    }

    pub fn parse(src: &str) -> Result<SpTerm> {
        let mut cur = Cursor::new(src)?;
        let t = parse_par(&mut cur)?;
        cur.expect_end()?;
        Ok(t)
    }
}

fn parse_par(cur: &mut Cursor) -> Result<SpTerm> {
    let mut parts = vec![parse_seq(cur)?];
    while cur.eat(&Token::Par) {
        parts.push(parse_seq(cur)?);
    }
    Ok(SpTerm::par_all(parts))
}

fn parse_seq(cur: &mut Cursor) -> Result<SpTerm> {
    let mut parts = vec![parse_atom(cur)?];
    while cur.eat(&Token::Dot) {
        parts.push(parse_atom(cur)?);
    }
    Ok(SpTerm::seq_all(parts))
}

fn parse_atom(cur: &mut Cursor) -> Result<SpTerm> {
    match cur.peek() {
        Some(Token::One) => {
            cur.next();
            Ok(SpTerm::empty())
        }
        Some(Token::Letter(l)) => {
            let a = Letter(l.as_str().into());
            cur.next();
            Ok(SpTerm::prim(a))
        }
        Some(Token::Open) => {
            cur.next();
            let t = parse_par(cur)?;
            if !cur.eat(&Token::Close) {
                return Err(cur.unexpected("`)`"));
            }
            Ok(t)
        }
        _ => Err(cur.unexpected("`1`, a letter or `(`")),
    }
}

impl fmt::Display for SpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(t: &SpTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.shape() {
                Shape::Seq(_) | Shape::Par(_) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            }
        }
        match self.shape() {
            Shape::Empty => f.write_str("1"),
            Shape::Prim(a) => write!(f, "{a}"),
            Shape::Seq(fs) => {
                for (i, t) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" . ")?;
                    }
                    child(t, f)?;
                }
                Ok(())
            }
            Shape::Par(fs) => {
                for (i, t) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    child(t, f)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for SpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
