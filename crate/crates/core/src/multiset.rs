//! Finite multisets in canonical form.

use std::fmt;

/// A finite multiset, stored as a sorted list of distinct elements with
/// positive multiplicities. Two multisets are equal iff their canonical
/// forms are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset<T> {
    entries: Vec<(T, usize)>,
}

impl<T> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { entries: Vec::new() }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: T) -> Self {
        Multiset { entries: vec![(x, 1)] }
    }

    pub fn insert(&mut self, x: T) {
        self.insert_n(x, 1);
    }

    pub fn insert_n(&mut self, x: T, n: usize) {
        if n == 0 {
            return;
        }
        match self.entries.binary_search_by(|(y, _)| y.cmp(&x)) {
            Ok(i) => self.entries[i].1 += n,
            Err(i) => self.entries.insert(i, (x, n)),
        }
    }

    /// Total number of elements, counting multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn multiplicity(&self, x: &T) -> usize {
        match self.entries.binary_search_by(|(y, _)| y.cmp(x)) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        self.multiplicity(x) > 0
    }

    /// Distinct elements with their multiplicities, in ascending order.
    pub fn entries(&self) -> &[(T, usize)] {
        &self.entries
    }

    /// Distinct elements in ascending order.
    pub fn distinct(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(x, _)| x)
    }

    /// All elements in ascending order, repeated according to multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries
            .iter()
            .flat_map(|(x, n)| std::iter::repeat_n(x, *n))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, n) in &other.entries {
            out.insert_n(x.clone(), *n);
        }
        out
    }

    /// Removes one occurrence of `x`; `None` if `x` does not occur.
    pub fn remove_one(&self, x: &T) -> Option<Self> {
        let i = self.entries.binary_search_by(|(y, _)| y.cmp(x)).ok()?;
        let mut out = self.clone();
        if out.entries[i].1 == 1 {
            out.entries.remove(i);
        } else {
            out.entries[i].1 -= 1;
        }
        Some(out)
    }

    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        self.entries
            .iter()
            .all(|(x, n)| other.multiplicity(x) >= *n)
    }

    /// `self - other`, defined only when `other` is a sub-multiset of `self`.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        if !other.is_submultiset_of(self) {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, n)| {
                let left = n - other.multiplicity(x);
                (left > 0).then(|| (x.clone(), left))
            })
            .collect();
        Some(Multiset { entries })
    }

    /// Every sub-multiset, each exactly once, including the empty one and
    /// `self`.
    pub fn submultisets(&self) -> Vec<Self> {
        let mut out = vec![Multiset::new()];
        for (x, n) in &self.entries {
            let mut next = Vec::with_capacity(out.len() * (n + 1));
            for base in &out {
                for k in 0..=*n {
                    let mut m = base.clone();
                    if k > 0 {
                        m.entries.push((x.clone(), k));
                    }
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }

    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Multiset<U> {
        let mut out = Multiset::new();
        for (x, n) in &self.entries {
            out.insert_n(f(x), *n);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&T) -> bool) -> Self {
        Multiset {
            entries: self.entries.iter().filter(|(x, _)| keep(x)).cloned().collect(),
        }
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut items: Vec<T> = iter.into_iter().collect();
        items.sort();
        let mut entries: Vec<(T, usize)> = Vec::new();
        for x in items {
            match entries.last_mut() {
                Some((y, n)) if *y == x => *n += 1,
                _ => entries.push((x, 1)),
            }
        }
        Multiset { entries }
    }
}

impl<T: fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟦")?;
        let mut first = true;
        for (x, n) in &self.entries {
            for _ in 0..*n {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{x:?}")?;
            }
        }
        f.write_str("⟧")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_ignores_insertion_order() {
        let a: Multiset<u8> = [3, 1, 3, 2].into_iter().collect();
        let mut b = Multiset::new();
        for x in [2, 3, 1, 3] {
            b.insert(x);
        }
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert_eq!(a.distinct_len(), 3);
        assert_eq!(a.multiplicity(&3), 2);
    }

    #[test]
    fn submultisets_are_counted_by_product_of_multiplicities() {
        let m: Multiset<u8> = [1, 1, 2, 3, 3, 3].into_iter().collect();
        let subs = m.submultisets();
        assert_eq!(subs.len(), 3 * 2 * 4);
        let distinct: std::collections::BTreeSet<_> = subs.iter().cloned().collect();
        assert_eq!(distinct.len(), subs.len());
        assert!(subs.iter().all(|s| s.is_submultiset_of(&m)));
    }

    #[test]
    fn difference_and_sum_are_inverse() {
        let m: Multiset<u8> = [1, 1, 2].into_iter().collect();
        let s: Multiset<u8> = [1].into_iter().collect();
        let d = m.difference(&s).unwrap();
        assert_eq!(d.sum(&s), m);
        assert!(s.difference(&m).is_none());
        assert_eq!(m.remove_one(&1), Some(d));
        assert_eq!(m.remove_one(&7), None);
    }
}
