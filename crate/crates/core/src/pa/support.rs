//! The support preorder, its strongly connected components, and depth.

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{Pa, StateId};
use crate::error::{Error, Result};

/// `r ⪯ q` holds when `r` is reachable from `q` along sequential
/// transitions, fork results and fork targets. States in the same strongly
/// connected component support each other; depth is the length of the
/// longest strict chain ending in a state.
#[derive(Clone, Debug)]
pub struct SupportAnalysis {
    scc_of: Vec<usize>,
    /// Components listed so that every edge leaving a component points to
    /// an earlier one.
    sccs: Vec<Vec<StateId>>,
    below: Vec<FixedBitSet>,
    depth_of: Vec<usize>,
    depth: usize,
}

pub fn support_analysis(pa: &Pa) -> SupportAnalysis {
    let n = pa.num_states();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for q in pa.states() {
        for r in pa.successors(q) {
            g.add_edge(NodeIndex::new(q.index()), NodeIndex::new(r.index()), ());
        }
    }
    let sccs: Vec<Vec<StateId>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<StateId> = c.into_iter().map(|i| StateId(i.index() as u32)).collect();
            v.sort();
            v
        })
        .collect();
    // Sinks first: every edge between components points backwards.
    let mut scc_of = vec![0; n];
    for (i, c) in sccs.iter().enumerate() {
        for q in c {
            scc_of[q.index()] = i;
        }
    }
    let mut scc_below: Vec<FixedBitSet> = Vec::with_capacity(sccs.len());
    let mut scc_depth = vec![0usize; sccs.len()];
    for (i, c) in sccs.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(n);
        let mut d = 0;
        for q in c {
            set.insert(q.index());
            for r in pa.successors(*q) {
                let j = scc_of[r.index()];
                if j != i {
                    debug_assert!(j < i);
                    set.union_with(&scc_below[j]);
                    d = d.max(scc_depth[j]);
                }
            }
        }
        scc_below.push(set);
        scc_depth[i] = d + 1;
    }
    let below = (0..n).map(|q| scc_below[scc_of[q]].clone()).collect();
    let depth_of: Vec<usize> = (0..n).map(|q| scc_depth[scc_of[q]]).collect();
    let depth = depth_of.iter().copied().max().unwrap_or(0);
    SupportAnalysis { scc_of, sccs, below, depth_of, depth }
}

impl SupportAnalysis {
    /// `r ⪯ q`.
    pub fn supports(&self, r: StateId, q: StateId) -> bool {
        self.below[q.index()].contains(r.index())
    }

    /// `r ≺ q`.
    pub fn strictly_supports(&self, r: StateId, q: StateId) -> bool {
        self.supports(r, q) && !self.supports(q, r)
    }

    pub fn depth_of(&self, q: StateId) -> usize {
        self.depth_of[q.index()]
    }

    /// Depth of the automaton: 0 when it has no states.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn scc_index(&self, q: StateId) -> usize {
        self.scc_of[q.index()]
    }

    /// Components in an order where support only points backwards.
    pub fn components(&self) -> &[Vec<StateId>] {
        &self.sccs
    }

    /// `{r : r ⪯ q}`.
    pub fn support_of(&self, q: StateId) -> BTreeSet<StateId> {
        self.below[q.index()].ones().map(|i| StateId(i as u32)).collect()
    }
}

impl Pa {
    /// A fork `(q, r)` where `r` is a target of a fork of `q` and `q ⪯ r`,
    /// if there is one.
    pub fn fork_cycle(&self, sa: &SupportAnalysis) -> Option<(StateId, StateId)> {
        for q in self.states() {
            for fork in self.forks(q).keys() {
                for &r in fork.distinct() {
                    if sa.scc_index(r) == sa.scc_index(q) {
                        return Some((q, r));
                    }
                }
            }
        }
        None
    }

    pub fn is_fork_acyclic(&self) -> bool {
        self.fork_cycle(&support_analysis(self)).is_none()
    }

    /// A cycle `q, r, …, q` through a fork target, when the automaton is
    /// not fork-acyclic.
    pub fn fork_cycle_witness(&self) -> Option<Vec<StateId>> {
        let (q, r) = self.fork_cycle(&support_analysis(self))?;
        let mut prev = vec![None; self.num_states()];
        let mut queue = VecDeque::from([r]);
        let mut seen = BTreeSet::from([r]);
        while let Some(s) = queue.pop_front() {
            if s == q {
                break;
            }
            for t in self.successors(s) {
                if seen.insert(t) {
                    prev[t.index()] = Some(s);
                    queue.push_back(t);
                }
            }
        }
        let mut path = vec![q];
        let mut cur = q;
        while cur != r {
            cur = prev[cur.index()].expect("q is reachable from r");
            path.push(cur);
        }
        path.push(q);
        path.reverse();
        Some(path)
    }

    pub(crate) fn require_fork_acyclic(&self) -> Result<SupportAnalysis> {
        let sa = support_analysis(self);
        if let Some((q, r)) = self.fork_cycle(&sa) {
            return Err(Error::NotForkAcyclic {
                state: self.name(q).to_string(),
                target: self.name(r).to_string(),
            });
        }
        Ok(sa)
    }
}
