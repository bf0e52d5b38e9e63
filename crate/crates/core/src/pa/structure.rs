//! Structural properties: forking arity, parsimony, flat branching.

use serde::Serialize;

use super::run::{leadsto, LeadsTo};
use super::Pa;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// Smallest fork arity; `None` when there are no forks.
    pub n_forking_min: Option<usize>,
    /// No fork target accepts the empty pomset.
    pub parsimonious: bool,
    /// No fork target has a fork with an accepting result.
    pub flat_branching: bool,
    pub well_structured: bool,
}

pub fn check_structure(pa: &Pa) -> StructureReport {
    check_structure_with(pa, &leadsto(pa))
}

pub(crate) fn check_structure_with(pa: &Pa, leads: &LeadsTo) -> StructureReport {
    let n_forking_min = pa
        .states()
        .flat_map(|q| pa.forks(q).keys().map(|f| f.len()))
        .min();
    let targets = pa.fork_targets();
    let parsimonious = targets.iter().all(|&t| !leads.accepts_empty(pa, t));
    let flat_branching = targets.iter().all(|&t| {
        pa.forks(t)
            .values()
            .all(|rs| rs.iter().all(|r| !pa.is_accepting(*r)))
    });
    let two_forking = n_forking_min.is_none_or(|n| n >= 2);
    StructureReport {
        n_forking_min,
        parsimonious,
        flat_branching,
        well_structured: two_forking && parsimonious && flat_branching,
    }
}

impl StructureReport {
    /// Every fork has arity at least `n`.
    pub fn is_n_forking(&self, n: usize) -> bool {
        self.n_forking_min.is_none_or(|m| m >= n)
    }
}
