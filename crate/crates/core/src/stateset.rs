//! Canonical state sets and the symbolic primitives the observation graph is
//! built from: saturation under unobservable events, image under an
//! observable event, and plain set algebra.
//!
//! The default backend is an explicit sorted id set, which is canonical by
//! construction: equal membership means equal representation, equal hash.
//! [`dense`] provides a bitset backend behind the same operation suite; the
//! two are checked against each other property-style, and the dense form is
//! also what the K-step estimator uses for its closure tables.

use alloc::vec::Vec;
use core::fmt;

use crate::lts::{EventId, Lts, LtsError, StateId};

/// A canonical, immutable set of LTS states.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet {
    members: Vec<StateId>,
}

impl StateSet {
    pub fn empty() -> Self {
        StateSet { members: Vec::new() }
    }

    pub fn singleton(q: StateId) -> Self {
        StateSet {
            members: alloc::vec![q],
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.members.binary_search(&q).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.members
    }

    pub fn max_state(&self) -> Option<StateId> {
        self.members.last().copied()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut members = Vec::with_capacity(self.members.len() + other.members.len());
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                core::cmp::Ordering::Less => {
                    members.push(self.members[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    members.push(other.members[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    members.push(self.members[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        members.extend_from_slice(&self.members[i..]);
        members.extend_from_slice(&other.members[j..]);
        StateSet { members }
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        StateSet {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&q| other.contains(q))
                .collect(),
        }
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        StateSet {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&q| !other.contains(q))
                .collect(),
        }
    }

    /// Subset test; vacuously true for the empty set.
    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.members.iter().all(|&q| other.contains(q))
    }
}

/// Canonicalizing collection: sorts and deduplicates, so construction order
/// never affects equality or hashing.
impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut members: Vec<StateId> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        StateSet { members }
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", q.0)?;
        }
        write!(f, "}}")
    }
}

fn check_ambient(lts: &Lts, set: &StateSet) -> Result<(), LtsError> {
    match set.max_state() {
        Some(q) if q.index() >= lts.state_count() => Err(LtsError::ForeignState(q.0)),
        _ => Ok(()),
    }
}

/// Least superset of `seed` closed under unobservable successors.
///
/// Worklist fixpoint; terminates because the state space is finite. The
/// result satisfies `saturate(saturate(x)) == saturate(x)`.
pub fn saturate(lts: &Lts, seed: &StateSet) -> StateSet {
    debug_assert!(check_ambient(lts, seed).is_ok());
    let mut seen = alloc::collections::BTreeSet::new();
    let mut work: Vec<StateId> = seed.iter().collect();
    seen.extend(work.iter().copied());
    while let Some(q) = work.pop() {
        for &(e, t) in lts.successors(q) {
            if !lts.is_observable(e) && seen.insert(t) {
                work.push(t);
            }
        }
    }
    StateSet::from_iter(seen)
}

/// Direct successors of `a` under the observable event `σ`, before
/// saturation (callers saturate afterwards; an empty result means `σ` is
/// not enabled from `a`).
pub fn img(lts: &Lts, a: &StateSet, sigma: EventId) -> Result<StateSet, LtsError> {
    if sigma.index() >= lts.event_count() {
        return Err(LtsError::UnknownEvent(alloc::format!("#{}", sigma.0)));
    }
    if !lts.is_observable(sigma) {
        return Err(LtsError::NotObservable(lts.event(sigma).id.clone()));
    }
    check_ambient(lts, a)?;
    Ok(StateSet::from_iter(
        a.iter().flat_map(|q| lts.successors_via(q, sigma)),
    ))
}

pub mod dense {
    //! Fixed-width bitset backend over the same operation suite.

    use super::*;

    /// Bitset over a fixed state universe.
    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub struct DenseStateSet {
        universe: u32,
        bits: Vec<u64>,
    }

    impl DenseStateSet {
        pub fn empty(universe: usize) -> Self {
            DenseStateSet {
                universe: universe as u32,
                bits: alloc::vec![0; universe.div_ceil(64)],
            }
        }

        pub fn from_stateset(universe: usize, set: &StateSet) -> Self {
            let mut d = DenseStateSet::empty(universe);
            for q in set.iter() {
                d.insert(q);
            }
            d
        }

        pub fn to_stateset(&self) -> StateSet {
            StateSet::from_iter(self.iter())
        }

        pub fn insert(&mut self, q: StateId) {
            debug_assert!(q.0 < self.universe);
            self.bits[q.index() / 64] |= 1u64 << (q.index() % 64);
        }

        pub fn contains(&self, q: StateId) -> bool {
            q.0 < self.universe && self.bits[q.index() / 64] & (1u64 << (q.index() % 64)) != 0
        }

        pub fn len(&self) -> usize {
            self.bits.iter().map(|b| b.count_ones() as usize).sum()
        }

        pub fn is_empty(&self) -> bool {
            self.bits.iter().all(|&b| b == 0)
        }

        pub fn union(&self, other: &DenseStateSet) -> DenseStateSet {
            self.zip_with(other, |a, b| a | b)
        }

        pub fn intersect(&self, other: &DenseStateSet) -> DenseStateSet {
            self.zip_with(other, |a, b| a & b)
        }

        pub fn difference(&self, other: &DenseStateSet) -> DenseStateSet {
            self.zip_with(other, |a, b| a & !b)
        }

        pub fn is_subset(&self, other: &DenseStateSet) -> bool {
            self.bits
                .iter()
                .zip(&other.bits)
                .all(|(&a, &b)| a & !b == 0)
        }

        pub fn union_with(&mut self, other: &DenseStateSet) {
            for (a, b) in self.bits.iter_mut().zip(&other.bits) {
                *a |= b;
            }
        }

        pub fn intersects(&self, other: &DenseStateSet) -> bool {
            self.bits.iter().zip(&other.bits).any(|(&a, &b)| a & b != 0)
        }

        pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
            (0..self.universe)
                .map(StateId)
                .filter(move |&q| self.contains(q))
        }

        fn zip_with(&self, other: &DenseStateSet, f: impl Fn(u64, u64) -> u64) -> DenseStateSet {
            debug_assert_eq!(self.universe, other.universe);
            DenseStateSet {
                universe: self.universe,
                bits: self
                    .bits
                    .iter()
                    .zip(&other.bits)
                    .map(|(&a, &b)| f(a, b))
                    .collect(),
            }
        }
    }

    pub fn saturate(lts: &Lts, seed: &DenseStateSet) -> DenseStateSet {
        let mut out = seed.clone();
        let mut work: Vec<StateId> = seed.iter().collect();
        while let Some(q) = work.pop() {
            for &(e, t) in lts.successors(q) {
                if !lts.is_observable(e) && !out.contains(t) {
                    out.insert(t);
                    work.push(t);
                }
            }
        }
        out
    }

    pub fn img(
        lts: &Lts,
        a: &DenseStateSet,
        sigma: EventId,
    ) -> Result<DenseStateSet, LtsError> {
        if sigma.index() >= lts.event_count() {
            return Err(LtsError::UnknownEvent(alloc::format!("#{}", sigma.0)));
        }
        if !lts.is_observable(sigma) {
            return Err(LtsError::NotObservable(lts.event(sigma).id.clone()));
        }
        let mut out = DenseStateSet::empty(lts.state_count());
        for q in a.iter() {
            for t in lts.successors_via(q, sigma) {
                out.insert(t);
            }
        }
        Ok(out)
    }
}
