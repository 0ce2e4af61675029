//! Labeled transition systems with a partitioned (observable/unobservable)
//! alphabet, observable projection, and bounded run enumeration.
//!
//! States and events are index-based ids into the owning [`Lts`]; ids are
//! stable under extension (new states/events append at the end). Wherever an
//! exploration order matters, events are taken in lexicographic order of
//! their string id so that every construction in this crate is reproducible.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::stateset::StateSet;

/// Index of a state in its [`Lts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

/// Index of an event in its [`Lts`] alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An event of the alphabet: stable string id, display label, observability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventInfo {
    pub id: String,
    pub label: String,
    pub observable: bool,
}

/// Errors raised while building or querying an LTS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtsError {
    DuplicateState(String),
    DuplicateEvent(String),
    UnknownState(String),
    UnknownEvent(String),
    NoStates,
    /// An operation restricted to observable events was given an
    /// unobservable or foreign one.
    NotObservable(String),
    /// A state id was out of range for the ambient LTS.
    ForeignState(u32),
}

impl fmt::Display for LtsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LtsError::DuplicateState(s) => write!(f, "duplicate state id `{s}`"),
            LtsError::DuplicateEvent(e) => write!(f, "duplicate event id `{e}`"),
            LtsError::UnknownState(s) => write!(f, "unknown state `{s}`"),
            LtsError::UnknownEvent(e) => write!(f, "unknown event `{e}`"),
            LtsError::NoStates => write!(f, "an LTS needs at least one state"),
            LtsError::NotObservable(e) => write!(f, "event `{e}` is not observable"),
            LtsError::ForeignState(i) => {
                write!(f, "state index {i} does not belong to this system")
            }
        }
    }
}

/// A finite word over the alphabet of some ambient LTS.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<EventId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(e: EventId) -> Self {
        Word(alloc::vec![e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, EventId> {
        self.0.iter()
    }

    pub fn appended(&self, e: EventId) -> Word {
        let mut v = self.0.clone();
        v.push(e);
        Word(v)
    }

    /// `self ≺ other`: there is a `w` with `self · w = other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// `other − self`, defined when `self` is a prefix of `other`.
    pub fn suffix_after(&self, other: &Word) -> Option<Word> {
        if self.is_prefix_of(other) {
            Some(Word(other.0[self.0.len()..].to_vec()))
        } else {
            None
        }
    }
}

/// Order-preserving erasure of everything outside `observables`.
///
/// `project(ε) = ε` and `project(u·σ) = project(u)·σ` exactly when `σ` is
/// kept, so the result is the subsequence of `w` over `observables`.
pub fn project(w: &Word, observables: &BTreeSet<EventId>) -> Word {
    Word(
        w.0.iter()
            .copied()
            .filter(|e| observables.contains(e))
            .collect(),
    )
}

/// The set of secret states of an ambient LTS.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SecretSpec {
    pub states: StateSet,
}

impl SecretSpec {
    pub fn new(states: StateSet) -> Self {
        SecretSpec { states }
    }

    pub fn empty() -> Self {
        SecretSpec {
            states: StateSet::empty(),
        }
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.states.contains(q)
    }

    /// All members must be states of `lts`.
    pub fn validate(&self, lts: &Lts) -> Result<(), LtsError> {
        for q in self.states.iter() {
            if q.index() >= lts.state_count() {
                return Err(LtsError::ForeignState(q.0));
            }
        }
        Ok(())
    }
}

/// A finite labeled transition system. The transition relation may be
/// nondeterministic: a `(state, event)` pair can have several successors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    states: Vec<String>,
    initial: StateId,
    events: Vec<EventInfo>,
    /// `lex_rank[e]` is the position of event `e` in lexicographic id order.
    lex_rank: Vec<u32>,
    /// Per state, outgoing `(event, target)` pairs sorted by
    /// (lexicographic event rank, target).
    outgoing: Vec<Vec<(EventId, StateId)>>,
}

impl Lts {
    /// Build an LTS from string-identified parts.
    pub fn new(
        states: Vec<String>,
        initial: &str,
        events: Vec<EventInfo>,
        edges: &[(String, String, String)],
    ) -> Result<Lts, LtsError> {
        if states.is_empty() {
            return Err(LtsError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.clone()) {
                return Err(LtsError::DuplicateState(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &events {
            if !seen.insert(e.id.clone()) {
                return Err(LtsError::DuplicateEvent(e.id.clone()));
            }
        }
        let find_state = |name: &str| -> Result<StateId, LtsError> {
            states
                .iter()
                .position(|s| s == name)
                .map(|i| StateId(i as u32))
                .ok_or_else(|| LtsError::UnknownState(name.to_string()))
        };
        let find_event = |name: &str| -> Result<EventId, LtsError> {
            events
                .iter()
                .position(|e| e.id == name)
                .map(|i| EventId(i as u32))
                .ok_or_else(|| LtsError::UnknownEvent(name.to_string()))
        };
        let initial = find_state(initial)?;
        let mut outgoing = alloc::vec![Vec::new(); states.len()];
        let mut resolved = Vec::with_capacity(edges.len());
        for (from, ev, to) in edges {
            resolved.push((find_state(from)?, find_event(ev)?, find_state(to)?));
        }
        for (from, ev, to) in resolved {
            outgoing[from.index()].push((ev, to));
        }
        let mut lts = Lts {
            states,
            initial,
            events,
            lex_rank: Vec::new(),
            outgoing,
        };
        lts.rebuild_order();
        Ok(lts)
    }

    /// Assemble from already-resolved parts; used by the reachability builder.
    pub(crate) fn from_parts(
        states: Vec<String>,
        initial: StateId,
        events: Vec<EventInfo>,
        mut outgoing: Vec<Vec<(EventId, StateId)>>,
    ) -> Lts {
        debug_assert_eq!(states.len(), outgoing.len());
        for list in &mut outgoing {
            list.sort_unstable();
            list.dedup();
        }
        let mut lts = Lts {
            states,
            initial,
            events,
            lex_rank: Vec::new(),
            outgoing,
        };
        lts.rebuild_order();
        lts
    }

    fn rebuild_order(&mut self) {
        let mut by_name: Vec<u32> = (0..self.events.len() as u32).collect();
        by_name.sort_by(|&a, &b| self.events[a as usize].id.cmp(&self.events[b as usize].id));
        self.lex_rank = alloc::vec![0; self.events.len()];
        for (rank, &e) in by_name.iter().enumerate() {
            self.lex_rank[e as usize] = rank as u32;
        }
        for list in &mut self.outgoing {
            list.sort_by_key(|&(e, t)| (self.lex_rank[e.index()], t));
            list.dedup();
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.as_str())
    }

    pub fn event(&self, e: EventId) -> &EventInfo {
        &self.events[e.index()]
    }

    pub fn events(&self) -> impl Iterator<Item = (EventId, &EventInfo)> {
        self.events
            .iter()
            .enumerate()
            .map(|(i, e)| (EventId(i as u32), e))
    }

    pub fn find_state(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn find_event(&self, id: &str) -> Option<EventId> {
        self.events
            .iter()
            .position(|e| e.id == id)
            .map(|i| EventId(i as u32))
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.events[e.index()].observable
    }

    /// Observable part of the alphabet, in lexicographic id order.
    pub fn observable_events(&self) -> Vec<EventId> {
        self.events_sorted(true)
    }

    /// Unobservable part of the alphabet, in lexicographic id order.
    pub fn unobservable_events(&self) -> Vec<EventId> {
        self.events_sorted(false)
    }

    fn events_sorted(&self, observable: bool) -> Vec<EventId> {
        let mut v: Vec<EventId> = self
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.observable == observable)
            .map(|(i, _)| EventId(i as u32))
            .collect();
        v.sort_by_key(|e| self.lex_rank[e.index()]);
        v
    }

    pub fn observable_set(&self) -> BTreeSet<EventId> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.observable)
            .map(|(i, _)| EventId(i as u32))
            .collect()
    }

    /// Outgoing edges of `q`, sorted by (lexicographic event id, target).
    pub fn successors(&self, q: StateId) -> &[(EventId, StateId)] {
        &self.outgoing[q.index()]
    }

    pub fn successors_via(
        &self,
        q: StateId,
        e: EventId,
    ) -> impl Iterator<Item = StateId> + '_ {
        self.outgoing[q.index()]
            .iter()
            .filter(move |&&(ev, _)| ev == e)
            .map(|&(_, t)| t)
    }

    pub fn edge_count(&self) -> usize {
        self.outgoing.iter().map(|l| l.len()).sum()
    }

    /// All edges in deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.outgoing.iter().enumerate().flat_map(|(q, list)| {
            list.iter()
                .map(move |&(e, t)| (StateId(q as u32), e, t))
        })
    }

    /// Lexicographic rank of an event's string id within the alphabet.
    pub fn lex_rank(&self, e: EventId) -> u32 {
        self.lex_rank[e.index()]
    }

    /// Erase unobservable events from `w` (the observer's view of a run).
    pub fn project(&self, w: &Word) -> Word {
        Word(
            w.0.iter()
                .copied()
                .filter(|&e| self.is_observable(e))
                .collect(),
        )
    }

    /// Render a word as space-separated event ids.
    pub fn render_word(&self, w: &Word) -> String {
        let mut out = String::new();
        for (i, e) in w.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&self.events[e.index()].id);
        }
        out
    }

    /// Append a fresh state; its id is stable (existing ids keep meaning).
    pub fn add_state(&mut self, name: &str) -> Result<StateId, LtsError> {
        if self.states.iter().any(|s| s == name) {
            return Err(LtsError::DuplicateState(name.to_string()));
        }
        self.states.push(name.to_string());
        self.outgoing.push(Vec::new());
        Ok(StateId(self.states.len() as u32 - 1))
    }

    /// Append a fresh event to the alphabet.
    pub fn add_event(
        &mut self,
        id: &str,
        label: &str,
        observable: bool,
    ) -> Result<EventId, LtsError> {
        if self.events.iter().any(|e| e.id == id) {
            return Err(LtsError::DuplicateEvent(id.to_string()));
        }
        self.events.push(EventInfo {
            id: id.to_string(),
            label: label.to_string(),
            observable,
        });
        self.rebuild_order();
        Ok(EventId(self.events.len() as u32 - 1))
    }

    pub fn add_edge(&mut self, from: StateId, e: EventId, to: StateId) -> Result<(), LtsError> {
        if from.index() >= self.states.len() || to.index() >= self.states.len() {
            return Err(LtsError::ForeignState(from.0.max(to.0)));
        }
        if e.index() >= self.events.len() {
            return Err(LtsError::UnknownEvent(alloc::format!("#{}", e.0)));
        }
        let list = &mut self.outgoing[from.index()];
        if !list.iter().any(|&(ev, t)| ev == e && t == to) {
            list.push((e, to));
            let ranks = &self.lex_rank;
            list.sort_by_key(|&(ev, t)| (ranks[ev.index()], t));
        }
        Ok(())
    }

    /// Every run of length ≤ `max_len`, each exactly once, ordered by
    /// (length, word, path). Starts with `(ε, initial)`.
    pub fn enumerate_runs(&self, max_len: usize) -> RunIter<'_> {
        RunIter {
            lts: self,
            level: alloc::vec![(Word::empty(), alloc::vec![self.initial])],
            pos: 0,
            remaining: max_len,
        }
    }

    /// End states of runs whose observable projection equals `w_obs`:
    /// the observer's state estimate after seeing `w_obs`.
    ///
    /// Computed with the saturation/image primitives, so it coincides with
    /// the aggregate the deterministic observation graph reaches via `w_obs`.
    pub fn observationally_equivalent_runs(
        &self,
        w_obs: &Word,
    ) -> Result<StateSet, LtsError> {
        for &e in w_obs.iter() {
            if e.index() >= self.events.len() {
                return Err(LtsError::UnknownEvent(alloc::format!("#{}", e.0)));
            }
            if !self.is_observable(e) {
                return Err(LtsError::NotObservable(self.events[e.index()].id.clone()));
            }
        }
        let mut estimate =
            crate::stateset::saturate(self, &StateSet::singleton(self.initial));
        for &e in w_obs.iter() {
            let stepped = crate::stateset::img(self, &estimate, e)?;
            estimate = crate::stateset::saturate(self, &stepped);
        }
        Ok(estimate)
    }

    /// DOT rendering of the raw transition system. Secret states, when
    /// given, are drawn with a double border.
    pub fn to_dot(&self, secret: Option<&SecretSpec>) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "digraph lts {{");
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  node [shape=circle];");
        let _ = writeln!(out, "  __init [shape=point, label=\"\"];");
        for (i, name) in self.states.iter().enumerate() {
            let q = StateId(i as u32);
            let secretish = secret.map(|s| s.contains(q)).unwrap_or(false);
            if secretish {
                let _ = writeln!(out, "  \"{name}\" [peripheries=2];");
            } else {
                let _ = writeln!(out, "  \"{name}\";");
            }
        }
        let _ = writeln!(
            out,
            "  __init -> \"{}\";",
            self.states[self.initial.index()]
        );
        let mut edges: Vec<(String, String, String, bool)> = self
            .edges()
            .map(|(q, e, t)| {
                let info = &self.events[e.index()];
                (
                    self.states[q.index()].clone(),
                    info.label.clone(),
                    self.states[t.index()].clone(),
                    info.observable,
                )
            })
            .collect();
        edges.sort();
        for (from, label, to, observable) in edges {
            let style = if observable { "" } else { ", style=dashed" };
            let _ = writeln!(out, "  \"{from}\" -> \"{to}\" [label=\"{label}\"{style}];");
        }
        let _ = writeln!(out, "}}");
        out
    }
}

/// Iterator over runs; see [`Lts::enumerate_runs`].
pub struct RunIter<'a> {
    lts: &'a Lts,
    level: Vec<(Word, Vec<StateId>)>,
    pos: usize,
    remaining: usize,
}

impl<'a> Iterator for RunIter<'a> {
    type Item = (Word, StateId);

    fn next(&mut self) -> Option<(Word, StateId)> {
        loop {
            if self.pos < self.level.len() {
                let (w, path) = &self.level[self.pos];
                self.pos += 1;
                return Some((w.clone(), *path.last().expect("non-empty path")));
            }
            if self.remaining == 0 {
                return None;
            }
            self.remaining -= 1;
            let mut next = Vec::new();
            for (w, path) in &self.level {
                let last = *path.last().expect("non-empty path");
                for &(e, t) in self.lts.successors(last) {
                    let mut p = path.clone();
                    p.push(t);
                    next.push((w.appended(e), p));
                }
            }
            // parents are sorted and successor lists are sorted, so `next`
            // is already in (word, path) order
            if next.is_empty() {
                return None;
            }
            self.level = next;
            self.pos = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stateset::StateSet;

    pub(crate) fn ev(id: &str, observable: bool) -> EventInfo {
        EventInfo {
            id: id.into(),
            label: id.into(),
            observable,
        }
    }

    fn edge(from: &str, e: &str, to: &str) -> (String, String, String) {
        (from.into(), e.into(), to.into())
    }

    fn chain() -> Lts {
        // q0 -u-> q1 -o-> q2, u unobservable
        Lts::new(
            alloc::vec!["q0".into(), "q1".into(), "q2".into()],
            "q0",
            alloc::vec![ev("o", true), ev("u", false)],
            &[edge("q0", "u", "q1"), edge("q1", "o", "q2")],
        )
        .unwrap()
    }

    #[test]
    fn project_base_cases() {
        let lts = chain();
        let o = lts.find_event("o").unwrap();
        let u = lts.find_event("u").unwrap();
        assert_eq!(lts.project(&Word::empty()), Word::empty());
        assert_eq!(lts.project(&Word(alloc::vec![u, o, u])), Word(alloc::vec![o]));
        // identity when everything is observable
        let all = Lts::new(
            alloc::vec!["a".into()],
            "a",
            alloc::vec![ev("x", true)],
            &[],
        )
        .unwrap();
        let x = all.find_event("x").unwrap();
        let w = Word(alloc::vec![x, x]);
        assert_eq!(all.project(&w), w);
    }

    #[test]
    fn enumerate_runs_no_behavior() {
        let lts = Lts::new(
            alloc::vec!["q0".into()],
            "q0",
            alloc::vec![],
            &[],
        )
        .unwrap();
        let runs: Vec<_> = lts.enumerate_runs(5).collect();
        assert_eq!(runs, alloc::vec![(Word::empty(), StateId(0))]);
    }

    #[test]
    fn enumerate_runs_single_step() {
        let lts = Lts::new(
            alloc::vec!["q0".into(), "q1".into()],
            "q0",
            alloc::vec![ev("a", true)],
            &[edge("q0", "a", "q1")],
        )
        .unwrap();
        let a = lts.find_event("a").unwrap();
        let runs: Vec<_> = lts.enumerate_runs(1).collect();
        assert_eq!(
            runs,
            alloc::vec![
                (Word::empty(), StateId(0)),
                (Word(alloc::vec![a]), StateId(1))
            ]
        );
    }

    #[test]
    fn enumerate_runs_unrolls_cycles() {
        let lts = Lts::new(
            alloc::vec!["q0".into()],
            "q0",
            alloc::vec![ev("a", true)],
            &[edge("q0", "a", "q0")],
        )
        .unwrap();
        let a = lts.find_event("a").unwrap();
        let runs: Vec<_> = lts.enumerate_runs(2).collect();
        assert_eq!(
            runs,
            alloc::vec![
                (Word::empty(), StateId(0)),
                (Word(alloc::vec![a]), StateId(0)),
                (Word(alloc::vec![a, a]), StateId(0)),
            ]
        );
    }

    #[test]
    fn estimate_after_empty_word_is_saturated_start() {
        let lts = chain();
        let est = lts.observationally_equivalent_runs(&Word::empty()).unwrap();
        assert_eq!(est, StateSet::from_iter([StateId(0), StateId(1)]));
    }

    #[test]
    fn estimate_after_observation() {
        let lts = chain();
        let o = lts.find_event("o").unwrap();
        let est = lts
            .observationally_equivalent_runs(&Word(alloc::vec![o]))
            .unwrap();
        assert_eq!(est, StateSet::singleton(StateId(2)));
    }

    #[test]
    fn estimate_rejects_unobservable_word() {
        let lts = chain();
        let u = lts.find_event("u").unwrap();
        let err = lts
            .observationally_equivalent_runs(&Word(alloc::vec![u]))
            .unwrap_err();
        assert_eq!(err, LtsError::NotObservable("u".into()));
    }

    #[test]
    fn word_prefix_relation() {
        let u = Word(alloc::vec![EventId(0)]);
        let v = Word(alloc::vec![EventId(0), EventId(1)]);
        assert!(u.is_prefix_of(&v));
        assert!(!v.is_prefix_of(&u));
        assert_eq!(u.suffix_after(&v), Some(Word(alloc::vec![EventId(1)])));
        assert_eq!(v.suffix_after(&u), None);
    }
}
