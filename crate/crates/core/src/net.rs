//! Petri nets and open workflow nets: weighted flow relation, token firing
//! semantics, incidence matrix, structural workflow validation, and
//! reachability-graph construction.
//!
//! Place and transition ids are indices into the net's name tables. The
//! tables are sorted once at build time; later structural patches append, so
//! ids stay stable across enforcement.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::lts::{EventId, EventInfo, Lts, StateId};
use crate::stateset::StateSet;

/// Index of a place in its [`PetriNet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub u32);

/// Index of a transition in its [`PetriNet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionInfo {
    pub id: String,
    pub label: String,
    pub observable: bool,
}

/// Errors from net construction, firing, or reachability exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetError {
    DuplicateId(String),
    UnknownPlace(String),
    UnknownTransition(String),
    UnknownNode(String),
    /// Arc between two places or two transitions.
    InvalidArc { from: String, to: String },
    DuplicateArc { from: String, to: String },
    ZeroWeightArc { from: String, to: String },
    NotEnabled { transition: String },
    /// Reachability exploration exceeded the configured state bound:
    /// the net is possibly unbounded.
    StateBoundExceeded { bound: usize },
    /// A place exceeded the per-place token ceiling: possibly unbounded.
    TokenBoundExceeded { place: String, bound: u32 },
    /// A marking refers to places of a different net.
    ForeignMarking,
    InterfaceOverlap(String),
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::DuplicateId(id) => write!(f, "duplicate node id `{id}`"),
            NetError::UnknownPlace(p) => write!(f, "unknown place `{p}`"),
            NetError::UnknownTransition(t) => write!(f, "unknown transition `{t}`"),
            NetError::UnknownNode(n) => write!(f, "unknown node `{n}`"),
            NetError::InvalidArc { from, to } => {
                write!(f, "arc `{from}` -> `{to}` must connect a place and a transition")
            }
            NetError::DuplicateArc { from, to } => {
                write!(f, "arc `{from}` -> `{to}` declared twice")
            }
            NetError::ZeroWeightArc { from, to } => {
                write!(f, "arc `{from}` -> `{to}` must have weight >= 1")
            }
            NetError::NotEnabled { transition } => {
                write!(f, "transition `{transition}` is not enabled")
            }
            NetError::StateBoundExceeded { bound } => write!(
                f,
                "possibly unbounded net: more than {bound} reachable markings"
            ),
            NetError::TokenBoundExceeded { place, bound } => write!(
                f,
                "possibly unbounded net: place `{place}` exceeded {bound} tokens"
            ),
            NetError::ForeignMarking => write!(f, "marking does not belong to this net"),
            NetError::InterfaceOverlap(p) => {
                write!(f, "place `{p}` is declared both input and output")
            }
        }
    }
}

/// A token distribution over the places of one net.
///
/// Stored densely; comparison pads with zeros, so a marking created before a
/// structural patch compares equal to its extended counterpart. This is the
/// same thing as sparse value equality with zero entries dropped.
#[derive(Debug, Clone, Default)]
pub struct Marking {
    counts: Vec<u32>,
}

impl Marking {
    pub fn empty() -> Self {
        Marking { counts: Vec::new() }
    }

    pub fn get(&self, p: PlaceId) -> u32 {
        self.counts.get(p.index()).copied().unwrap_or(0)
    }

    pub fn set(&mut self, p: PlaceId, count: u32) {
        if p.index() >= self.counts.len() {
            if count == 0 {
                return;
            }
            self.counts.resize(p.index() + 1, 0);
        }
        self.counts[p.index()] = count;
    }

    /// Marked places with their counts, ascending by place id.
    pub fn iter_marked(&self) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| (PlaceId(i as u32), c))
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    fn padded(&self, i: usize) -> u32 {
        self.counts.get(i).copied().unwrap_or(0)
    }
}

impl PartialEq for Marking {
    fn eq(&self, other: &Self) -> bool {
        let n = self.counts.len().max(other.counts.len());
        (0..n).all(|i| self.padded(i) == other.padded(i))
    }
}

impl Eq for Marking {}

impl PartialOrd for Marking {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Marking {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.counts.len().max(other.counts.len());
        for i in 0..n {
            match self.padded(i).cmp(&other.padded(i)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// A (partial) marking used to designate secret states: either an exact
/// marking, or a lower-bound pattern over the listed places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkingPattern {
    pairs: Vec<(PlaceId, u32)>,
    exact: bool,
}

impl MarkingPattern {
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn pairs(&self) -> &[(PlaceId, u32)] {
        &self.pairs
    }

    pub fn matches(&self, m: &Marking) -> bool {
        if self.exact {
            let mut listed = BTreeMap::new();
            for &(p, c) in &self.pairs {
                listed.insert(p, c);
            }
            let n = m.counts.len().max(
                self.pairs
                    .iter()
                    .map(|&(p, _)| p.index() + 1)
                    .max()
                    .unwrap_or(0),
            );
            (0..n).all(|i| {
                let want = listed.get(&PlaceId(i as u32)).copied().unwrap_or(0);
                m.padded(i) == want
            })
        } else {
            self.pairs.iter().all(|&(p, c)| m.get(p) >= c)
        }
    }
}

/// Per-(place, transition) token effect: `W(t,p) − W(p,t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n_places: usize,
    n_transitions: usize,
    entries: Vec<i64>,
}

impl IncidenceMatrix {
    pub fn get(&self, p: PlaceId, t: TransitionId) -> i64 {
        self.entries[p.index() * self.n_transitions + t.index()]
    }

    pub fn place_count(&self) -> usize {
        self.n_places
    }

    pub fn transition_count(&self) -> usize {
        self.n_transitions
    }

    /// State equation step: `m + C·count_vector(σ)` for a firing count vector.
    pub fn apply(&self, m: &Marking, counts: &[u64]) -> Option<Marking> {
        let mut out = Marking::empty();
        for p in 0..self.n_places {
            let mut v = m.padded(p) as i64;
            for (t, &k) in counts.iter().enumerate() {
                v += self.entries[p * self.n_transitions + t] * k as i64;
            }
            if v < 0 {
                return None;
            }
            out.set(PlaceId(p as u32), v as u32);
        }
        Some(out)
    }
}

/// A place/transition net with weighted arcs and an initial marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<TransitionInfo>,
    /// `W(p,t)` for arcs place -> transition.
    input_arcs: BTreeMap<(TransitionId, PlaceId), u32>,
    /// `W(t,p)` for arcs transition -> place.
    output_arcs: BTreeMap<(TransitionId, PlaceId), u32>,
    initial: Marking,
}

/// Incremental construction; names are resolved and sorted at [`NetBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<(String, String, bool)>,
    arcs: Vec<(String, String, u32)>,
    initial: Vec<(String, u32)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        NetBuilder::default()
    }

    pub fn place(mut self, id: &str) -> Self {
        self.places.push(id.to_string());
        self
    }

    pub fn places(mut self, ids: &[&str]) -> Self {
        self.places.extend(ids.iter().map(|s| s.to_string()));
        self
    }

    pub fn transition(mut self, id: &str, label: &str, observable: bool) -> Self {
        self.transitions
            .push((id.to_string(), label.to_string(), observable));
        self
    }

    pub fn arc(mut self, from: &str, to: &str) -> Self {
        self.arcs.push((from.to_string(), to.to_string(), 1));
        self
    }

    pub fn weighted_arc(mut self, from: &str, to: &str, weight: u32) -> Self {
        self.arcs.push((from.to_string(), to.to_string(), weight));
        self
    }

    pub fn initial(mut self, place: &str, count: u32) -> Self {
        self.initial.push((place.to_string(), count));
        self
    }

    pub fn build(self) -> Result<PetriNet, NetError> {
        let mut places = self.places;
        places.sort();
        if let Some(w) = places.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetError::DuplicateId(w[0].clone()));
        }
        let mut transitions: Vec<TransitionInfo> = self
            .transitions
            .into_iter()
            .map(|(id, label, observable)| TransitionInfo {
                id,
                label,
                observable,
            })
            .collect();
        transitions.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = transitions.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(NetError::DuplicateId(w[0].id.clone()));
        }
        let place_set: BTreeSet<&str> = places.iter().map(|s| s.as_str()).collect();
        for t in &transitions {
            if place_set.contains(t.id.as_str()) {
                return Err(NetError::DuplicateId(t.id.clone()));
            }
        }
        let mut net = PetriNet {
            places,
            transitions,
            input_arcs: BTreeMap::new(),
            output_arcs: BTreeMap::new(),
            initial: Marking::empty(),
        };
        for (from, to, weight) in self.arcs {
            net.add_arc(&from, &to, weight)?;
        }
        let mut initial = Marking::empty();
        for (place, count) in self.initial {
            let p = net
                .place_id(&place)
                .ok_or(NetError::UnknownPlace(place))?;
            initial.set(p, count);
        }
        net.initial = initial;
        Ok(net)
    }
}

impl PetriNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::new()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places
            .iter()
            .position(|p| p == name)
            .map(|i| PlaceId(i as u32))
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.id == name)
            .map(|i| TransitionId(i as u32))
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()]
    }

    pub fn place_names(&self) -> impl Iterator<Item = &str> {
        self.places.iter().map(|s| s.as_str())
    }

    pub fn transition(&self, t: TransitionId) -> &TransitionInfo {
        &self.transitions[t.index()]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (TransitionId, &TransitionInfo)> {
        self.transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (TransitionId(i as u32), t))
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn set_initial_marking(&mut self, m: Marking) {
        self.initial = m;
    }

    /// All arcs as `(from, to, weight)` name triples, deterministic order:
    /// place->transition arcs first, then transition->place.
    pub fn arcs(&self) -> Vec<(String, String, u32)> {
        let mut out = Vec::new();
        for (&(t, p), &w) in &self.input_arcs {
            out.push((
                self.places[p.index()].clone(),
                self.transitions[t.index()].id.clone(),
                w,
            ));
        }
        for (&(t, p), &w) in &self.output_arcs {
            out.push((
                self.transitions[t.index()].id.clone(),
                self.places[p.index()].clone(),
                w,
            ));
        }
        out
    }

    pub fn input_weight(&self, p: PlaceId, t: TransitionId) -> u32 {
        self.input_arcs.get(&(t, p)).copied().unwrap_or(0)
    }

    pub fn output_weight(&self, t: TransitionId, p: PlaceId) -> u32 {
        self.output_arcs.get(&(t, p)).copied().unwrap_or(0)
    }

    /// Input arcs of `t` as `(place, weight)`.
    pub fn preset(&self, t: TransitionId) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.input_arcs
            .range((t, PlaceId(0))..=(t, PlaceId(u32::MAX)))
            .map(|(&(_, p), &w)| (p, w))
    }

    /// Output arcs of `t` as `(place, weight)`.
    pub fn postset(&self, t: TransitionId) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.output_arcs
            .range((t, PlaceId(0))..=(t, PlaceId(u32::MAX)))
            .map(|(&(_, p), &w)| (p, w))
    }

    /// Whether any arc enters `p` (from any transition).
    pub fn has_incoming(&self, p: PlaceId) -> bool {
        self.output_arcs.keys().any(|&(_, q)| q == p)
    }

    /// Whether any arc leaves `p` (to any transition).
    pub fn has_outgoing(&self, p: PlaceId) -> bool {
        self.input_arcs.keys().any(|&(_, q)| q == p)
    }

    /// Append a fresh place; existing ids stay valid.
    pub fn add_place(&mut self, name: &str) -> Result<PlaceId, NetError> {
        if self.place_id(name).is_some() || self.transition_id(name).is_some() {
            return Err(NetError::DuplicateId(name.to_string()));
        }
        self.places.push(name.to_string());
        Ok(PlaceId(self.places.len() as u32 - 1))
    }

    /// Append a fresh transition.
    pub fn add_transition(
        &mut self,
        id: &str,
        label: &str,
        observable: bool,
    ) -> Result<TransitionId, NetError> {
        if self.place_id(id).is_some() || self.transition_id(id).is_some() {
            return Err(NetError::DuplicateId(id.to_string()));
        }
        self.transitions.push(TransitionInfo {
            id: id.to_string(),
            label: label.to_string(),
            observable,
        });
        Ok(TransitionId(self.transitions.len() as u32 - 1))
    }

    /// Add one arc by node names, inferring the direction.
    pub fn add_arc(&mut self, from: &str, to: &str, weight: u32) -> Result<(), NetError> {
        if weight == 0 {
            return Err(NetError::ZeroWeightArc {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        if let (Some(p), Some(t)) = (self.place_id(from), self.transition_id(to)) {
            if self.input_arcs.insert((t, p), weight).is_some() {
                return Err(NetError::DuplicateArc {
                    from: from.to_string(),
                    to: to.to_string(),
                });
            }
            return Ok(());
        }
        match (self.transition_id(from), self.place_id(to)) {
            (Some(t), Some(p)) => {
                if self.output_arcs.insert((t, p), weight).is_some() {
                    return Err(NetError::DuplicateArc {
                        from: from.to_string(),
                        to: to.to_string(),
                    });
                }
                Ok(())
            }
            _ => {
                let known = |n: &str| {
                    self.place_id(n).is_some() || self.transition_id(n).is_some()
                };
                if !known(from) {
                    Err(NetError::UnknownNode(from.to_string()))
                } else if !known(to) {
                    Err(NetError::UnknownNode(to.to_string()))
                } else {
                    Err(NetError::InvalidArc {
                        from: from.to_string(),
                        to: to.to_string(),
                    })
                }
            }
        }
    }

    /// Remove the most recently added place. Only trailing, arc-free places
    /// can go, so earlier ids never shift; used to revert patches.
    pub fn pop_place(&mut self, name: &str) -> Result<(), NetError> {
        match self.places.last() {
            Some(last) if last == name => {}
            _ => return Err(NetError::UnknownPlace(name.to_string())),
        }
        let p = PlaceId(self.places.len() as u32 - 1);
        if self.input_arcs.keys().any(|&(_, q)| q == p)
            || self.output_arcs.keys().any(|&(_, q)| q == p)
            || self.initial.get(p) > 0
        {
            return Err(NetError::UnknownPlace(name.to_string()));
        }
        self.places.pop();
        Ok(())
    }

    /// Remove the most recently added transition; see [`PetriNet::pop_place`].
    pub fn pop_transition(&mut self, name: &str) -> Result<(), NetError> {
        match self.transitions.last() {
            Some(last) if last.id == name => {}
            _ => return Err(NetError::UnknownTransition(name.to_string())),
        }
        let t = TransitionId(self.transitions.len() as u32 - 1);
        if self.input_arcs.keys().any(|&(s, _)| s == t)
            || self.output_arcs.keys().any(|&(s, _)| s == t)
        {
            return Err(NetError::UnknownTransition(name.to_string()));
        }
        self.transitions.pop();
        Ok(())
    }

    /// Remove an existing arc, returning its weight.
    pub fn remove_arc(&mut self, from: &str, to: &str) -> Result<u32, NetError> {
        if let (Some(p), Some(t)) = (self.place_id(from), self.transition_id(to)) {
            return self
                .input_arcs
                .remove(&(t, p))
                .ok_or_else(|| NetError::UnknownNode(alloc::format!("{from} -> {to}")));
        }
        if let (Some(t), Some(p)) = (self.transition_id(from), self.place_id(to)) {
            return self
                .output_arcs
                .remove(&(t, p))
                .ok_or_else(|| NetError::UnknownNode(alloc::format!("{from} -> {to}")));
        }
        Err(NetError::UnknownNode(alloc::format!("{from} -> {to}")))
    }

    /// Resolve sparse `(place name, count)` pairs into a marking.
    pub fn marking_from_pairs(&self, pairs: &[(String, u32)]) -> Result<Marking, NetError> {
        let mut m = Marking::empty();
        for (name, count) in pairs {
            let p = self
                .place_id(name)
                .ok_or_else(|| NetError::UnknownPlace(name.clone()))?;
            m.set(p, *count);
        }
        Ok(m)
    }

    /// Resolve a secret-marking pattern.
    pub fn marking_pattern(
        &self,
        pairs: &[(String, u32)],
        exact: bool,
    ) -> Result<MarkingPattern, NetError> {
        let mut resolved = Vec::with_capacity(pairs.len());
        for (name, count) in pairs {
            let p = self
                .place_id(name)
                .ok_or_else(|| NetError::UnknownPlace(name.clone()))?;
            resolved.push((p, *count));
        }
        resolved.sort_unstable();
        Ok(MarkingPattern {
            pairs: resolved,
            exact,
        })
    }

    /// Exact pattern for a full marking (used when re-deriving secrets on a
    /// patched net).
    pub fn pattern_of_marking(&self, m: &Marking) -> MarkingPattern {
        MarkingPattern {
            pairs: m.iter_marked().collect(),
            exact: true,
        }
    }

    fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        if m.counts.len() > self.places.len() {
            return Err(NetError::ForeignMarking);
        }
        Ok(())
    }

    /// Transitions enabled at `m`: every input place holds at least the arc
    /// weight. Ascending transition-id order.
    pub fn enabled(&self, m: &Marking) -> Result<Vec<TransitionId>, NetError> {
        self.check_marking(m)?;
        Ok((0..self.transitions.len() as u32)
            .map(TransitionId)
            .filter(|&t| self.preset(t).all(|(p, w)| m.get(p) >= w))
            .collect())
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.preset(t).all(|(p, w)| m.get(p) >= w)
    }

    /// Fire `t` at `m`: `m'(p) = m(p) − W(p,t) + W(t,p)`.
    ///
    /// Refuses to fire a disabled transition rather than produce a negative
    /// count.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, NetError> {
        self.check_marking(m)?;
        if !self.is_enabled(m, t) {
            return Err(NetError::NotEnabled {
                transition: self.transitions[t.index()].id.clone(),
            });
        }
        let mut out = m.clone();
        for (p, w) in self.preset(t) {
            out.set(p, out.get(p) - w);
        }
        for (p, w) in self.postset(t) {
            let count = out.get(p).checked_add(w).ok_or_else(|| {
                NetError::TokenBoundExceeded {
                    place: self.places[p.index()].clone(),
                    bound: u32::MAX,
                }
            })?;
            out.set(p, count);
        }
        Ok(out)
    }

    /// `C(p,t) = W(t,p) − W(p,t)`, recomputable after structural patches.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let np = self.places.len();
        let nt = self.transitions.len();
        let mut entries = alloc::vec![0i64; np * nt];
        for (&(t, p), &w) in &self.output_arcs {
            entries[p.index() * nt + t.index()] += w as i64;
        }
        for (&(t, p), &w) in &self.input_arcs {
            entries[p.index() * nt + t.index()] -= w as i64;
        }
        IncidenceMatrix {
            n_places: np,
            n_transitions: nt,
            entries,
        }
    }

    /// Run a firing sequence from the initial marking.
    pub fn fire_sequence(&self, names: &[&str]) -> Result<Marking, NetError> {
        let mut m = self.initial.clone();
        for name in names {
            let t = self
                .transition_id(name)
                .ok_or_else(|| NetError::UnknownTransition(name.to_string()))?;
            m = self.fire(&m, t)?;
        }
        Ok(m)
    }
}

/// Bounds for reachability exploration; exceeding either reports the net as
/// possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplorationLimits {
    pub max_states: usize,
    pub max_tokens_per_place: u32,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        ExplorationLimits {
            max_states: 100_000,
            max_tokens_per_place: 255,
        }
    }
}

/// The reachability graph of a net, as an LTS whose states are reachable
/// markings (BFS discovery order, named `s0`, `s1`, …) plus the marking
/// behind every state and the normalized secret state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityGraph {
    pub lts: Lts,
    pub markings: Vec<Marking>,
    pub secret_states: StateSet,
}

impl ReachabilityGraph {
    pub fn secret_spec(&self) -> crate::lts::SecretSpec {
        crate::lts::SecretSpec::new(self.secret_states.clone())
    }

    pub fn marking_of(&self, q: StateId) -> &Marking {
        &self.markings[q.index()]
    }
}

/// Build the reachability graph of `net`, marking as secret every state
/// whose marking matches one of `secrets`.
///
/// Transitions are explored in ascending id order and states numbered in BFS
/// discovery order, so two runs over the same net give identical graphs.
/// The LTS alphabet is the full transition set; event indices coincide with
/// transition indices.
pub fn build_reachability_graph(
    net: &PetriNet,
    secrets: &[MarkingPattern],
    limits: &ExplorationLimits,
) -> Result<ReachabilityGraph, NetError> {
    for pattern in secrets {
        for &(p, _) in pattern.pairs() {
            if p.index() >= net.place_count() {
                return Err(NetError::UnknownPlace(alloc::format!("#{}", p.0)));
            }
        }
    }
    let check_tokens = |m: &Marking| -> Result<(), NetError> {
        for (p, c) in m.iter_marked() {
            if c > limits.max_tokens_per_place {
                return Err(NetError::TokenBoundExceeded {
                    place: net.place_name(p).to_string(),
                    bound: limits.max_tokens_per_place,
                });
            }
        }
        Ok(())
    };

    let m0 = net.initial_marking().clone();
    check_tokens(&m0)?;
    let mut index: BTreeMap<Marking, StateId> = BTreeMap::new();
    let mut markings: Vec<Marking> = Vec::new();
    let mut outgoing: Vec<Vec<(EventId, StateId)>> = Vec::new();
    index.insert(m0.clone(), StateId(0));
    markings.push(m0);
    outgoing.push(Vec::new());
    let mut queue = 0usize;
    while queue < markings.len() {
        let q = StateId(queue as u32);
        let m = markings[queue].clone();
        queue += 1;
        for t in net.enabled(&m)? {
            let m2 = net.fire(&m, t)?;
            check_tokens(&m2)?;
            let target = match index.get(&m2) {
                Some(&s) => s,
                None => {
                    if markings.len() >= limits.max_states {
                        return Err(NetError::StateBoundExceeded {
                            bound: limits.max_states,
                        });
                    }
                    let s = StateId(markings.len() as u32);
                    index.insert(m2.clone(), s);
                    markings.push(m2);
                    outgoing.push(Vec::new());
                    s
                }
            };
            outgoing[q.index()].push((EventId(t.0), target));
        }
    }

    let states: Vec<String> = (0..markings.len())
        .map(|i| alloc::format!("s{i}"))
        .collect();
    let events: Vec<EventInfo> = net
        .transitions
        .iter()
        .map(|t| EventInfo {
            id: t.id.clone(),
            label: t.label.clone(),
            observable: t.observable,
        })
        .collect();
    let lts = Lts::from_parts(states, StateId(0), events, outgoing);
    let secret_states = StateSet::from_iter(
        markings
            .iter()
            .enumerate()
            .filter(|(_, m)| secrets.iter().any(|s| s.matches(m)))
            .map(|(i, _)| StateId(i as u32)),
    );
    Ok(ReachabilityGraph {
        lts,
        markings,
        secret_states,
    })
}

/// An open workflow net: a net with asynchronous interface places and an
/// optional final marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwfNet {
    pub net: PetriNet,
    pub inputs: BTreeSet<PlaceId>,
    pub outputs: BTreeSet<PlaceId>,
    pub final_marking: Option<Marking>,
}

impl OwfNet {
    pub fn new(
        net: PetriNet,
        inputs: &[String],
        outputs: &[String],
        final_marking: Option<Marking>,
    ) -> Result<OwfNet, NetError> {
        let mut ins = BTreeSet::new();
        for name in inputs {
            ins.insert(
                net.place_id(name)
                    .ok_or_else(|| NetError::UnknownPlace(name.clone()))?,
            );
        }
        let mut outs = BTreeSet::new();
        for name in outputs {
            let p = net
                .place_id(name)
                .ok_or_else(|| NetError::UnknownPlace(name.clone()))?;
            if ins.contains(&p) {
                return Err(NetError::InterfaceOverlap(name.clone()));
            }
            outs.insert(p);
        }
        Ok(OwfNet {
            net,
            inputs: ins,
            outputs: outs,
            final_marking,
        })
    }

    pub fn is_interface(&self, p: PlaceId) -> bool {
        self.inputs.contains(&p) || self.outputs.contains(&p)
    }

    /// Non-interface places.
    pub fn core_places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        (0..self.net.place_count() as u32)
            .map(PlaceId)
            .filter(move |&p| !self.is_interface(p))
    }

    /// The unique core place without outgoing arcs, if there is exactly one.
    pub fn sink_place(&self) -> Option<PlaceId> {
        let mut sinks = self.core_places().filter(|&p| !self.net.has_outgoing(p));
        match (sinks.next(), sinks.next()) {
            (Some(p), None) => Some(p),
            _ => None,
        }
    }
}

/// Check the two workflow-net requirements on the core of `owf` (interface
/// places and their arcs are ignored): a single source place, a single sink
/// place, and every node on some path from source to sink.
///
/// Returns one diagnostic per violation; an empty list means the structure
/// is a workflow net.
pub fn validate_wf_structure(owf: &OwfNet) -> Vec<String> {
    let net = &owf.net;
    let mut diags = Vec::new();

    let core: BTreeSet<PlaceId> = owf.core_places().collect();
    let sources: Vec<PlaceId> = core
        .iter()
        .copied()
        .filter(|&p| !net.output_arcs.keys().any(|&(_, q)| q == p))
        .collect();
    let sinks: Vec<PlaceId> = core
        .iter()
        .copied()
        .filter(|&p| !net.input_arcs.keys().any(|&(_, q)| q == p))
        .collect();

    match sources.as_slice() {
        [_] => {}
        [] => diags.push("no source place: every place has incoming arcs".to_string()),
        many => diags.push(alloc::format!(
            "multiple source places: {}",
            join(many.iter().map(|&p| net.place_name(p)))
        )),
    }
    match sinks.as_slice() {
        [_] => {}
        [] => diags.push("no sink place: every place has outgoing arcs".to_string()),
        many => diags.push(alloc::format!(
            "multiple sink places: {}",
            join(many.iter().map(|&p| net.place_name(p)))
        )),
    }
    if sources.len() != 1 || sinks.len() != 1 {
        return diags;
    }
    let (source, sink) = (sources[0], sinks[0]);

    // node graph over core places and transitions, interface arcs dropped
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum Node {
        P(PlaceId),
        T(TransitionId),
    }
    let mut forward: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    let mut backward: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    let add = |from: Node, to: Node, fwd: &mut BTreeMap<Node, Vec<Node>>, bwd: &mut BTreeMap<Node, Vec<Node>>| {
        fwd.entry(from).or_default().push(to);
        bwd.entry(to).or_default().push(from);
    };
    for &(t, p) in net.input_arcs.keys() {
        if core.contains(&p) {
            add(Node::P(p), Node::T(t), &mut forward, &mut backward);
        }
    }
    for &(t, p) in net.output_arcs.keys() {
        if core.contains(&p) {
            add(Node::T(t), Node::P(p), &mut forward, &mut backward);
        }
    }
    let reach = |start: Node, edges: &BTreeMap<Node, Vec<Node>>| -> BTreeSet<Node> {
        let mut seen = BTreeSet::new();
        let mut work = alloc::vec![start];
        seen.insert(start);
        while let Some(n) = work.pop() {
            if let Some(nexts) = edges.get(&n) {
                for &m in nexts {
                    if seen.insert(m) {
                        work.push(m);
                    }
                }
            }
        }
        seen
    };
    let from_source = reach(Node::P(source), &forward);
    let to_sink = reach(Node::P(sink), &backward);

    for &p in &core {
        let n = Node::P(p);
        if !(from_source.contains(&n) && to_sink.contains(&n)) {
            diags.push(alloc::format!(
                "place `{}` lies on no path from `{}` to `{}`",
                net.place_name(p),
                net.place_name(source),
                net.place_name(sink)
            ));
        }
    }
    for (i, t) in net.transitions.iter().enumerate() {
        let n = Node::T(TransitionId(i as u32));
        if !(from_source.contains(&n) && to_sink.contains(&n)) {
            diags.push(alloc::format!(
                "transition `{}` lies on no path from `{}` to `{}`",
                t.id,
                net.place_name(source),
                net.place_name(sink)
            ));
        }
    }
    diags
}

fn join<'a>(items: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, s) in items.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(s);
    }
    out
}

/// A net-level model: a plain Petri net or an open workflow net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetModel {
    Plain(PetriNet),
    Owf(OwfNet),
}

impl NetModel {
    pub fn net(&self) -> &PetriNet {
        match self {
            NetModel::Plain(n) => n,
            NetModel::Owf(o) => &o.net,
        }
    }

    pub fn net_mut(&mut self) -> &mut PetriNet {
        match self {
            NetModel::Plain(n) => n,
            NetModel::Owf(o) => &mut o.net,
        }
    }

    pub fn as_owf(&self) -> Option<&OwfNet> {
        match self {
            NetModel::Plain(_) => None,
            NetModel::Owf(o) => Some(o),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_arc_net() -> PetriNet {
        PetriNet::builder()
            .places(&["p"])
            .transition("t", "t", true)
            .arc("p", "t")
            .initial("p", 1)
            .build()
            .unwrap()
    }

    #[test]
    fn enabled_minimal() {
        let net = single_arc_net();
        let t = net.transition_id("t").unwrap();
        let m = net.marking_from_pairs(&[("p".into(), 1)]).unwrap();
        assert_eq!(net.enabled(&m).unwrap(), alloc::vec![t]);
        let m0 = net.marking_from_pairs(&[("p".into(), 0)]).unwrap();
        assert_eq!(net.enabled(&m0).unwrap(), alloc::vec![]);
    }

    #[test]
    fn enabled_needs_all_inputs() {
        let net = PetriNet::builder()
            .places(&["p1", "p2"])
            .transition("t", "t", true)
            .arc("p1", "t")
            .arc("p2", "t")
            .build()
            .unwrap();
        let m = net.marking_from_pairs(&[("p1".into(), 1)]).unwrap();
        assert_eq!(net.enabled(&m).unwrap(), alloc::vec![]);
    }

    #[test]
    fn fire_moves_token() {
        let net = PetriNet::builder()
            .places(&["p", "q"])
            .transition("t", "t", true)
            .arc("p", "t")
            .arc("t", "q")
            .initial("p", 1)
            .build()
            .unwrap();
        let t = net.transition_id("t").unwrap();
        let m2 = net.fire(net.initial_marking(), t).unwrap();
        assert_eq!(m2, net.marking_from_pairs(&[("q".into(), 1)]).unwrap());
    }

    #[test]
    fn fire_self_loop_preserves_marking() {
        let net = PetriNet::builder()
            .places(&["p"])
            .transition("t", "t", true)
            .arc("p", "t")
            .arc("t", "p")
            .initial("p", 1)
            .build()
            .unwrap();
        let t = net.transition_id("t").unwrap();
        let m2 = net.fire(net.initial_marking(), t).unwrap();
        assert_eq!(&m2, net.initial_marking());
    }

    #[test]
    fn fire_weighted_arithmetic() {
        let net = PetriNet::builder()
            .places(&["p", "q"])
            .transition("t", "t", true)
            .weighted_arc("p", "t", 2)
            .weighted_arc("t", "q", 3)
            .initial("p", 2)
            .build()
            .unwrap();
        let t = net.transition_id("t").unwrap();
        let m2 = net.fire(net.initial_marking(), t).unwrap();
        assert_eq!(m2, net.marking_from_pairs(&[("q".into(), 3)]).unwrap());
    }

    #[test]
    fn fire_rejects_disabled() {
        let net = single_arc_net();
        let t = net.transition_id("t").unwrap();
        let m = net.marking_from_pairs(&[]).unwrap();
        assert_eq!(
            net.fire(&m, t),
            Err(NetError::NotEnabled {
                transition: "t".into()
            })
        );
    }

    #[test]
    fn incidence_entries() {
        let net = PetriNet::builder()
            .places(&["p", "q", "r"])
            .transition("t", "t", true)
            .arc("p", "t")
            .arc("r", "t")
            .arc("t", "r")
            .weighted_arc("t", "q", 3)
            .build()
            .unwrap();
        let c = net.incidence_matrix();
        let (p, q, r) = (
            net.place_id("p").unwrap(),
            net.place_id("q").unwrap(),
            net.place_id("r").unwrap(),
        );
        let t = net.transition_id("t").unwrap();
        assert_eq!(c.get(p, t), -1);
        assert_eq!(c.get(q, t), 3);
        assert_eq!(c.get(r, t), 0); // self-loop cancels
    }

    #[test]
    fn reachability_smallest_net() {
        let net = PetriNet::builder()
            .places(&["p", "q"])
            .transition("t", "t", true)
            .arc("p", "t")
            .arc("t", "q")
            .initial("p", 1)
            .build()
            .unwrap();
        let g = build_reachability_graph(&net, &[], &ExplorationLimits::default()).unwrap();
        assert_eq!(g.lts.state_count(), 2);
        assert_eq!(g.lts.edge_count(), 1);
        assert!(g.secret_states.is_empty());
    }

    #[test]
    fn reachability_self_loop_terminates() {
        let net = PetriNet::builder()
            .places(&["p"])
            .transition("t", "t", true)
            .arc("p", "t")
            .arc("t", "p")
            .initial("p", 1)
            .build()
            .unwrap();
        let g = build_reachability_graph(&net, &[], &ExplorationLimits::default()).unwrap();
        assert_eq!(g.lts.state_count(), 1);
        assert_eq!(g.lts.edge_count(), 1);
    }

    #[test]
    fn reachability_state_bound() {
        // token generator: t consumes nothing, produces p
        let net = PetriNet::builder()
            .places(&["p"])
            .transition("t", "t", true)
            .arc("t", "p")
            .build()
            .unwrap();
        let limits = ExplorationLimits {
            max_states: 10,
            max_tokens_per_place: 255,
        };
        assert_eq!(
            build_reachability_graph(&net, &[], &limits),
            Err(NetError::StateBoundExceeded { bound: 10 })
        );
    }

    #[test]
    fn reachability_token_bound() {
        let net = PetriNet::builder()
            .places(&["p"])
            .transition("t", "t", true)
            .arc("t", "p")
            .build()
            .unwrap();
        let limits = ExplorationLimits {
            max_states: 100_000,
            max_tokens_per_place: 7,
        };
        assert_eq!(
            build_reachability_graph(&net, &[], &limits),
            Err(NetError::TokenBoundExceeded {
                place: "p".into(),
                bound: 7
            })
        );
    }

    #[test]
    fn state_equation_on_firing_sequence() {
        let net = PetriNet::builder()
            .places(&["p", "q", "r"])
            .transition("a", "a", true)
            .transition("b", "b", true)
            .arc("p", "a")
            .arc("a", "q")
            .arc("q", "b")
            .weighted_arc("b", "r", 2)
            .initial("p", 1)
            .build()
            .unwrap();
        let m = net.fire_sequence(&["a", "b"]).unwrap();
        let c = net.incidence_matrix();
        // counts indexed by transition id order: a, b
        let via_equation = c.apply(net.initial_marking(), &[1, 1]).unwrap();
        assert_eq!(m, via_equation);
    }

    #[test]
    fn marking_pattern_matching() {
        let net = PetriNet::builder()
            .places(&["p", "q"])
            .transition("t", "t", true)
            .arc("p", "t")
            .build()
            .unwrap();
        let m = net
            .marking_from_pairs(&[("p".into(), 1), ("q".into(), 2)])
            .unwrap();
        let exact = net.marking_pattern(&[("p".into(), 1)], true).unwrap();
        assert!(!exact.matches(&m));
        let exact_full = net
            .marking_pattern(&[("p".into(), 1), ("q".into(), 2)], true)
            .unwrap();
        assert!(exact_full.matches(&m));
        let lower = net.marking_pattern(&[("q".into(), 1)], false).unwrap();
        assert!(lower.matches(&m));
        assert!(net.marking_pattern(&[("zz".into(), 1)], true).is_err());
    }

    #[test]
    fn wf_validation_minimal_chain() {
        let net = PetriNet::builder()
            .places(&["i", "o"])
            .transition("t", "t", true)
            .arc("i", "t")
            .arc("t", "o")
            .initial("i", 1)
            .build()
            .unwrap();
        let owf = OwfNet::new(net, &[], &[], None).unwrap();
        assert_eq!(validate_wf_structure(&owf), Vec::<String>::new());
    }

    #[test]
    fn wf_validation_flags_isolated_place() {
        let net = PetriNet::builder()
            .places(&["i", "o", "x"])
            .transition("t", "t", true)
            .arc("i", "t")
            .arc("t", "o")
            .build()
            .unwrap();
        let owf = OwfNet::new(net, &[], &[], None).unwrap();
        let diags = validate_wf_structure(&owf);
        // x is both an extra source and an extra sink
        assert!(!diags.is_empty());
        assert!(diags.iter().any(|d| d.contains('x')));
    }

    #[test]
    fn wf_validation_ignores_interface_places() {
        let net = PetriNet::builder()
            .places(&["i", "o", "chan"])
            .transition("t", "t", true)
            .arc("i", "t")
            .arc("t", "o")
            .arc("t", "chan")
            .build()
            .unwrap();
        let owf = OwfNet::new(net, &[], &["chan".into()], None).unwrap();
        assert_eq!(validate_wf_structure(&owf), Vec::<String>::new());
    }

    #[test]
    fn arcs_between_same_kind_rejected() {
        let err = PetriNet::builder()
            .places(&["p", "q"])
            .transition("t", "t", true)
            .arc("p", "q")
            .build()
            .unwrap_err();
        assert_eq!(
            err,
            NetError::InvalidArc {
                from: "p".into(),
                to: "q".into()
            }
        );
    }

    #[test]
    fn marking_padded_equality() {
        let mut a = Marking::empty();
        a.set(PlaceId(0), 1);
        let mut b = Marking::empty();
        b.set(PlaceId(0), 1);
        b.set(PlaceId(3), 0);
        assert_eq!(a, b);
        assert_eq!(a.cmp(&b), Ordering::Equal);
    }
}
