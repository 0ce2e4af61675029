//! Deterministic symbolic observation graph: the quotient of an LTS under
//! unobservable saturation, built on-the-fly by depth-first exploration of
//! observable events.
//!
//! Each node (aggregate) is a non-empty, saturation-closed state set — the
//! observer's exact state estimate after some observation. Edges carry
//! observable events; for each `(aggregate, event)` pair there is at most one
//! successor, so observable words address aggregates uniquely.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lts::{EventId, Lts, SecretSpec, Word};
use crate::stateset::{img, saturate, StateSet};

/// Index of an aggregate in its [`Sog`], in DFS discovery order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateId(pub u32);

impl AggregateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One node of the SOG: a saturation-closed, non-empty state estimate with
/// its secrecy flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub id: AggregateId,
    pub states: StateSet,
    /// Some member state is secret.
    pub contains_secret: bool,
    /// Every member state is secret: reaching this aggregate discloses.
    pub all_secret: bool,
}

/// How an aggregate was first reached during construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discovery {
    /// Observable word of the DFS path that discovered the aggregate.
    pub trace: Word,
    /// Aggregate the discovering edge left from (the aggregate itself for
    /// the initial one).
    pub source: AggregateId,
    /// Discovering event; `None` only for the initial aggregate.
    pub event: Option<EventId>,
}

/// Deterministic symbolic observation graph over an LTS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sog {
    aggregates: Vec<Aggregate>,
    initial: AggregateId,
    edges: BTreeMap<(AggregateId, EventId), AggregateId>,
    discovery: Vec<Discovery>,
}

impl Sog {
    pub fn aggregate_count(&self) -> usize {
        self.aggregates.len()
    }

    pub fn initial(&self) -> AggregateId {
        self.initial
    }

    pub fn aggregate(&self, a: AggregateId) -> &Aggregate {
        &self.aggregates[a.index()]
    }

    pub fn aggregates(&self) -> impl Iterator<Item = &Aggregate> {
        self.aggregates.iter()
    }

    pub fn discovery(&self, a: AggregateId) -> &Discovery {
        &self.discovery[a.index()]
    }

    pub fn successor(&self, a: AggregateId, e: EventId) -> Option<AggregateId> {
        self.edges.get(&(a, e)).copied()
    }

    /// Edges in deterministic `(source, event)` order.
    pub fn edges(&self) -> impl Iterator<Item = (AggregateId, EventId, AggregateId)> + '_ {
        self.edges.iter().map(|(&(a, e), &b)| (a, e, b))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Aggregate reached from the initial one by an observable word, if the
    /// word labels a path.
    pub fn walk(&self, w: &Word) -> Option<AggregateId> {
        let mut a = self.initial;
        for &e in w.iter() {
            a = self.successor(a, e)?;
        }
        Some(a)
    }

    /// Aggregates with `all_secret`, ascending.
    pub fn disclosing_aggregates(&self) -> impl Iterator<Item = &Aggregate> {
        self.aggregates.iter().filter(|a| a.all_secret)
    }
}

/// Observable events enabled from the state set `a`, in lexicographic event
/// id order: those with a non-empty image.
pub fn enable_obs(lts: &Lts, a: &StateSet) -> Vec<EventId> {
    let mut out = Vec::new();
    for e in lts.observable_events() {
        match img(lts, a, e) {
            Ok(s) if !s.is_empty() => out.push(e),
            _ => {}
        }
    }
    out
}

/// Build the deterministic SOG of `lts` with secrecy flags taken from
/// `secret`. See [`build_sog`]; this variant is what the simple-opacity
/// checker uses, as construction order fixes counterexample traces.
pub(crate) fn build_sog_inner(lts: &Lts, secret: &SecretSpec) -> Sog {
    let flags = |states: &StateSet| -> (bool, bool) {
        let mut contains = false;
        let mut all = true;
        for q in states.iter() {
            if secret.contains(q) {
                contains = true;
            } else {
                all = false;
            }
        }
        (contains, contains && all)
    };

    let a0_states = saturate(lts, &StateSet::singleton(lts.initial()));
    let (contains, all) = flags(&a0_states);
    let mut aggregates = alloc::vec![Aggregate {
        id: AggregateId(0),
        states: a0_states.clone(),
        contains_secret: contains,
        all_secret: all,
    }];
    let mut discovery = alloc::vec![Discovery {
        trace: Word::empty(),
        source: AggregateId(0),
        event: None,
    }];
    let mut treated: BTreeMap<StateSet, AggregateId> = BTreeMap::new();
    treated.insert(a0_states.clone(), AggregateId(0));
    let mut edges = BTreeMap::new();

    // DFS with an explicit stack of (aggregate, pending events); the current
    // observable trace is maintained alongside and popped with the frame.
    let mut stack: Vec<(AggregateId, Vec<EventId>, usize)> = Vec::new();
    let mut trace: Vec<EventId> = Vec::new();
    let pending = enable_obs(lts, &a0_states);
    stack.push((AggregateId(0), pending, 0));

    while let Some((a, pending, next)) = stack.last_mut() {
        if *next >= pending.len() {
            stack.pop();
            trace.pop();
            continue;
        }
        let a = *a;
        let e = pending[*next];
        *next += 1;

        let source_states = aggregates[a.index()].states.clone();
        let stepped = img(lts, &source_states, e).expect("enabled event is observable");
        let target_states = saturate(lts, &stepped);
        debug_assert!(!target_states.is_empty());
        match treated.get(&target_states) {
            Some(&b) => {
                edges.insert((a, e), b);
            }
            None => {
                let b = AggregateId(aggregates.len() as u32);
                let (contains, all) = flags(&target_states);
                let mut w = trace.clone();
                w.push(e);
                aggregates.push(Aggregate {
                    id: b,
                    states: target_states.clone(),
                    contains_secret: contains,
                    all_secret: all,
                });
                discovery.push(Discovery {
                    trace: Word(w),
                    source: a,
                    event: Some(e),
                });
                treated.insert(target_states.clone(), b);
                edges.insert((a, e), b);
                trace.push(e);
                let pending = enable_obs(lts, &target_states);
                stack.push((b, pending, 0));
            }
        }
    }

    Sog {
        aggregates,
        initial: AggregateId(0),
        edges,
        discovery,
    }
}

/// Build the deterministic SOG of `lts`: the initial aggregate is the
/// saturation of the initial state, and each edge `(a, σ, a')` satisfies
/// `a' = saturate(img(a, σ))`. Every aggregate is reachable; rebuilding
/// yields identical ids, edges, and rendering.
pub fn build_sog(lts: &Lts, secret: &SecretSpec) -> Sog {
    build_sog_inner(lts, secret)
}

/// Rendering options for [`export_dot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DotOptions {
    /// Put the member state names into each node label.
    pub show_states: bool,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions { show_states: true }
    }
}

/// Graphviz rendering of a SOG. Aggregates are boxes labeled with their
/// member states; fully secret aggregates get a double border. Output is
/// byte-for-byte deterministic for a given graph and options.
pub fn export_dot(sog: &Sog, lts: &Lts, options: &DotOptions) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "digraph sog {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box];");
    let _ = writeln!(out, "  __init [shape=point, label=\"\"];");
    for agg in sog.aggregates() {
        let mut label = alloc::format!("a{}", agg.id.0);
        if options.show_states {
            label.push_str("\\n{");
            for (i, q) in agg.states.iter().enumerate() {
                if i > 0 {
                    label.push(',');
                }
                label.push_str(lts.state_name(q));
            }
            label.push('}');
        }
        let marks = if agg.all_secret {
            ", peripheries=2, style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        let _ = writeln!(out, "  a{} [label=\"{}\"{}];", agg.id.0, label, marks);
    }
    let _ = writeln!(out, "  __init -> a{};", sog.initial().0);
    for (a, e, b) in sog.edges() {
        let _ = writeln!(
            out,
            "  a{} -> a{} [label=\"{}\"];",
            a.0,
            b.0,
            lts.event(e).label
        );
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{EventInfo, StateId};

    fn ev(id: &str, observable: bool) -> EventInfo {
        EventInfo {
            id: id.into(),
            label: id.into(),
            observable,
        }
    }

    fn lts(
        states: &[&str],
        initial: &str,
        events: &[(&str, bool)],
        edges: &[(&str, &str, &str)],
    ) -> Lts {
        Lts::new(
            states.iter().map(|s| s.to_string()).collect(),
            initial,
            events.iter().map(|&(id, o)| ev(id, o)).collect(),
            &edges
                .iter()
                .map(|&(f, e, t)| (f.to_string(), e.to_string(), t.to_string()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn secret(ids: &[u32]) -> SecretSpec {
        SecretSpec::new(StateSet::from_iter(ids.iter().map(|&i| StateId(i))))
    }

    #[test]
    fn fully_observable_deterministic_lts_maps_to_itself() {
        let l = lts(
            &["q0", "q1", "q2"],
            "q0",
            &[("a", true), ("b", true)],
            &[("q0", "a", "q1"), ("q1", "b", "q2")],
        );
        let sog = build_sog(&l, &secret(&[]));
        assert_eq!(sog.aggregate_count(), 3);
        assert_eq!(sog.edge_count(), 2);
        for agg in sog.aggregates() {
            assert_eq!(agg.states.len(), 1);
            assert!(!agg.all_secret);
        }
    }

    #[test]
    fn terminal_aggregate_has_no_enabled_events() {
        let l = lts(&["q0"], "q0", &[("a", true)], &[]);
        let sog = build_sog(&l, &secret(&[]));
        let a0 = sog.aggregate(sog.initial());
        assert_eq!(enable_obs(&l, &a0.states), alloc::vec![]);
    }

    #[test]
    fn enable_obs_sorted_by_event_id() {
        let l = lts(
            &["q0", "q1"],
            "q0",
            &[("b", true), ("a", true)],
            &[("q0", "b", "q1"), ("q0", "a", "q1")],
        );
        let sog = build_sog(&l, &secret(&[]));
        let enabled = enable_obs(&l, &sog.aggregate(sog.initial()).states);
        let names: Vec<&str> = enabled.iter().map(|&e| l.event(e).id.as_str()).collect();
        assert_eq!(names, alloc::vec!["a", "b"]);
    }

    #[test]
    fn saturation_groups_unobservable_wake() {
        // q0 -o-> q1 -u-> q2; aggregate after o is {q1,q2}
        let l = lts(
            &["q0", "q1", "q2"],
            "q0",
            &[("o", true), ("u", false)],
            &[("q0", "o", "q1"), ("q1", "u", "q2")],
        );
        let sog = build_sog(&l, &secret(&[1]));
        assert_eq!(sog.aggregate_count(), 2);
        let o = l.find_event("o").unwrap();
        let a1 = sog.successor(sog.initial(), o).unwrap();
        let agg = sog.aggregate(a1);
        assert_eq!(agg.states, StateSet::from_iter([StateId(1), StateId(2)]));
        assert!(agg.contains_secret);
        assert!(!agg.all_secret);
    }

    #[test]
    fn discovery_traces_are_dfs_paths() {
        let l = lts(
            &["q0", "q1", "q2"],
            "q0",
            &[("a", true), ("b", true)],
            &[("q0", "a", "q1"), ("q1", "b", "q2")],
        );
        let sog = build_sog(&l, &secret(&[]));
        let a = l.find_event("a").unwrap();
        let b = l.find_event("b").unwrap();
        let a2 = sog.walk(&Word(alloc::vec![a, b])).unwrap();
        assert_eq!(sog.discovery(a2).trace, Word(alloc::vec![a, b]));
        assert_eq!(sog.discovery(a2).event, Some(b));
    }

    #[test]
    fn rebuild_is_stable() {
        let l = lts(
            &["q0", "q1", "q2", "q3"],
            "q0",
            &[("a", true), ("u", false)],
            &[
                ("q0", "a", "q1"),
                ("q1", "u", "q2"),
                ("q2", "a", "q3"),
                ("q3", "a", "q1"),
            ],
        );
        let s = secret(&[2]);
        let sog1 = build_sog(&l, &s);
        let sog2 = build_sog(&l, &s);
        assert_eq!(sog1, sog2);
        let d1 = export_dot(&sog1, &l, &DotOptions::default());
        let d2 = export_dot(&sog2, &l, &DotOptions::default());
        assert_eq!(d1, d2);
    }

    #[test]
    fn dot_single_node_no_edges() {
        let l = lts(&["q0"], "q0", &[], &[]);
        let sog = build_sog(&l, &secret(&[]));
        let dot = export_dot(&sog, &l, &DotOptions::default());
        assert!(dot.contains("a0"));
        assert!(!dot.contains("a0 -> "));
    }

    #[test]
    fn dot_edge_carries_event_label() {
        let l = lts(
            &["q0", "q1"],
            "q0",
            &[("go", true)],
            &[("q0", "go", "q1")],
        );
        let sog = build_sog(&l, &secret(&[]));
        let dot = export_dot(&sog, &l, &DotOptions::default());
        assert!(dot.contains("a0 -> a1 [label=\"go\"];"));
    }

    #[test]
    fn aggregate_matches_observer_estimate() {
        let l = lts(
            &["q0", "q1", "q2", "q3"],
            "q0",
            &[("o", true), ("u", false)],
            &[
                ("q0", "u", "q1"),
                ("q0", "o", "q2"),
                ("q1", "o", "q3"),
                ("q3", "u", "q1"),
            ],
        );
        let sog = build_sog(&l, &secret(&[]));
        let o = l.find_event("o").unwrap();
        for w in [Word::empty(), Word(alloc::vec![o]), Word(alloc::vec![o, o])] {
            let reached = sog.walk(&w).map(|a| sog.aggregate(a).states.clone());
            let estimate = l.observationally_equivalent_runs(&w).unwrap();
            match reached {
                Some(states) => assert_eq!(states, estimate),
                None => assert!(estimate.is_empty()),
            }
        }
    }
}
