//! Enforcement of simple opacity by minimal padding: every disclosing
//! observation gains a fresh, unobservable, non-secret explanation, so the
//! observable language is unchanged and nothing the system could do before
//! is lost.
//!
//! The additions to cover are the observations of secret runs that have no
//! non-secret observationally equivalent run; on the observation graph these
//! are exactly the discovery traces of the fully secret aggregates. Treating
//! one violating aggregate repairs every trace that reaches it, so the patch
//! adds one dummy state and one fresh unobservable transition per violating
//! aggregate — and, on net-level models, one fresh place with unit-weight
//! arcs. Open workflow nets keep their single-sink shape: when the
//! disclosing marking sits on the sink, the arc into the sink is re-routed
//! through the dummy (`t → p_new → t_new → sink`); otherwise the dummy
//! transition drains into the sink directly instead of adding a dead place.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::checker::{check_simple, CounterExample, Verdict};
use crate::lts::{EventId, Lts, LtsError, SecretSpec, StateId, Word};
use crate::net::{
    build_reachability_graph, ExplorationLimits, NetError, NetModel, OwfNet, PlaceId,
    ReachabilityGraph, TransitionId,
};
use crate::sog::{AggregateId, Sog};

/// The observations that must gain new non-secret behavior: per violating
/// aggregate, its discovery trace (a witness for every run into it).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuperLanguageAdditions {
    pub traces: Vec<Word>,
}

impl SuperLanguageAdditions {
    pub fn contains(&self, w: &Word) -> bool {
        self.traces.iter().any(|t| t == w)
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Minimal observation-level additions for `sog`: the discovery traces of
/// its fully secret aggregates, deduplicated, in discovery order. Empty
/// exactly when the model is already opaque.
pub fn compute_min_superlanguage(sog: &Sog) -> SuperLanguageAdditions {
    let mut traces = Vec::new();
    for agg in sog.disclosing_aggregates() {
        let t = sog.discovery(agg.id).trace.clone();
        if !traces.contains(&t) {
            traces.push(t);
        }
    }
    SuperLanguageAdditions { traces }
}

/// One weighted arc, by node names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlowArc {
    pub from: String,
    pub to: String,
    pub weight: u32,
}

/// Everything a round of opacification added or removed. Applying the
/// listed removals and re-adding the removed arcs restores the original
/// model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnforcementPatch {
    /// `(fresh state, aggregate it covers)`.
    pub new_states: Vec<(String, AggregateId)>,
    /// Fresh unobservable transitions / events.
    pub new_transitions: Vec<String>,
    pub new_places: Vec<String>,
    pub removed_arcs: Vec<FlowArc>,
    pub added_arcs: Vec<FlowArc>,
    /// Incidence entries valid after the patch, for every touched
    /// `(place, transition)` pair.
    pub incidence_updates: Vec<(String, String, i64)>,
}

impl EnforcementPatch {
    pub fn is_identity(&self) -> bool {
        self.new_states.is_empty()
            && self.new_transitions.is_empty()
            && self.new_places.is_empty()
            && self.removed_arcs.is_empty()
            && self.added_arcs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnforceError {
    /// A counterexample trace is not among the computed additions.
    TraceMismatch(String),
    /// The disclosing marking marks no admissible host place.
    NoHostPlace(String),
    /// An open workflow net without a unique sink cannot take the
    /// sink-preserving patch.
    NoSink,
    /// No step of the witness run marked the sink.
    NoMarkingTransition(String),
    /// The patched model still discloses (broken input structures).
    IneffectivePatch,
    Net(NetError),
    Lts(LtsError),
}

impl fmt::Display for EnforceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnforceError::TraceMismatch(t) => {
                write!(f, "counterexample trace `{t}` is not a computed addition")
            }
            EnforceError::NoHostPlace(q) => {
                write!(f, "no admissible host place in the disclosing marking of `{q}`")
            }
            EnforceError::NoSink => write!(f, "workflow net has no identifiable sink place"),
            EnforceError::NoMarkingTransition(t) => {
                write!(f, "no transition marked the sink along trace `{t}`")
            }
            EnforceError::IneffectivePatch => {
                write!(f, "patched model still discloses the secret")
            }
            EnforceError::Net(e) => write!(f, "{e}"),
            EnforceError::Lts(e) => write!(f, "{e}"),
        }
    }
}

impl From<NetError> for EnforceError {
    fn from(e: NetError) -> Self {
        EnforceError::Net(e)
    }
}

impl From<LtsError> for EnforceError {
    fn from(e: LtsError) -> Self {
        EnforceError::Lts(e)
    }
}

/// Where an open-workflow-net patch hooks in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwfPatchPoint {
    /// The disclosing marking marks only the sink: re-route the arc of the
    /// transition that marked it.
    Sink { marker: TransitionId },
    /// A non-sink host place: the dummy transition drains into the sink.
    NonSink { host: PlaceId },
}

/// Arc rewiring computed for an open workflow net patch point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OwfRewiring {
    pub removed_arcs: Vec<FlowArc>,
    pub added_arcs: Vec<FlowArc>,
    pub new_places: Vec<String>,
}

/// Compute the sink-preserving rewiring for `owf` at `point`, using `t_new`
/// as the fresh unobservable transition.
///
/// At a sink point, the arc `(marker, sink)` is removed and replaced by
/// `marker → p_new → t_new → sink`, so the net keeps a single sink and
/// `t_new` sits on every path to completion. At a non-sink point no new
/// place is created; the single added pair is `host → t_new → sink`.
pub fn owf_final_place_repair(
    owf: &OwfNet,
    point: &OwfPatchPoint,
    t_new: &str,
    ordinal: usize,
) -> Result<OwfRewiring, EnforceError> {
    let sink = owf.sink_place().ok_or(EnforceError::NoSink)?;
    let sink_name = owf.net.place_name(sink).to_string();
    match *point {
        OwfPatchPoint::Sink { marker } => {
            let weight = owf.net.output_weight(marker, sink);
            if weight == 0 {
                return Err(EnforceError::NoMarkingTransition(
                    owf.net.transition(marker).id.clone(),
                ));
            }
            let marker_name = owf.net.transition(marker).id.clone();
            let p_new = fresh_name(
                &alloc::format!("{sink_name}__op{ordinal}"),
                |n| owf.net.place_id(n).is_none() && owf.net.transition_id(n).is_none(),
            );
            Ok(OwfRewiring {
                removed_arcs: alloc::vec![FlowArc {
                    from: marker_name.clone(),
                    to: sink_name.clone(),
                    weight,
                }],
                added_arcs: alloc::vec![
                    FlowArc {
                        from: marker_name,
                        to: p_new.clone(),
                        weight: 1,
                    },
                    FlowArc {
                        from: p_new.clone(),
                        to: t_new.to_string(),
                        weight: 1,
                    },
                    FlowArc {
                        from: t_new.to_string(),
                        to: sink_name,
                        weight: 1,
                    },
                ],
                new_places: alloc::vec![p_new],
            })
        }
        OwfPatchPoint::NonSink { host } => Ok(OwfRewiring {
            removed_arcs: Vec::new(),
            added_arcs: alloc::vec![
                FlowArc {
                    from: owf.net.place_name(host).to_string(),
                    to: t_new.to_string(),
                    weight: 1,
                },
                FlowArc {
                    from: t_new.to_string(),
                    to: sink_name,
                    weight: 1,
                },
            ],
            new_places: Vec::new(),
        }),
    }
}

/// Result of an enforcement round.
#[derive(Debug, Clone)]
pub struct Opacified {
    pub patch: EnforcementPatch,
    /// Patched net when the input was net-level.
    pub net: Option<NetModel>,
    /// Reachability graph of the patched net, when net-level.
    pub graph: Option<ReachabilityGraph>,
    /// Patched behavior: rebuilt from the patched net, or the directly
    /// extended LTS for transition-system inputs.
    pub lts: Lts,
    pub secret: SecretSpec,
    pub sog: Sog,
    pub verdict_after: Verdict,
}

/// Make `secret` opaque by padding.
///
/// `counterexamples` must come from a simple-opacity check of the same
/// model. Per violating aggregate (each is treated once, regardless of how
/// many counterexamples lead to it): the state reached by the witness trace
/// gains a fresh unobservable step into a fresh non-secret state, so the
/// disclosing estimate stops being fully secret; net-level models get the
/// corresponding place/transition/arc additions, with the workflow-net
/// special cases above. Already-opaque input yields an identity patch and
/// an unchanged model.
pub fn opacify(
    net: Option<(&NetModel, &ReachabilityGraph)>,
    lts: &Lts,
    secret: &SecretSpec,
    sog: &Sog,
    counterexamples: &[CounterExample],
    limits: &ExplorationLimits,
) -> Result<Opacified, EnforceError> {
    if counterexamples.is_empty() {
        let (verdict_after, sog_after) = check_simple(lts, secret);
        return Ok(Opacified {
            patch: EnforcementPatch::default(),
            net: net.map(|(m, _)| m.clone()),
            graph: net.map(|(_, g)| g.clone()),
            lts: lts.clone(),
            secret: secret.clone(),
            sog: sog_after,
            verdict_after,
        });
    }

    let minsl = compute_min_superlanguage(sog);
    for cx in counterexamples {
        if !minsl.contains(&cx.trace) {
            return Err(EnforceError::TraceMismatch(lts.render_word(&cx.trace)));
        }
    }

    let mut patch = EnforcementPatch::default();
    let mut patched_net = net.map(|(m, _)| m.clone());
    let mut lts_additions: Vec<(StateId, String, String)> = Vec::new();
    let mut treated: BTreeSet<AggregateId> = BTreeSet::new();
    let mut ordinal = 0usize;

    for cx in counterexamples {
        if !treated.insert(cx.target) {
            continue;
        }
        ordinal += 1;

        // the disclosing state: deterministic pick from the aggregate
        let q = sog
            .aggregate(cx.target)
            .states
            .max_state()
            .expect("aggregates are non-empty");
        let q_name = lts.state_name(q).to_string();
        let name_free = |n: &str| -> bool {
            lts.find_state(n).is_none()
                && lts.find_event(n).is_none()
                && patched_net
                    .as_ref()
                    .map(|m| m.net().place_id(n).is_none() && m.net().transition_id(n).is_none())
                    .unwrap_or(true)
                && !lts_additions.iter().any(|(_, t, s)| t == n || s == n)
                && !patch.new_places.iter().any(|p| p == n)
        };
        let q_new = fresh_name(&alloc::format!("{q_name}__op{ordinal}"), name_free);
        let t_base = cx
            .event
            .map(|e| lts.event(e).id.clone())
            .unwrap_or_else(|| q_name.clone());
        let t_new = fresh_name(&alloc::format!("{t_base}__op{ordinal}"), |n| {
            name_free(n) && n != q_new
        });

        patch.new_states.push((q_new.clone(), cx.target));
        patch.new_transitions.push(t_new.clone());

        if let Some((model, graph)) = net {
            let marking = graph.marking_of(q);
            let net_ref = model.net();
            let mut marked_core: Vec<PlaceId> = marking
                .iter_marked()
                .map(|(p, _)| p)
                .filter(|&p| match model.as_owf() {
                    Some(owf) => !owf.is_interface(p),
                    None => true,
                })
                .collect();
            if marked_core.is_empty() {
                return Err(EnforceError::NoHostPlace(q_name));
            }
            // highest token count first, then place name
            marked_core.sort_by(|&a, &b| {
                marking
                    .get(b)
                    .cmp(&marking.get(a))
                    .then_with(|| net_ref.place_name(a).cmp(net_ref.place_name(b)))
            });

            let rewiring = match model.as_owf() {
                Some(owf) => {
                    let sink = owf.sink_place();
                    let non_sink_hosts: Vec<PlaceId> = marked_core
                        .iter()
                        .copied()
                        .filter(|&p| Some(p) != sink)
                        .collect();
                    if let Some(&host) = non_sink_hosts.first() {
                        owf_final_place_repair(
                            owf,
                            &OwfPatchPoint::NonSink { host },
                            &t_new,
                            ordinal,
                        )?
                    } else {
                        let sink = sink.ok_or(EnforceError::NoSink)?;
                        let marker =
                            find_sink_marker(lts, graph, model.net(), &cx.trace, q, sink)?;
                        owf_final_place_repair(
                            owf,
                            &OwfPatchPoint::Sink { marker },
                            &t_new,
                            ordinal,
                        )?
                    }
                }
                None => {
                    let host = marked_core[0];
                    let host_name = net_ref.place_name(host).to_string();
                    let p_new = fresh_name(&alloc::format!("{host_name}__op{ordinal}"), |n| {
                        name_free(n) && n != q_new && n != t_new
                    });
                    OwfRewiring {
                        removed_arcs: Vec::new(),
                        added_arcs: alloc::vec![
                            FlowArc {
                                from: host_name,
                                to: t_new.clone(),
                                weight: 1,
                            },
                            FlowArc {
                                from: t_new.clone(),
                                to: p_new.clone(),
                                weight: 1,
                            },
                        ],
                        new_places: alloc::vec![p_new],
                    }
                }
            };

            let target = patched_net.as_mut().expect("net path");
            let inner = target.net_mut();
            inner.add_transition(&t_new, &t_new, false)?;
            for p in &rewiring.new_places {
                inner.add_place(p)?;
            }
            for arc in &rewiring.removed_arcs {
                inner.remove_arc(&arc.from, &arc.to)?;
            }
            for arc in &rewiring.added_arcs {
                inner.add_arc(&arc.from, &arc.to, arc.weight)?;
            }
            patch.new_places.extend(rewiring.new_places);
            patch.removed_arcs.extend(rewiring.removed_arcs);
            patch.added_arcs.extend(rewiring.added_arcs);
        }

        lts_additions.push((q, t_new, q_new));
    }

    // incidence entries for every touched pair, valid after the patch
    if let Some(model) = &patched_net {
        let inner = model.net();
        let mut touched: BTreeSet<(String, String)> = BTreeSet::new();
        for arc in patch.removed_arcs.iter().chain(patch.added_arcs.iter()) {
            let (p, t) = if inner.place_id(&arc.from).is_some() {
                (arc.from.clone(), arc.to.clone())
            } else {
                (arc.to.clone(), arc.from.clone())
            };
            touched.insert((p, t));
        }
        for (p_name, t_name) in touched {
            let p = inner
                .place_id(&p_name)
                .ok_or_else(|| NetError::UnknownPlace(p_name.clone()))?;
            let t = inner
                .transition_id(&t_name)
                .ok_or_else(|| NetError::UnknownTransition(t_name.clone()))?;
            let value = inner.output_weight(t, p) as i64 - inner.input_weight(p, t) as i64;
            patch.incidence_updates.push((p_name, t_name, value));
        }
    }

    // patched behavior: rebuild from the net, or extend the LTS directly
    let (patched_lts, patched_secret, patched_graph) = match (net, &patched_net) {
        (Some((_, graph)), Some(model)) => {
            let exact: Vec<_> = graph
                .secret_states
                .iter()
                .map(|s| model.net().pattern_of_marking(graph.marking_of(s)))
                .collect();
            let rebuilt = build_reachability_graph(model.net(), &exact, limits)?;
            let spec = rebuilt.secret_spec();
            (rebuilt.lts.clone(), spec, Some(rebuilt))
        }
        _ => {
            let mut extended = lts.clone();
            for (q, t_new, q_new) in &lts_additions {
                let e = extended.add_event(t_new, t_new, false)?;
                let s = extended.add_state(q_new)?;
                extended.add_edge(*q, e, s)?;
            }
            (extended, secret.clone(), None)
        }
    };

    let (verdict_after, patched_sog) = check_simple(&patched_lts, &patched_secret);
    if !verdict_after.opaque {
        return Err(EnforceError::IneffectivePatch);
    }
    Ok(Opacified {
        patch,
        net: patched_net,
        graph: patched_graph,
        lts: patched_lts,
        secret: patched_secret,
        sog: patched_sog,
        verdict_after,
    })
}

/// Undo a patch on a net-level model: drop added arcs, restore removed ones,
/// then pop the (trailing) fresh transitions and places.
pub fn revert_patch(model: &NetModel, patch: &EnforcementPatch) -> Result<NetModel, EnforceError> {
    let mut out = model.clone();
    let inner = out.net_mut();
    for arc in &patch.added_arcs {
        inner.remove_arc(&arc.from, &arc.to)?;
    }
    for arc in &patch.removed_arcs {
        inner.add_arc(&arc.from, &arc.to, arc.weight)?;
    }
    for t in patch.new_transitions.iter().rev() {
        inner.pop_transition(t)?;
    }
    for p in patch.new_places.iter().rev() {
        inner.pop_place(p)?;
    }
    Ok(out)
}

fn fresh_name(base: &str, free: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while !free(&name) {
        name.push('x');
    }
    name
}

/// Walk a witness run realizing `trace` from the initial state to `q` and
/// return the transition whose firing marked the sink place.
fn find_sink_marker(
    lts: &Lts,
    graph: &ReachabilityGraph,
    net: &crate::net::PetriNet,
    trace: &Word,
    q: StateId,
    sink: PlaceId,
) -> Result<TransitionId, EnforceError> {
    use alloc::collections::BTreeMap;
    type Key = (StateId, usize);
    let start: Key = (lts.initial(), 0);
    let goal: Key = (q, trace.len());
    let mut parents: BTreeMap<Key, (Key, EventId)> = BTreeMap::new();
    let mut queue: alloc::collections::VecDeque<Key> = alloc::collections::VecDeque::new();
    queue.push_back(start);
    let mut seen: BTreeSet<Key> = BTreeSet::new();
    seen.insert(start);
    while let Some((state, pos)) = queue.pop_front() {
        if (state, pos) == goal {
            break;
        }
        for &(e, t) in lts.successors(state) {
            let next = if lts.is_observable(e) {
                if pos < trace.len() && trace.0[pos] == e {
                    Some((t, pos + 1))
                } else {
                    None
                }
            } else {
                Some((t, pos))
            };
            if let Some(key) = next {
                if seen.insert(key) {
                    parents.insert(key, ((state, pos), e));
                    queue.push_back(key);
                }
            }
        }
    }
    if !seen.contains(&goal) {
        return Err(EnforceError::NoMarkingTransition(lts.render_word(trace)));
    }
    // walk back to the last step that raised the sink's token count
    let mut cur = goal;
    while cur != start {
        let (prev, e) = parents[&cur];
        let before = graph.marking_of(prev.0).get(sink);
        let after = graph.marking_of(cur.0).get(sink);
        if after > before {
            let id = &lts.event(e).id;
            return net
                .transition_id(id)
                .ok_or_else(|| EnforceError::Net(NetError::UnknownTransition(id.clone())));
        }
        cur = prev;
    }
    Err(EnforceError::NoMarkingTransition(lts.render_word(trace)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::EventInfo;
    use crate::net::PetriNet;
    use crate::stateset::StateSet;

    fn ev(id: &str, observable: bool) -> EventInfo {
        EventInfo {
            id: id.into(),
            label: id.into(),
            observable,
        }
    }

    fn two_state_disclosing() -> (Lts, SecretSpec) {
        let l = Lts::new(
            alloc::vec!["q0".into(), "q1".into()],
            "q0",
            alloc::vec![ev("o", true)],
            &[("q0".into(), "o".into(), "q1".into())],
        )
        .unwrap();
        let s = SecretSpec::new(StateSet::singleton(StateId(1)));
        (l, s)
    }

    #[test]
    fn lts_patch_restores_opacity() {
        let (l, s) = two_state_disclosing();
        let (verdict, sog) = check_simple(&l, &s);
        assert!(!verdict.opaque);
        let out = opacify(
            None,
            &l,
            &s,
            &sog,
            &verdict.counterexamples,
            &ExplorationLimits::default(),
        )
        .unwrap();
        assert!(out.verdict_after.opaque);
        assert_eq!(out.patch.new_transitions.len(), 1);
        assert_eq!(out.patch.new_states.len(), 1);
        // estimate after observing o now contains the dummy
        let o = out.lts.find_event("o").unwrap();
        let est = out
            .lts
            .observationally_equivalent_runs(&Word(alloc::vec![o]))
            .unwrap();
        assert_eq!(est.len(), 2);
    }

    #[test]
    fn identity_patch_on_opaque_model() {
        let l = Lts::new(
            alloc::vec!["q0".into()],
            "q0",
            alloc::vec![ev("o", true)],
            &[],
        )
        .unwrap();
        let s = SecretSpec::empty();
        let (verdict, sog) = check_simple(&l, &s);
        let out = opacify(
            None,
            &l,
            &s,
            &sog,
            &verdict.counterexamples,
            &ExplorationLimits::default(),
        )
        .unwrap();
        assert!(out.patch.is_identity());
        assert_eq!(out.lts, l);
    }

    #[test]
    fn minsl_empty_for_opaque_and_witnesses_for_disclosing() {
        let (l, s) = two_state_disclosing();
        let (verdict, sog) = check_simple(&l, &s);
        let minsl = compute_min_superlanguage(&sog);
        assert_eq!(minsl.traces.len(), 1);
        assert_eq!(minsl.traces[0], verdict.counterexamples[0].trace);

        let (_, sog) = check_simple(&l, &SecretSpec::empty());
        assert!(compute_min_superlanguage(&sog).is_empty());
    }

    #[test]
    fn trace_mismatch_is_rejected() {
        let (l, s) = two_state_disclosing();
        let (verdict, sog) = check_simple(&l, &s);
        let mut doctored = verdict.counterexamples.clone();
        doctored[0].trace = Word::empty();
        let err = opacify(
            None,
            &l,
            &s,
            &sog,
            &doctored,
            &ExplorationLimits::default(),
        )
        .unwrap_err();
        assert!(matches!(err, EnforceError::TraceMismatch(_)));
    }

    #[test]
    fn plain_net_patch_and_reversion() {
        // p -o-> q, post-o marking is secret
        let net = PetriNet::builder()
            .places(&["p", "q"])
            .transition("o", "o", true)
            .arc("p", "o")
            .arc("o", "q")
            .initial("p", 1)
            .build()
            .unwrap();
        let secret_pattern = net.marking_pattern(&[("q".into(), 1)], true).unwrap();
        let graph =
            build_reachability_graph(&net, &[secret_pattern], &ExplorationLimits::default())
                .unwrap();
        let model = NetModel::Plain(net);
        let spec = graph.secret_spec();
        let (verdict, sog) = check_simple(&graph.lts, &spec);
        assert!(!verdict.opaque);
        let out = opacify(
            Some((&model, &graph)),
            &graph.lts,
            &spec,
            &sog,
            &verdict.counterexamples,
            &ExplorationLimits::default(),
        )
        .unwrap();
        assert!(out.verdict_after.opaque);
        assert_eq!(out.patch.new_transitions.len(), 1);
        assert_eq!(out.patch.new_places.len(), 1);
        assert!(out.patch.removed_arcs.is_empty());
        // the dummy transition consumes the secret marking's host place
        let patched = out.net.as_ref().unwrap();
        assert_eq!(
            patched.net().transition_count(),
            model.net().transition_count() + 1
        );
        // reversion gives back the original net
        let reverted = revert_patch(patched, &out.patch).unwrap();
        assert_eq!(&reverted, &model);
        // a second round is the identity
        let g2 = out.graph.as_ref().unwrap();
        let (v2, sog2) = check_simple(&g2.lts, &out.secret);
        assert!(v2.opaque);
        let again = opacify(
            Some((patched, g2)),
            &g2.lts,
            &out.secret,
            &sog2,
            &v2.counterexamples,
            &ExplorationLimits::default(),
        )
        .unwrap();
        assert!(again.patch.is_identity());
        assert_eq!(again.net.as_ref().unwrap(), patched);
    }

    #[test]
    fn frugality_one_transition_per_disclosing_aggregate() {
        // two disclosing branches -> exactly two dummy transitions
        let l = Lts::new(
            alloc::vec!["q0".into(), "q1".into(), "q2".into()],
            "q0",
            alloc::vec![ev("a", true), ev("b", true)],
            &[
                ("q0".into(), "a".into(), "q1".into()),
                ("q0".into(), "b".into(), "q2".into()),
            ],
        )
        .unwrap();
        let s = SecretSpec::new(StateSet::from_iter([StateId(1), StateId(2)]));
        let (verdict, sog) = check_simple(&l, &s);
        let disclosing = sog.disclosing_aggregates().count();
        let out = opacify(
            None,
            &l,
            &s,
            &sog,
            &verdict.counterexamples,
            &ExplorationLimits::default(),
        )
        .unwrap();
        assert_eq!(out.patch.new_transitions.len(), disclosing);
    }
}
