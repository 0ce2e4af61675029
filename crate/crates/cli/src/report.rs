//! Machine-readable verdict, patch, and observation-graph reports, plus the
//! human-readable text rendering. JSON is the stable contract; the text form
//! mirrors its content.

use serde::Serialize;
use std::fmt::Write as _;

use opacify_core::checker::{render_trace, Disclosure, Verdict};
use opacify_core::enforcer::{EnforcementPatch, Opacified};
use opacify_core::sog::Sog;
use opacify_core::Lts;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CounterExampleReport {
    pub trace: Vec<String>,
    pub source: String,
    pub event: Option<String>,
    pub target: String,
    pub lag: u32,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct StatsReport {
    pub states: usize,
    pub aggregates: usize,
    pub estimator_states: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerdictReport {
    pub variant: String,
    pub k: u32,
    pub opaque: bool,
    pub counterexamples: Vec<CounterExampleReport>,
    pub stats: StatsReport,
}

pub fn verdict_report(lts: &Lts, verdict: &Verdict) -> VerdictReport {
    VerdictReport {
        variant: verdict.variant.as_str().to_string(),
        k: verdict.k,
        opaque: verdict.opaque,
        counterexamples: verdict
            .counterexamples
            .iter()
            .map(|cx| CounterExampleReport {
                trace: cx.trace.iter().map(|&e| lts.event(e).id.clone()).collect(),
                source: format!("a{}", cx.source.0),
                event: cx.event.map(|e| lts.event(e).id.clone()),
                target: format!("a{}", cx.target.0),
                lag: cx.lag,
            })
            .collect(),
        stats: StatsReport {
            states: verdict.stats.states,
            aggregates: verdict.stats.aggregates,
            estimator_states: verdict.stats.estimator_states,
        },
    }
}

pub fn verdict_text(lts: &Lts, verdict: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "variant: {} (k = {})",
        verdict.variant.as_str(),
        verdict.k
    );
    let _ = writeln!(out, "opaque: {}", verdict.opaque);
    let _ = writeln!(
        out,
        "states: {}, aggregates: {}, estimator states: {}",
        verdict.stats.states, verdict.stats.aggregates, verdict.stats.estimator_states
    );
    if !verdict.counterexamples.is_empty() {
        let _ = writeln!(out, "disclosing traces:");
        for cx in &verdict.counterexamples {
            let _ = writeln!(
                out,
                "  {} (a{} -> a{}, lag {})",
                render_trace(lts, cx),
                cx.source.0,
                cx.target.0,
                cx.lag
            );
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct NewStateReport {
    pub id: String,
    pub aggregate: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ArcReport {
    pub from: String,
    pub to: String,
    pub weight: u32,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IncidenceUpdateReport {
    pub place: String,
    pub transition: String,
    pub value: i64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerdictAfterReport {
    pub opaque: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PatchReport {
    pub new_states: Vec<NewStateReport>,
    pub new_transitions: Vec<String>,
    pub new_places: Vec<String>,
    pub removed_arcs: Vec<ArcReport>,
    pub added_arcs: Vec<ArcReport>,
    pub incidence_updates: Vec<IncidenceUpdateReport>,
    pub verdict_after: VerdictAfterReport,
}

pub fn patch_report(patch: &EnforcementPatch, opaque_after: bool) -> PatchReport {
    PatchReport {
        new_states: patch
            .new_states
            .iter()
            .map(|(id, agg)| NewStateReport {
                id: id.clone(),
                aggregate: format!("a{}", agg.0),
            })
            .collect(),
        new_transitions: patch.new_transitions.clone(),
        new_places: patch.new_places.clone(),
        removed_arcs: patch
            .removed_arcs
            .iter()
            .map(|a| ArcReport {
                from: a.from.clone(),
                to: a.to.clone(),
                weight: a.weight,
            })
            .collect(),
        added_arcs: patch
            .added_arcs
            .iter()
            .map(|a| ArcReport {
                from: a.from.clone(),
                to: a.to.clone(),
                weight: a.weight,
            })
            .collect(),
        incidence_updates: patch
            .incidence_updates
            .iter()
            .map(|(p, t, v)| IncidenceUpdateReport {
                place: p.clone(),
                transition: t.clone(),
                value: *v,
            })
            .collect(),
        verdict_after: VerdictAfterReport {
            opaque: opaque_after,
        },
    }
}

pub fn patch_text(out_model: &Opacified) -> String {
    let patch = &out_model.patch;
    let mut out = String::new();
    if patch.is_identity() {
        let _ = writeln!(out, "identity patch: model already opaque");
        return out;
    }
    let _ = writeln!(
        out,
        "new states: {}",
        patch
            .new_states
            .iter()
            .map(|(id, agg)| format!("{id} (covers a{})", agg.0))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "new transitions: {}", patch.new_transitions.join(", "));
    if !patch.new_places.is_empty() {
        let _ = writeln!(out, "new places: {}", patch.new_places.join(", "));
    }
    for a in &patch.removed_arcs {
        let _ = writeln!(out, "removed arc: {} -> {} (w{})", a.from, a.to, a.weight);
    }
    for a in &patch.added_arcs {
        let _ = writeln!(out, "added arc: {} -> {} (w{})", a.from, a.to, a.weight);
    }
    let _ = writeln!(
        out,
        "opaque after patch: {}",
        out_model.verdict_after.opaque
    );
    out
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SogAggregateReport {
    pub id: String,
    pub states: Vec<String>,
    pub all_secret: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SogEdgeReport {
    pub from: String,
    pub event: String,
    pub to: String,
}

/// JSON dump of an observation graph.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SogReport {
    pub aggregates: Vec<SogAggregateReport>,
    pub initial: String,
    pub edges: Vec<SogEdgeReport>,
}

pub fn sog_report(lts: &Lts, sog: &Sog) -> SogReport {
    SogReport {
        aggregates: sog
            .aggregates()
            .map(|a| SogAggregateReport {
                id: format!("a{}", a.id.0),
                states: a.states.iter().map(|q| lts.state_name(q).to_string()).collect(),
                all_secret: a.all_secret,
            })
            .collect(),
        initial: format!("a{}", sog.initial().0),
        edges: sog
            .edges()
            .map(|(a, e, b)| SogEdgeReport {
                from: format!("a{}", a.0),
                event: lts.event(e).id.clone(),
                to: format!("a{}", b.0),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DisclosureReport {
    pub trace: Vec<String>,
    pub variant: String,
    pub lag: u32,
}

pub fn oracle_report(lts: &Lts, disclosures: &[Disclosure]) -> Vec<DisclosureReport> {
    disclosures
        .iter()
        .map(|d| DisclosureReport {
            trace: d.word.iter().map(|&e| lts.event(e).id.clone()).collect(),
            variant: d.variant.as_str().to_string(),
            lag: d.lag,
        })
        .collect()
}

pub fn oracle_text(lts: &Lts, disclosures: &[Disclosure]) -> String {
    let mut out = String::new();
    if disclosures.is_empty() {
        let _ = writeln!(out, "no disclosing observations within the explored depth");
        return out;
    }
    for d in disclosures {
        let trace = if d.word.is_empty() {
            "ε".to_string()
        } else {
            lts.render_word(&d.word)
        };
        let _ = writeln!(out, "{} [{}, lag {}]", trace, d.variant.as_str(), d.lag);
    }
    out
}
