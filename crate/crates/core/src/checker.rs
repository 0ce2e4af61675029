//! Decision procedures for simple, K-step weak, and K-step strong opacity,
//! with exhaustive counterexample collection, plus an independent brute-force
//! oracle used by the test harness.
//!
//! *Simple opacity* asks whether any reachable observation pins the current
//! state inside the secret set; it is decided directly on the observation
//! graph (a disclosure is an aggregate whose states are all secret), and the
//! construction does not stop at the first hit — every disclosing aggregate
//! is reported with its discovery trace.
//!
//! The K-step variants ask about the recent past. Between two observable
//! events the system drifts through unobservable states, so "the state k
//! observations ago" is read as: any state the system may have occupied
//! during that inter-observation stage, on some run consistent with the whole
//! observation. The decision procedure tracks *trajectory windows*: per run
//! family, the last K+1 (state, crossed-a-secret) pairs together with the
//! current end state. Weak opacity fails when some lag's state estimate sinks
//! entirely into the secret; strong opacity fails when no consistent history
//! is secret-free across its whole window. At K = 0 the weak check collapses
//! to simple opacity.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lts::{EventId, Lts, SecretSpec, StateId, Word};
use crate::sog::{build_sog, AggregateId, Sog};
use crate::stateset::dense::DenseStateSet;

/// Which opacity notion a verdict speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    Simple,
    KWeak,
    KStrong,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Simple => "simple",
            Variant::KWeak => "k_weak",
            Variant::KStrong => "k_strong",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One disclosure: an observable trace after which the observer is certain.
///
/// For simple opacity the trace is the DFS discovery path of the disclosing
/// aggregate and `lag` is 0; for K-step verdicts the trace is the shortest
/// disclosing observation and `lag` is the offending lag (weak) or the
/// window extent (strong). The ε-form with `event == None` and
/// `source == target` occurs only for disclosure at the initial estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterExample {
    pub trace: Word,
    pub source: AggregateId,
    pub event: Option<EventId>,
    pub target: AggregateId,
    pub lag: u32,
}

/// Sizes of the structures a verdict was computed from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub aggregates: usize,
    pub estimator_states: usize,
}

/// Outcome of one opacity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub variant: Variant,
    pub k: u32,
    pub opaque: bool,
    pub counterexamples: Vec<CounterExample>,
    pub stats: Stats,
}

/// Decide simple opacity of `secret` in `lts`.
///
/// The verdict is opaque exactly when no reachable aggregate consists of
/// secret states only; otherwise one counterexample per disclosing
/// aggregate, in discovery order. The returned graph is fully built either
/// way.
pub fn check_simple(lts: &Lts, secret: &SecretSpec) -> (Verdict, Sog) {
    let sog = build_sog(lts, secret);
    let counterexamples: Vec<CounterExample> = sog
        .disclosing_aggregates()
        .map(|agg| {
            let d = sog.discovery(agg.id);
            CounterExample {
                trace: d.trace.clone(),
                source: d.source,
                event: d.event,
                target: agg.id,
                lag: 0,
            }
        })
        .collect();
    let verdict = Verdict {
        variant: Variant::Simple,
        k: 0,
        opaque: counterexamples.is_empty(),
        counterexamples,
        stats: Stats {
            states: lts.state_count(),
            aggregates: sog.aggregate_count(),
            estimator_states: 0,
        },
    };
    (verdict, sog)
}

/// Decide K-step weak opacity: after every reachable observation and for
/// every lag `k ≤ K` within the window, the set of states the system may
/// have occupied k observable events ago must not sink into the secret.
pub fn check_k_step_weak(lts: &Lts, secret: &SecretSpec, k: u32) -> Verdict {
    explore_estimator(lts, secret, k, Variant::KWeak)
}

/// Decide K-step strong opacity: after every reachable observation some
/// consistent run must have stayed clear of the secret over the whole
/// window (neither ending in nor crossing a secret state).
pub fn check_k_step_strong(lts: &Lts, secret: &SecretSpec, k: u32) -> Verdict {
    explore_estimator(lts, secret, k, Variant::KStrong)
}

// ---------------------------------------------------------------------------
// K-delay trajectory estimator
// ---------------------------------------------------------------------------

/// One consistent history compressed to its observation window: for each of
/// the last ≤ K+1 stages, a state the run may have occupied during that
/// stage and whether the run crossed any secret state within the stage,
/// plus the run's current end state (where the next observable fires from).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Trajectory {
    window: Vec<(StateId, bool)>,
    end: StateId,
}

type EstimatorState = BTreeSet<Trajectory>;

/// Reachability closures over the unobservable part of the system.
struct Closures {
    /// `u[q]`: states reachable from `q` by unobservable events (reflexive).
    u: Vec<DenseStateSet>,
    /// `n[q]`: reachable from `q` through non-secret states only; empty when
    /// `q` itself is secret.
    n: Vec<DenseStateSet>,
    /// `su[q]`: states reachable from `q` by an unobservable path that
    /// visits at least one secret state.
    su: Vec<DenseStateSet>,
}

fn closures(lts: &Lts, secret: &SecretSpec) -> Closures {
    let nq = lts.state_count();
    let mut u = Vec::with_capacity(nq);
    let mut n = Vec::with_capacity(nq);
    for q in 0..nq as u32 {
        let q = StateId(q);
        let mut set = DenseStateSet::empty(nq);
        set.insert(q);
        let mut work = alloc::vec![q];
        while let Some(x) = work.pop() {
            for &(e, t) in lts.successors(x) {
                if !lts.is_observable(e) && !set.contains(t) {
                    set.insert(t);
                    work.push(t);
                }
            }
        }
        u.push(set);

        let mut set = DenseStateSet::empty(nq);
        if !secret.contains(q) {
            set.insert(q);
            let mut work = alloc::vec![q];
            while let Some(x) = work.pop() {
                for &(e, t) in lts.successors(x) {
                    if !lts.is_observable(e) && !secret.contains(t) && !set.contains(t) {
                        set.insert(t);
                        work.push(t);
                    }
                }
            }
        }
        n.push(set);
    }
    let mut su = Vec::with_capacity(nq);
    for q in 0..nq {
        let mut set = DenseStateSet::empty(nq);
        for s in secret.states.iter() {
            if u[q].contains(s) {
                set.union_with(&u[s.index()]);
            }
        }
        su.push(set);
    }
    Closures { u, n, su }
}

impl Closures {
    /// Enumerate the consistent `(stage state, crossed flag, end state)`
    /// triples of a stage entered at anchor `r`.
    fn stage_entries(&self, r: StateId, mut push: impl FnMut(StateId, bool, StateId)) {
        for x in self.u[r.index()].iter() {
            for e in self.u[x.index()].iter() {
                // a secret-free path r -> x -> e exists
                if self.n[r.index()].contains(x) && self.n[x.index()].contains(e) {
                    push(x, false, e);
                }
                // a path r -> x -> e visiting some secret exists
                if self.su[r.index()].contains(x) || self.su[x.index()].contains(e) {
                    push(x, true, e);
                }
            }
        }
    }
}

fn initial_estimator(lts: &Lts, cl: &Closures) -> EstimatorState {
    let mut state = BTreeSet::new();
    cl.stage_entries(lts.initial(), |x, f, e| {
        state.insert(Trajectory {
            window: alloc::vec![(x, f)],
            end: e,
        });
    });
    state
}

fn estimator_step(
    lts: &Lts,
    cl: &Closures,
    k: u32,
    state: &EstimatorState,
    sigma: EventId,
) -> EstimatorState {
    let mut next = BTreeSet::new();
    for traj in state {
        for r in lts.successors_via(traj.end, sigma) {
            cl.stage_entries(r, |x, f, e| {
                let mut window = traj.window.clone();
                window.push((x, f));
                if window.len() > k as usize + 1 {
                    window.remove(0);
                }
                next.insert(Trajectory { window, end: e });
            });
        }
    }
    next
}

fn estimator_enabled(lts: &Lts, state: &EstimatorState) -> Vec<EventId> {
    let mut out: Vec<EventId> = Vec::new();
    for e in lts.observable_events() {
        if state
            .iter()
            .any(|t| lts.successors_via(t.end, e).next().is_some())
        {
            out.push(e);
        }
    }
    out
}

/// Weak disclosure: smallest lag whose state estimate sinks into the secret.
fn weak_disclosing_lag(state: &EstimatorState, secret: &SecretSpec) -> Option<u32> {
    let len = state.iter().next().map(|t| t.window.len())?;
    debug_assert!(state.iter().all(|t| t.window.len() == len));
    (0..len as u32).find(|&lag| {
        state
            .iter()
            .all(|t| secret.contains(t.window[len - 1 - lag as usize].0))
    })
}

/// Strong disclosure: no trajectory is secret-free across its window.
fn strong_disclosing(state: &EstimatorState, secret: &SecretSpec) -> bool {
    !state.iter().any(|t| {
        t.window
            .iter()
            .all(|&(x, crossed)| !crossed && !secret.contains(x))
    })
}

fn explore_estimator(lts: &Lts, secret: &SecretSpec, k: u32, variant: Variant) -> Verdict {
    let cl = closures(lts, secret);
    let sog = build_sog(lts, secret);
    let mut ids: BTreeMap<EstimatorState, u32> = BTreeMap::new();
    let mut queue: VecDeque<(EstimatorState, Word)> = VecDeque::new();
    let mut counterexamples = Vec::new();

    let disclosure = |state: &EstimatorState| -> Option<u32> {
        match variant {
            Variant::KWeak => weak_disclosing_lag(state, secret),
            Variant::KStrong => {
                if strong_disclosing(state, secret) {
                    let len = state.iter().next().map(|t| t.window.len()).unwrap_or(1);
                    Some(len as u32 - 1)
                } else {
                    None
                }
            }
            Variant::Simple => unreachable!("simple opacity is decided on the SOG"),
        }
    };
    let to_counterexample = |word: &Word, lag: u32| -> CounterExample {
        let target = sog.walk(word).unwrap_or_else(|| sog.initial());
        let (source, event) = match word.0.split_last() {
            Some((&last, prefix)) => (
                sog.walk(&Word(prefix.to_vec()))
                    .unwrap_or_else(|| sog.initial()),
                Some(last),
            ),
            None => (target, None),
        };
        CounterExample {
            trace: word.clone(),
            source,
            event,
            target,
            lag,
        }
    };

    let init = initial_estimator(lts, &cl);
    if let Some(lag) = disclosure(&init) {
        counterexamples.push(to_counterexample(&Word::empty(), lag));
    }
    ids.insert(init.clone(), 0);
    queue.push_back((init, Word::empty()));

    while let Some((state, word)) = queue.pop_front() {
        for e in estimator_enabled(lts, &state) {
            let next = estimator_step(lts, &cl, k, &state, e);
            debug_assert!(!next.is_empty());
            if !ids.contains_key(&next) {
                let id = ids.len() as u32;
                ids.insert(next.clone(), id);
                let w = word.appended(e);
                if let Some(lag) = disclosure(&next) {
                    counterexamples.push(to_counterexample(&w, lag));
                }
                queue.push_back((next, w));
            }
        }
    }

    Verdict {
        variant,
        k,
        opaque: counterexamples.is_empty(),
        counterexamples,
        stats: Stats {
            states: lts.state_count(),
            aggregates: sog.aggregate_count(),
            estimator_states: ids.len(),
        },
    }
}

// ---------------------------------------------------------------------------
// Bounded disclosing-observation sets (harness surface)
// ---------------------------------------------------------------------------

/// Every disclosing observable word of length ≤ `max_len`, per the decision
/// procedures themselves: for [`Variant::Simple`] these are the words
/// reaching an all-secret aggregate; for the K-step variants, the words
/// after which the estimator discloses.
pub fn disclosing_observations(
    lts: &Lts,
    secret: &SecretSpec,
    variant: Variant,
    k: u32,
    max_len: usize,
) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    match variant {
        Variant::Simple => {
            let sog = build_sog(lts, secret);
            let mut stack = alloc::vec![(sog.initial(), Word::empty())];
            while let Some((a, word)) = stack.pop() {
                if sog.aggregate(a).all_secret {
                    out.insert(word.clone());
                }
                if word.len() < max_len {
                    for e in lts.observable_events() {
                        if let Some(b) = sog.successor(a, e) {
                            stack.push((b, word.appended(e)));
                        }
                    }
                }
            }
        }
        Variant::KWeak | Variant::KStrong => {
            let cl = closures(lts, secret);
            let discloses = |state: &EstimatorState| -> bool {
                match variant {
                    Variant::KWeak => weak_disclosing_lag(state, secret).is_some(),
                    _ => strong_disclosing(state, secret),
                }
            };
            // memoized unrolling of the (deterministic) estimator automaton
            let mut ids: BTreeMap<EstimatorState, u32> = BTreeMap::new();
            let mut flags: Vec<bool> = Vec::new();
            let mut succs: Vec<BTreeMap<EventId, Option<u32>>> = Vec::new();
            let mut states: Vec<EstimatorState> = Vec::new();

            fn intern(
                s: EstimatorState,
                ids: &mut BTreeMap<EstimatorState, u32>,
                flags: &mut Vec<bool>,
                succs: &mut Vec<BTreeMap<EventId, Option<u32>>>,
                states: &mut Vec<EstimatorState>,
                discloses: &dyn Fn(&EstimatorState) -> bool,
            ) -> u32 {
                if let Some(&id) = ids.get(&s) {
                    return id;
                }
                let id = states.len() as u32;
                ids.insert(s.clone(), id);
                flags.push(discloses(&s));
                succs.push(BTreeMap::new());
                states.push(s);
                id
            }

            let root = intern(
                initial_estimator(lts, &cl),
                &mut ids,
                &mut flags,
                &mut succs,
                &mut states,
                &discloses,
            );
            let mut stack = alloc::vec![(root, Word::empty())];
            while let Some((id, word)) = stack.pop() {
                if flags[id as usize] {
                    out.insert(word.clone());
                }
                if word.len() < max_len {
                    for e in estimator_enabled(lts, &states[id as usize]) {
                        let cached = succs[id as usize].get(&e).copied();
                        let next_id = match cached {
                            Some(n) => n,
                            None => {
                                let next =
                                    estimator_step(lts, &cl, k, &states[id as usize], e);
                                let n = if next.is_empty() {
                                    None
                                } else {
                                    Some(intern(
                                        next,
                                        &mut ids,
                                        &mut flags,
                                        &mut succs,
                                        &mut states,
                                        &discloses,
                                    ))
                                };
                                succs[id as usize].insert(e, n);
                                n
                            }
                        };
                        if let Some(n) = next_id {
                            stack.push((n, word.appended(e)));
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// One disclosing observation found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Disclosure {
    pub word: Word,
    pub variant: Variant,
    pub lag: u32,
}

/// Exhaustive oracle: enumerate every reachable observation of length ≤
/// `depth` and apply the opacity definitions to its full run class directly,
/// with per-stage dynamic programming over anchor sets. Nothing here touches
/// the observation-graph or estimator code paths, so the result is an
/// independent referee for them.
///
/// Simple disclosures are always reported; K-step weak and strong entries
/// are reported when `k ≥ 1` (at `k = 0` they coincide with the simple
/// check). The strong entry's lag is the window extent `min(k, |word|)`.
pub fn oracle_disclosures(
    lts: &Lts,
    secret: &SecretSpec,
    k: u32,
    depth: usize,
) -> Vec<Disclosure> {
    let nq = lts.state_count();
    // closure tables recomputed here on purpose, BTreeSet-based
    let mut u_reach: Vec<BTreeSet<StateId>> = Vec::with_capacity(nq);
    let mut n_reach: Vec<BTreeSet<StateId>> = Vec::with_capacity(nq);
    for q in 0..nq as u32 {
        let q = StateId(q);
        let mut seen = BTreeSet::new();
        seen.insert(q);
        let mut work = alloc::vec![q];
        while let Some(x) = work.pop() {
            for &(e, t) in lts.successors(x) {
                if !lts.is_observable(e) && seen.insert(t) {
                    work.push(t);
                }
            }
        }
        u_reach.push(seen);

        let mut seen = BTreeSet::new();
        if !secret.contains(q) {
            seen.insert(q);
            let mut work = alloc::vec![q];
            while let Some(x) = work.pop() {
                for &(e, t) in lts.successors(x) {
                    if !lts.is_observable(e) && !secret.contains(t) && seen.insert(t) {
                        work.push(t);
                    }
                }
            }
        }
        n_reach.push(seen);
    }

    let obs_step = |set: &BTreeSet<StateId>, sigma: EventId| -> BTreeSet<StateId> {
        let mut anchors = BTreeSet::new();
        for &q in set {
            for &x in &u_reach[q.index()] {
                for t in lts.successors_via(x, sigma) {
                    anchors.insert(t);
                }
            }
        }
        anchors
    };

    let mut out = Vec::new();
    let mut queue: VecDeque<(Word, Vec<BTreeSet<StateId>>)> = VecDeque::new();
    let mut start = BTreeSet::new();
    start.insert(lts.initial());
    queue.push_back((Word::empty(), alloc::vec![start]));

    while let Some((word, anchors)) = queue.pop_front() {
        let n = word.len();
        // suffix-consistent anchors per stage
        let mut suffix_ok: Vec<BTreeSet<StateId>> = alloc::vec![BTreeSet::new(); n + 1];
        suffix_ok[n] = anchors[n].clone();
        for i in (0..n).rev() {
            let sigma = word.0[i];
            suffix_ok[i] = anchors[i]
                .iter()
                .copied()
                .filter(|r| {
                    u_reach[r.index()].iter().any(|x| {
                        lts.successors_via(*x, sigma)
                            .any(|t| suffix_ok[i + 1].contains(&t))
                    })
                })
                .collect();
        }
        // per-lag state estimates
        let max_lag = (k as usize).min(n);
        for lag in 0..=max_lag {
            let i = n - lag;
            let mut estimate: BTreeSet<StateId> = BTreeSet::new();
            for &r in &anchors[i] {
                for &x in &u_reach[r.index()] {
                    let consistent = if i == n {
                        true
                    } else {
                        let sigma = word.0[i];
                        u_reach[x.index()].iter().any(|y| {
                            lts.successors_via(*y, sigma)
                                .any(|t| suffix_ok[i + 1].contains(&t))
                        })
                    };
                    if consistent {
                        estimate.insert(x);
                    }
                }
            }
            let disclosed =
                !estimate.is_empty() && estimate.iter().all(|&q| secret.contains(q));
            if disclosed {
                if lag == 0 {
                    out.push(Disclosure {
                        word: word.clone(),
                        variant: Variant::Simple,
                        lag: 0,
                    });
                }
                if k >= 1 {
                    out.push(Disclosure {
                        word: word.clone(),
                        variant: Variant::KWeak,
                        lag: lag as u32,
                    });
                }
            }
        }
        // strong: some run must be secret-free over the whole window
        if k >= 1 {
            let m = (k as usize).min(n);
            let mut window_ok: BTreeSet<StateId> = (0..nq as u32)
                .map(StateId)
                .filter(|&q| !secret.contains(q))
                .collect();
            for i in ((n - m)..n).rev() {
                let sigma = word.0[i];
                window_ok = (0..nq as u32)
                    .map(StateId)
                    .filter(|&r| !secret.contains(r))
                    .filter(|r| {
                        n_reach[r.index()].iter().any(|x| {
                            lts.successors_via(*x, sigma)
                                .any(|t| window_ok.contains(&t))
                        })
                    })
                    .collect();
            }
            let strong_ok = anchors[n - m].iter().any(|r| window_ok.contains(r));
            if !strong_ok {
                out.push(Disclosure {
                    word: word.clone(),
                    variant: Variant::KStrong,
                    lag: m as u32,
                });
            }
        }
        // extend the observation
        if n < depth {
            for sigma in lts.observable_events() {
                let next = obs_step(&anchors[n], sigma);
                if !next.is_empty() {
                    let mut hist = anchors.clone();
                    hist.push(next);
                    queue.push_back((word.appended(sigma), hist));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.word.len(), &a.word, a.variant, a.lag).cmp(&(b.word.len(), &b.word, b.variant, b.lag))
    });
    out
}

/// Oracle view restricted to one variant, as a word set (harness shorthand).
pub fn oracle_disclosing_words(
    lts: &Lts,
    secret: &SecretSpec,
    variant: Variant,
    k: u32,
    depth: usize,
) -> BTreeSet<Word> {
    oracle_disclosures(lts, secret, k, depth)
        .into_iter()
        .filter(|d| d.variant == variant)
        .map(|d| d.word)
        .collect()
}

/// Render a counterexample trace for error messages and reports.
pub fn render_trace(lts: &Lts, cx: &CounterExample) -> String {
    if cx.trace.is_empty() {
        String::from("ε")
    } else {
        lts.render_word(&cx.trace)
    }
}
