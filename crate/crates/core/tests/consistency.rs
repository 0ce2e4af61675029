//! Cross-module consistency on randomized systems: the observation graph,
//! the direct estimate computation, run enumeration, and the projection laws
//! must all tell the same story.

use opacify_core::checker::{check_simple, Variant};
use opacify_core::lts::{EventInfo, Lts, SecretSpec, Word};
use opacify_core::sog::{build_sog, export_dot, DotOptions};
use opacify_core::stateset::StateSet;
use opacify_core::StateId;

/// Small deterministic RNG so failures reproduce exactly.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_lts(rng: &mut SplitMix64) -> (Lts, SecretSpec) {
    let n_states = 2 + rng.below(7) as usize; // 2..=8
    let n_obs = 1 + rng.below(3) as usize; // 1..=3
    let n_unobs = 1 + rng.below(2) as usize; // 1..=2
    let states: Vec<String> = (0..n_states).map(|i| format!("q{i}")).collect();
    let mut events: Vec<EventInfo> = (0..n_obs)
        .map(|i| EventInfo {
            id: format!("o{i}"),
            label: format!("o{i}"),
            observable: true,
        })
        .collect();
    events.extend((0..n_unobs).map(|i| EventInfo {
        id: format!("u{i}"),
        label: format!("u{i}"),
        observable: false,
    }));
    let n_events = events.len();
    let n_edges = 1 + rng.below(2 * n_states as u64) as usize;
    let edges: Vec<(String, String, String)> = (0..n_edges)
        .map(|_| {
            (
                format!("q{}", rng.below(n_states as u64)),
                events[rng.below(n_events as u64) as usize].id.clone(),
                format!("q{}", rng.below(n_states as u64)),
            )
        })
        .collect();
    let lts = Lts::new(states, "q0", events, &edges).unwrap();
    let secret = SecretSpec::new(StateSet::from_iter(
        (0..n_states as u32)
            .filter(|_| rng.below(4) == 0)
            .map(StateId),
    ));
    (lts, secret)
}

/// All observable words of length ≤ `max_len` that label a path in the SOG,
/// paired with the aggregate they reach.
fn sog_words(
    lts: &Lts,
    sog: &opacify_core::Sog,
    max_len: usize,
) -> Vec<(Word, opacify_core::AggregateId)> {
    let mut out = vec![(Word::empty(), sog.initial())];
    let mut frontier = vec![(Word::empty(), sog.initial())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, a) in &frontier {
            for e in lts.observable_events() {
                if let Some(b) = sog.successor(*a, e) {
                    let w2 = w.appended(e);
                    next.push((w2.clone(), b));
                    out.push((w2, b));
                }
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn sog_agrees_with_runs_and_estimates() {
    for seed in 0..80u64 {
        let mut rng = SplitMix64(seed);
        let (lts, secret) = random_lts(&mut rng);
        let sog = build_sog(&lts, &secret);

        // every enumerated run's projection labels a SOG path and ends
        // inside the aggregate that path reaches
        for (run, end) in lts.enumerate_runs(6) {
            let obs = lts.project(&run);
            let reached = sog
                .walk(&obs)
                .unwrap_or_else(|| panic!("seed {seed}: projection must label a path"));
            assert!(
                sog.aggregate(reached).states.contains(end),
                "seed {seed}: run end outside its aggregate"
            );
        }

        // every SOG-reachable word's aggregate equals the direct estimate
        for (w, a) in sog_words(&lts, &sog, 6) {
            let estimate = lts.observationally_equivalent_runs(&w).unwrap();
            assert_eq!(
                sog.aggregate(a).states,
                estimate,
                "seed {seed}: estimate mismatch at {:?}",
                lts.render_word(&w)
            );
        }

        // rebuild stability, including the rendering
        let again = build_sog(&lts, &secret);
        assert_eq!(sog, again);
        assert_eq!(
            export_dot(&sog, &lts, &DotOptions::default()),
            export_dot(&again, &lts, &DotOptions::default())
        );

        // sanity bound: never more aggregates than 2^|Q|
        assert!(sog.aggregate_count() <= 1usize << lts.state_count().min(20));
    }
}

#[test]
fn run_enumeration_is_prefix_closed_and_ordered() {
    for seed in 0..40u64 {
        let mut rng = SplitMix64(seed ^ 0xabcd);
        let (lts, _) = random_lts(&mut rng);
        let runs: Vec<(Word, StateId)> = lts.enumerate_runs(5).collect();
        assert_eq!(runs[0].0, Word::empty());
        // non-decreasing length
        for pair in runs.windows(2) {
            assert!(pair[0].0.len() <= pair[1].0.len());
        }
        // prefix-closed word set
        let words: std::collections::BTreeSet<Word> =
            runs.iter().map(|(w, _)| w.clone()).collect();
        for w in &words {
            if !w.is_empty() {
                let prefix = Word(w.0[..w.len() - 1].to_vec());
                assert!(words.contains(&prefix), "seed {seed}: missing prefix");
            }
        }
    }
}

#[test]
fn projection_laws_on_run_words() {
    for seed in 0..40u64 {
        let mut rng = SplitMix64(seed ^ 0x7777);
        let (lts, _) = random_lts(&mut rng);
        let obs = lts.observable_set();
        let mut previous: Option<Word> = None;
        for (run, _) in lts.enumerate_runs(5) {
            let p = opacify_core::lts::project(&run, &obs);
            // idempotent, length-bounded
            assert_eq!(opacify_core::lts::project(&p, &obs), p);
            assert!(p.len() <= run.len());
            let all_observable = run.iter().all(|&e| lts.is_observable(e));
            assert_eq!(p.len() == run.len(), all_observable);
            // prefix-monotone along the enumeration: compare against the
            // run's own prefixes
            for cut in 0..run.len() {
                let prefix = Word(run.0[..cut].to_vec());
                assert!(opacify_core::lts::project(&prefix, &obs).is_prefix_of(&p));
            }
            previous = Some(run);
        }
        let _ = previous;
    }
}

#[test]
fn simple_counterexamples_cover_every_disclosing_aggregate() {
    for seed in 0..60u64 {
        let mut rng = SplitMix64(seed ^ 0x3333);
        let (lts, secret) = random_lts(&mut rng);
        let (verdict, sog) = check_simple(&lts, &secret);
        let disclosing = sog.disclosing_aggregates().count();
        assert_eq!(verdict.counterexamples.len(), disclosing);
        assert_eq!(verdict.opaque, disclosing == 0);
        assert_eq!(verdict.variant, Variant::Simple);
        for cx in &verdict.counterexamples {
            // the recorded trace really reaches the recorded aggregate
            assert_eq!(sog.walk(&cx.trace), Some(cx.target));
            assert!(sog.aggregate(cx.target).all_secret);
        }
    }
}
