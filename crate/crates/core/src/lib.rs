//! Opacity verification and enforcement for systems modeled as Petri nets,
//! open workflow nets, or labeled transition systems.
//!
//! A passive observer sees only the observable projection of a run. A set of
//! secret states is *opaque* when the observer can never be certain the system
//! is (or recently was) in a secret state: every disclosing run has an
//! observationally equivalent run that stays clear of the secret.
//!
//! The toolkit decides three variants on finite systems:
//!
//! * **simple opacity** — the current state cannot be pinned to the secret;
//! * **K-step weak opacity** — no past observation instant within the last K
//!   observable events can be pinned to the secret;
//! * **K-step strong opacity** — the observer can never rule out a run that
//!   avoided the secret entirely over the last K observable events.
//!
//! Verification works on a deterministic *symbolic observation graph* (SOG):
//! the quotient of the reachable state space under unobservable saturation,
//! with one node (aggregate) per consistent state estimate. Construction is
//! on-the-fly and collects every disclosing trace instead of stopping at the
//! first. When simple opacity fails, [`enforcer::opacify`] pads the model with
//! fresh unobservable behavior so that each disclosing observation gains a
//! non-secret explanation, leaving the observable language unchanged.
//!
//! The crate is `no_std` (with `alloc`); parsing, file formats and the command
//! line live in the companion `opacify-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod checker;
pub mod enforcer;
pub mod lts;
pub mod net;
pub mod sog;
pub mod stateset;

pub use checker::{CounterExample, Variant, Verdict};
pub use enforcer::{EnforcementPatch, Opacified, SuperLanguageAdditions};
pub use lts::{EventId, Lts, SecretSpec, StateId, Word};
pub use net::{Marking, OwfNet, PetriNet, PlaceId, ReachabilityGraph, TransitionId};
pub use sog::{Aggregate, AggregateId, Sog};
pub use stateset::StateSet;
