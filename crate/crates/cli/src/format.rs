//! On-disk model formats (JSON, UTF-8) and their mapping onto the core
//! types. Two shapes are accepted everywhere a model is expected:
//!
//! * a **net file** (`places` / `transitions` / `arcs` / `initial_marking`,
//!   optional `final_marking`, `interface`, `secrets`), or
//! * an **LTS file** (`states` / `initial` / `events` / `edges` /
//!   `secret_states`).
//!
//! Unknown fields are rejected with an error naming the field. Secret
//! markings are either exact or lower-bound patterns (`"exact": false`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use opacify_core::lts::EventInfo;
use opacify_core::net::{MarkingPattern, NetModel, OwfNet, PetriNet};
use opacify_core::stateset::StateSet;
use opacify_core::{Lts, SecretSpec};

use crate::CliError;

fn default_weight() -> u32 {
    1
}

fn default_exact() -> bool {
    true
}

fn is_default_weight(w: &u32) -> bool {
    *w == 1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TransitionDto {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub observable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ArcDto {
    pub from: String,
    pub to: String,
    #[serde(default = "default_weight", skip_serializing_if = "is_default_weight")]
    pub weight: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDto {
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SecretDto {
    pub marking: BTreeMap<String, u32>,
    #[serde(default = "default_exact")]
    pub exact: bool,
}

/// Net model file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub places: Vec<String>,
    pub transitions: Vec<TransitionDto>,
    pub arcs: Vec<ArcDto>,
    pub initial_marking: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_marking: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interface: Option<InterfaceDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub secrets: Vec<SecretDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EventDto {
    pub id: String,
    pub observable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub from: String,
    pub event: String,
    pub to: String,
}

/// Labeled-transition-system file, accepted by every checker command as an
/// alternative to a net model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LtsFile {
    pub states: Vec<String>,
    pub initial: String,
    pub events: Vec<EventDto>,
    pub edges: Vec<EdgeDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub secret_states: Vec<String>,
}

/// A parsed net model together with its secret patterns (resolved and raw).
#[derive(Debug, Clone)]
pub struct LoadedNet {
    pub model: NetModel,
    pub secrets: Vec<MarkingPattern>,
    pub raw_secrets: Vec<SecretDto>,
}

/// A parsed LTS model with its secret states.
#[derive(Debug, Clone)]
pub struct LoadedLts {
    pub lts: Lts,
    pub secret: SecretSpec,
}

#[derive(Debug, Clone)]
pub enum LoadedModel {
    Net(LoadedNet),
    Lts(LoadedLts),
}

/// Parse a model file, deciding net vs LTS by its top-level keys.
pub fn parse_model(source: &str, origin: &str) -> Result<LoadedModel, CliError> {
    let value: serde_json::Value = serde_json::from_str(source)
        .map_err(|e| CliError::Parse(origin.to_string(), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Parse(origin.to_string(), "expected a JSON object".into()))?;
    if obj.contains_key("places") {
        let file: NetFile = serde_json::from_value(value)
            .map_err(|e| CliError::Parse(origin.to_string(), e.to_string()))?;
        Ok(LoadedModel::Net(net_from_file(&file, origin)?))
    } else if obj.contains_key("states") {
        let file: LtsFile = serde_json::from_value(value)
            .map_err(|e| CliError::Parse(origin.to_string(), e.to_string()))?;
        Ok(LoadedModel::Lts(lts_from_file(&file, origin)?))
    } else {
        Err(CliError::Parse(
            origin.to_string(),
            "expected `places` (net model) or `states` (transition system)".into(),
        ))
    }
}

pub fn net_from_file(file: &NetFile, origin: &str) -> Result<LoadedNet, CliError> {
    let mut builder = PetriNet::builder();
    for p in &file.places {
        builder = builder.place(p);
    }
    for t in &file.transitions {
        builder = builder.transition(&t.id, t.label.as_deref().unwrap_or(&t.id), t.observable);
    }
    for a in &file.arcs {
        builder = builder.weighted_arc(&a.from, &a.to, a.weight);
    }
    for (p, c) in &file.initial_marking {
        builder = builder.initial(p, *c);
    }
    let net = builder
        .build()
        .map_err(|e| CliError::Model(origin.to_string(), e.to_string()))?;

    let final_marking = match &file.final_marking {
        Some(pairs) => Some(
            net.marking_from_pairs(
                &pairs
                    .iter()
                    .map(|(k, v)| (k.clone(), *v))
                    .collect::<Vec<_>>(),
            )
            .map_err(|e| CliError::Model(format!("{origin} (final_marking)"), e.to_string()))?,
        ),
        None => None,
    };

    let mut secrets = Vec::new();
    for (i, s) in file.secrets.iter().enumerate() {
        let pairs: Vec<(String, u32)> = s.marking.iter().map(|(k, v)| (k.clone(), *v)).collect();
        secrets.push(
            net.marking_pattern(&pairs, s.exact)
                .map_err(|e| CliError::Model(format!("{origin} (secrets[{i}])"), e.to_string()))?,
        );
    }

    let model = match &file.interface {
        Some(iface) => NetModel::Owf(
            OwfNet::new(net, &iface.inputs, &iface.outputs, final_marking)
                .map_err(|e| CliError::Model(format!("{origin} (interface)"), e.to_string()))?,
        ),
        None => NetModel::Plain(net),
    };
    Ok(LoadedNet {
        model,
        secrets,
        raw_secrets: file.secrets.clone(),
    })
}

pub fn lts_from_file(file: &LtsFile, origin: &str) -> Result<LoadedLts, CliError> {
    let events: Vec<EventInfo> = file
        .events
        .iter()
        .map(|e| EventInfo {
            id: e.id.clone(),
            label: e.id.clone(),
            observable: e.observable,
        })
        .collect();
    let edges: Vec<(String, String, String)> = file
        .edges
        .iter()
        .map(|e| (e.from.clone(), e.event.clone(), e.to.clone()))
        .collect();
    let lts = Lts::new(file.states.clone(), &file.initial, events, &edges)
        .map_err(|e| CliError::Model(origin.to_string(), e.to_string()))?;
    let mut secret_states = Vec::new();
    for name in &file.secret_states {
        secret_states.push(lts.find_state(name).ok_or_else(|| {
            CliError::Model(
                format!("{origin} (secret_states)"),
                format!("unknown state `{name}`"),
            )
        })?);
    }
    Ok(LoadedLts {
        lts,
        secret: SecretSpec::new(StateSet::from_iter(secret_states)),
    })
}

/// Render a net model back into its file form.
pub fn net_to_file(model: &NetModel, raw_secrets: &[SecretDto]) -> NetFile {
    let net = model.net();
    let places: Vec<String> = net.place_names().map(|s| s.to_string()).collect();
    let transitions: Vec<TransitionDto> = net
        .transitions()
        .map(|(_, t)| TransitionDto {
            id: t.id.clone(),
            label: if t.label == t.id {
                None
            } else {
                Some(t.label.clone())
            },
            observable: t.observable,
        })
        .collect();
    let arcs: Vec<ArcDto> = net
        .arcs()
        .into_iter()
        .map(|(from, to, weight)| ArcDto { from, to, weight })
        .collect();
    let initial_marking: BTreeMap<String, u32> = net
        .initial_marking()
        .iter_marked()
        .map(|(p, c)| (net.place_name(p).to_string(), c))
        .collect();
    let (final_marking, interface) = match model {
        NetModel::Plain(_) => (None, None),
        NetModel::Owf(owf) => (
            owf.final_marking.as_ref().map(|m| {
                m.iter_marked()
                    .map(|(p, c)| (net.place_name(p).to_string(), c))
                    .collect()
            }),
            Some(InterfaceDto {
                inputs: owf
                    .inputs
                    .iter()
                    .map(|&p| net.place_name(p).to_string())
                    .collect(),
                outputs: owf
                    .outputs
                    .iter()
                    .map(|&p| net.place_name(p).to_string())
                    .collect(),
            }),
        ),
    };
    NetFile {
        places,
        transitions,
        arcs,
        initial_marking,
        final_marking,
        interface,
        secrets: raw_secrets.to_vec(),
    }
}

/// Render an LTS back into its file form.
pub fn lts_to_file(lts: &Lts, secret: &SecretSpec) -> LtsFile {
    LtsFile {
        states: lts.state_names().map(|s| s.to_string()).collect(),
        initial: lts.state_name(lts.initial()).to_string(),
        events: lts
            .events()
            .map(|(_, e)| EventDto {
                id: e.id.clone(),
                observable: e.observable,
            })
            .collect(),
        edges: lts
            .edges()
            .map(|(q, e, t)| EdgeDto {
                from: lts.state_name(q).to_string(),
                event: lts.event(e).id.clone(),
                to: lts.state_name(t).to_string(),
            })
            .collect(),
        secret_states: secret
            .states
            .iter()
            .map(|q| lts.state_name(q).to_string())
            .collect(),
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable");
    out.push('\n');
    out
}
