//! The bundled example corpus: five services of an IoT health-monitoring
//! pipeline (wearable bracelet, fog node, private cloud, public cloud,
//! patient app), modeled as open workflow nets with asynchronous message
//! channels. See `corpus/README.md` for the modeling notes and the expected
//! verdicts.

use crate::format::{parse_model, LoadedModel, LoadedNet};
use crate::CliError;

pub const CORPUS: [(&str, &str); 5] = [
    ("br", include_str!("../corpus/br.json")),
    ("fog", include_str!("../corpus/fog.json")),
    ("cpr", include_str!("../corpus/cpr.json")),
    ("cpub", include_str!("../corpus/cpub.json")),
    ("app", include_str!("../corpus/app.json")),
];

pub fn corpus_source(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parse every bundled model; all five are net-level models.
pub fn load_corpus() -> Result<Vec<(&'static str, LoadedNet)>, CliError> {
    CORPUS
        .iter()
        .map(|&(name, source)| match parse_model(source, name)? {
            LoadedModel::Net(net) => Ok((name, net)),
            LoadedModel::Lts(_) => Err(CliError::Model(
                name.to_string(),
                "bundled models are net-level".into(),
            )),
        })
        .collect()
}

pub fn load_corpus_model(name: &str) -> Result<LoadedNet, CliError> {
    let source = corpus_source(name)
        .ok_or_else(|| CliError::Model(name.to_string(), "not a bundled model".into()))?;
    match parse_model(source, name)? {
        LoadedModel::Net(net) => Ok(net),
        LoadedModel::Lts(_) => unreachable!("bundled models are net-level"),
    }
}
