//! Command execution: ties model loading, verification, enforcement, and
//! export together into reproducible runs with a fixed exit-code contract:
//! 0 for opaque / success / clean validation, 1 for not-opaque, an
//! already-opaque enforcement input, or workflow violations, and 2 for any
//! parse or model error.

use std::fs;
use std::path::{Path, PathBuf};

use opacify_core::checker::{
    check_k_step_strong, check_k_step_weak, check_simple, oracle_disclosures, Variant, Verdict,
};
use opacify_core::enforcer::opacify;
use opacify_core::net::{build_reachability_graph, validate_wf_structure, ExplorationLimits};
use opacify_core::sog::{build_sog, export_dot, DotOptions};
use opacify_core::{Lts, SecretSpec, Sog};

use crate::format::{
    lts_to_file, net_to_file, parse_model, to_json_pretty, LoadedLts, LoadedModel, LoadedNet,
};
use crate::report;
use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OPACIFY_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Enforce,
    ExportDot,
    Oracle,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// One reproducible invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model_path: PathBuf,
    pub variant: Variant,
    pub k: u32,
    pub oracle_depth: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub limits: ExplorationLimits,
}

impl RunConfig {
    pub fn new(command: Command, model_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            model_path: model_path.into(),
            variant: Variant::Simple,
            k: 1,
            oracle_depth: None,
            output_path: None,
            format: Format::Json,
            limits: ExplorationLimits::default(),
        }
    }
}

/// What a run produced, for callers that embed the CLI (tests, scripts).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub exit_code: i32,
    pub stdout: String,
    /// Files written, as `(path, contents)`.
    pub files: Vec<(PathBuf, String)>,
}

/// Analysis products shared by the commands.
struct Analysis {
    lts: Lts,
    secret: SecretSpec,
    graph: Option<opacify_core::net::ReachabilityGraph>,
}

fn analyze(model: &LoadedModel, limits: &ExplorationLimits) -> Result<Analysis, CliError> {
    match model {
        LoadedModel::Net(LoadedNet {
            model, secrets, ..
        }) => {
            let graph = build_reachability_graph(model.net(), secrets, limits)
                .map_err(|e| CliError::Model("model".into(), e.to_string()))?;
            Ok(Analysis {
                lts: graph.lts.clone(),
                secret: graph.secret_spec(),
                graph: Some(graph),
            })
        }
        LoadedModel::Lts(LoadedLts { lts, secret }) => Ok(Analysis {
            lts: lts.clone(),
            secret: secret.clone(),
            graph: None,
        }),
    }
}

fn check_verdict(analysis: &Analysis, variant: Variant, k: u32) -> (Verdict, Option<Sog>) {
    match variant {
        Variant::Simple => {
            let (v, sog) = check_simple(&analysis.lts, &analysis.secret);
            (v, Some(sog))
        }
        Variant::KWeak => (check_k_step_weak(&analysis.lts, &analysis.secret, k), None),
        Variant::KStrong => (check_k_step_strong(&analysis.lts, &analysis.secret, k), None),
    }
}

fn out_dir(config: &RunConfig) -> PathBuf {
    if let Some(path) = &config.output_path {
        return path.clone();
    }
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn model_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string())
}

/// Execute `config` without touching the filesystem for outputs; the caller
/// decides what to do with `RunOutput::files` (the binary writes them).
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let source = fs::read_to_string(&config.model_path).map_err(|e| {
        CliError::Io(config.model_path.display().to_string(), e.to_string())
    })?;
    let origin = config.model_path.display().to_string();
    let model = parse_model(&source, &origin)?;
    let analysis = analyze(&model, &config.limits)?;
    let stem = model_stem(&config.model_path);
    let dir = out_dir(config);

    match config.command {
        Command::Check => {
            let (verdict, _) = check_verdict(&analysis, config.variant, config.k);
            let rendered = match config.format {
                Format::Json => to_json_pretty(&report::verdict_report(&analysis.lts, &verdict)),
                Format::Text => report::verdict_text(&analysis.lts, &verdict),
            };
            Ok(RunOutput {
                exit_code: if verdict.opaque { 0 } else { 1 },
                stdout: rendered,
                files: Vec::new(),
            })
        }
        Command::Oracle => {
            let depth = config
                .oracle_depth
                .unwrap_or(analysis.lts.state_count() + config.k as usize + 2);
            let disclosures =
                oracle_disclosures(&analysis.lts, &analysis.secret, config.k, depth);
            let rendered = match config.format {
                Format::Json => {
                    to_json_pretty(&report::oracle_report(&analysis.lts, &disclosures))
                }
                Format::Text => report::oracle_text(&analysis.lts, &disclosures),
            };
            Ok(RunOutput {
                exit_code: if disclosures.is_empty() { 0 } else { 1 },
                stdout: rendered,
                files: Vec::new(),
            })
        }
        Command::Validate => {
            let diags = match &model {
                LoadedModel::Net(loaded) => match loaded.model.as_owf() {
                    Some(owf) => validate_wf_structure(owf),
                    None => {
                        // a net without interface places is checked as a
                        // workflow net with an empty interface
                        let owf = opacify_core::net::OwfNet::new(
                            loaded.model.net().clone(),
                            &[],
                            &[],
                            None,
                        )
                        .map_err(|e| CliError::Model(origin.clone(), e.to_string()))?;
                        validate_wf_structure(&owf)
                    }
                },
                LoadedModel::Lts(_) => {
                    vec!["not a net model: workflow validation does not apply".to_string()]
                }
            };
            let mut stdout = String::new();
            if diags.is_empty() {
                stdout.push_str("workflow structure: ok\n");
            } else {
                for d in &diags {
                    stdout.push_str(d);
                    stdout.push('\n');
                }
            }
            Ok(RunOutput {
                exit_code: if diags.is_empty() { 0 } else { 1 },
                stdout,
                files: Vec::new(),
            })
        }
        Command::ExportDot => {
            let sog = build_sog(&analysis.lts, &analysis.secret);
            let sog_dot = export_dot(&sog, &analysis.lts, &DotOptions::default());
            let lts_dot = analysis.lts.to_dot(Some(&analysis.secret));
            let files = vec![
                (dir.join(format!("{stem}.sog.dot")), sog_dot),
                (dir.join(format!("{stem}.lts.dot")), lts_dot),
            ];
            Ok(RunOutput {
                exit_code: 0,
                stdout: files
                    .iter()
                    .map(|(p, _)| format!("wrote {}\n", p.display()))
                    .collect(),
                files,
            })
        }
        Command::Enforce => {
            let (verdict, sog) = check_simple(&analysis.lts, &analysis.secret);
            let net_ctx = match &model {
                LoadedModel::Net(loaded) => Some((
                    &loaded.model,
                    analysis.graph.as_ref().expect("net analysis has a graph"),
                )),
                LoadedModel::Lts(_) => None,
            };
            let outcome = opacify(
                net_ctx,
                &analysis.lts,
                &analysis.secret,
                &sog,
                &verdict.counterexamples,
                &config.limits,
            )
            .map_err(|e| CliError::Model(origin.clone(), e.to_string()))?;

            let patched_model_text = match (&outcome.net, &model) {
                (Some(patched), LoadedModel::Net(loaded)) => {
                    to_json_pretty(&net_to_file(patched, &loaded.raw_secrets))
                }
                _ => to_json_pretty(&lts_to_file(&outcome.lts, &outcome.secret)),
            };
            let patch_json = to_json_pretty(&report::patch_report(
                &outcome.patch,
                outcome.verdict_after.opaque,
            ));
            let files = vec![
                (dir.join(format!("{stem}.opacified.json")), patched_model_text),
                (dir.join(format!("{stem}.patch.json")), patch_json.clone()),
            ];
            let stdout = match config.format {
                Format::Json => patch_json,
                Format::Text => report::patch_text(&outcome),
            };
            let already_opaque = verdict.opaque;
            Ok(RunOutput {
                exit_code: if already_opaque { 1 } else { 0 },
                stdout: if already_opaque {
                    format!("note: model is already opaque; identity patch\n{stdout}")
                } else {
                    stdout
                },
                files,
            })
        }
    }
}

/// Run and write any produced files; used by the binary.
pub fn run_and_write(config: &RunConfig) -> Result<(i32, String), CliError> {
    let out = run(config)?;
    for (path, contents) in &out.files {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)
                    .map_err(|e| CliError::Io(parent.display().to_string(), e.to_string()))?;
            }
        }
        fs::write(path, contents)
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    }
    Ok((out.exit_code, out.stdout))
}
