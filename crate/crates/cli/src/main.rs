use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use opacify_cli::run::{Command as RunCommand, Format, RunConfig};
use opacify_cli::run_and_write;
use opacify_core::checker::Variant;
use opacify_core::net::ExplorationLimits;

/// Opacity verification and enforcement for Petri nets, open workflow nets,
/// and labeled transition systems.
#[derive(Parser)]
#[command(name = "opacify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Simple,
    Kweak,
    Kstrong,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Simple => Variant::Simple,
            VariantArg::Kweak => Variant::KWeak,
            VariantArg::Kstrong => Variant::KStrong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(v: FormatArg) -> Format {
        match v {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Model file: a net model or a labeled transition system (JSON).
    model: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output path (directory for commands that write files); defaults to
    /// $OPACIFY_OUT_DIR, then the working directory.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Reachability state bound (possibly-unbounded guard).
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,
    /// Per-place token ceiling (possibly-unbounded guard).
    #[arg(long, default_value_t = 255)]
    max_tokens: u32,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Verify opacity and print the verdict report.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        /// Opacity variant to check.
        #[arg(long, value_enum, default_value = "simple")]
        variant: VariantArg,
        /// Lookback depth for the K-step variants.
        #[arg(long, short, default_value_t = 1)]
        k: u32,
    },
    /// Pad a non-opaque model with dummy unobservable behavior and write the
    /// patched model plus a patch report.
    Enforce {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write Graphviz renderings of the observation graph and the state
    /// space.
    ExportDot {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print disclosing observations found by the exhaustive oracle.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Lookback depth for the K-step definitions.
        #[arg(long, short, default_value_t = 1)]
        k: u32,
        /// Observation length bound (default: state count + k + 2).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check the workflow-net structure requirements and print diagnostics.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn to_config(cli: CliCommand) -> RunConfig {
    let (command, common, variant, k, depth) = match cli {
        CliCommand::Check { common, variant, k } => {
            (RunCommand::Check, common, Variant::from(variant), k, None)
        }
        CliCommand::Enforce { common } => (RunCommand::Enforce, common, Variant::Simple, 0, None),
        CliCommand::ExportDot { common } => {
            (RunCommand::ExportDot, common, Variant::Simple, 0, None)
        }
        CliCommand::Oracle { common, k, depth } => {
            (RunCommand::Oracle, common, Variant::Simple, k, depth)
        }
        CliCommand::Validate { common } => (RunCommand::Validate, common, Variant::Simple, 0, None),
    };
    RunConfig {
        command,
        model_path: common.model,
        variant,
        k,
        oracle_depth: depth,
        output_path: common.output,
        format: common.format.into(),
        limits: ExplorationLimits {
            max_states: common.max_states,
            max_tokens_per_place: common.max_tokens,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_and_write(&to_config(cli.command)) {
        Ok((code, stdout)) => {
            print!("{stdout}");
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
