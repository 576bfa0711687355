use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nqcalc::output::{render_json, render_text};
use nqcalc::run::{classify_all, roundtrip_all};
use nqcalc::{parse_manifest, run, RunOptions};

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Run only the command (or structure) with this name.
    #[arg(long)]
    only: Option<String>,
    /// Append wall clock time per command.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the manifest's command list.
    Verify(Common),
    /// Spencer round trip on every declared form and Spencer data block.
    Roundtrip(Common),
    /// Run the matching classifier on every declared structure.
    Classify(Common),
}

#[derive(Parser)]
#[command(name = "nqcalc", version, about = "Graded Cartan calculus and NQ-manifold classifiers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("nqcalc: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, which) = match &cli.cmd {
        Cmd::Verify(c) => (c, 0),
        Cmd::Roundtrip(c) => (c, 1),
        Cmd::Classify(c) => (c, 2),
    };
    let seed = match std::env::var("NQCALC_SEED") {
        Ok(s) => match s.trim().parse() {
            Ok(v) => v,
            Err(_) => return config_error(format!("NQCALC_SEED must be an unsigned integer, found `{s}`")),
        },
        Err(_) => 0,
    };
    let text = match std::fs::read_to_string(&common.manifest) {
        Ok(t) => t,
        Err(e) => return config_error(format!("{}: {e}", common.manifest.display())),
    };
    let manifest = match parse_manifest(&text) {
        Ok(m) => m,
        Err(e) => return config_error(format!("{}:{e}", common.manifest.display())),
    };
    let opts = RunOptions { only: common.only.clone(), seed, timing: common.timing };
    let report = match which {
        0 => run(&manifest, &opts),
        1 => roundtrip_all(&manifest, &opts),
        _ => classify_all(&manifest, &opts),
    };
    if let Some(name) = &opts.only {
        if report.outcomes.is_empty() {
            return config_error(format!("no command named `{name}`"));
        }
    }
    let rendered = match common.format {
        Format::Text => render_text(&report),
        Format::Json => render_json(&report),
    };
    print!("{rendered}");
    ExitCode::from(report.exit_code() as u8)
}
