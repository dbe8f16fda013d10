mod cf_cmd;
mod hv_cmd;
mod ks_cmd;
mod quantum_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ctxkit", version, about = "Contextuality and nonlocality checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Numerical tolerance, in (0, 1e-6].
    #[arg(long, global = true, default_value_t = 1e-10, allow_hyphen_values = true)]
    pub tolerance: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the spin-operator identity suite.
    VerifyQuantum(quantum_cmd::VerifyArgs),
    /// Decide colorability of a ray set.
    KsSearch(ks_cmd::KsArgs),
    /// Hidden-variable models: synthesize, audit, find context flips.
    Hv {
        #[command(subcommand)]
        command: hv_cmd::HvCommand,
    },
    /// Evaluate a counterfactual scenario.
    CfEval(cf_cmd::CfArgs),
}

/// How a command ended when it did not hit an operational error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// A principled negative result: uncolorable, or a locality check
    /// violated.
    Violation,
    /// A check that is supposed to pass did not.
    Fail,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violation => 3,
            Status::Fail => 1,
        }
    }
}

pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
    pub status: Status,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("report serializes") + "\n",
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let g = &cli.global;
    if !(g.tolerance > 0.0 && g.tolerance <= 1e-6) {
        bail!("--tolerance must lie in (0, 1e-6], got {}", g.tolerance);
    }
    let report = match &cli.command {
        Command::VerifyQuantum(args) => quantum_cmd::run(args, g)?,
        Command::KsSearch(args) => ks_cmd::run(args, g)?,
        Command::Hv { command } => hv_cmd::run(command, g)?,
        Command::CfEval(args) => cf_cmd::run(args, g)?,
    };
    let rendered = report.render(g.format);
    match &g.out {
        Some(path) => std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the operational-error code
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn read_file(path: &std::path::Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
