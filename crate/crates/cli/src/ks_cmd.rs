use std::fmt::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use ctxkit_core::ks::{
    parse_rays, peres33, search, verify_certificate, Certificate, KsError, OrthoGraph, SearchMode, ValueRule, Verdict,
};
use serde_json::json;

use crate::{hex, read_file, GlobalArgs, Report, Status};

#[derive(Args, Debug)]
pub struct KsArgs {
    /// Ray file, one ray per line.
    #[arg(required_unless_present = "peres33", conflicts_with = "peres33")]
    pub file: Option<PathBuf>,
    /// Use the built-in 33-ray set.
    #[arg(long)]
    pub peres33: bool,
    #[arg(long, value_enum, default_value_t = RuleArg::R101)]
    pub rule: RuleArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Sequential)]
    pub mode: ModeArg,
    /// Write the certificate to this path.
    #[arg(long, conflicts_with = "verify")]
    pub certificate: Option<PathBuf>,
    /// Check an existing certificate against the rays instead of searching.
    #[arg(long)]
    pub verify: Option<PathBuf>,
    /// Also count the rays whose removal makes the set colorable.
    #[arg(long)]
    pub critical: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum RuleArg {
    #[value(name = "101")]
    R101,
    Projector,
}

impl From<RuleArg> for ValueRule {
    fn from(r: RuleArg) -> ValueRule {
        match r {
            RuleArg::R101 => ValueRule::OneZeroPerTriad,
            RuleArg::Projector => ValueRule::PROJECTOR,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Sequential,
    Parallel,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> SearchMode {
        match m {
            ModeArg::Sequential => SearchMode::Sequential,
            ModeArg::Parallel => SearchMode::Parallel,
        }
    }
}

fn load_graph(args: &KsArgs) -> anyhow::Result<(String, OrthoGraph)> {
    if args.peres33 {
        return Ok(("peres33".into(), OrthoGraph::build(peres33())?));
    }
    let path = args.file.as_ref().expect("clap requires a file");
    let lines = parse_rays(&read_file(path)?)?;
    let source_lines: Vec<usize> = lines.iter().map(|l| l.line).collect();
    let graph = OrthoGraph::build(lines.into_iter().map(|l| l.ray).collect()).map_err(|e| match e {
        KsError::DuplicateRay(i, j) => anyhow!("duplicate rays on lines {} and {}", source_lines[i], source_lines[j]),
        other => other.into(),
    })?;
    Ok((path.display().to_string(), graph))
}

fn verdict_name(c: &Certificate) -> &'static str {
    if c.is_colorable() {
        "colorable"
    } else {
        "uncolorable"
    }
}

fn status_of(c: &Certificate) -> Status {
    if c.is_colorable() {
        Status::Pass
    } else {
        Status::Violation
    }
}

pub fn run(args: &KsArgs, _g: &GlobalArgs) -> anyhow::Result<Report> {
    let (source, graph) = load_graph(args)?;
    let rule = ValueRule::from(args.rule);
    let mut text = String::new();
    writeln!(text, "input: {source}")?;
    writeln!(
        text,
        "rays: {}, orthogonal pairs: {}, triads: {}",
        graph.len(),
        graph.edges().len(),
        graph.triads().len()
    )?;
    writeln!(text, "rule: {}", rule.name())?;

    if let Some(path) = &args.verify {
        let cert = Certificate::from_json(&read_file(path)?)?;
        let valid = verify_certificate(&graph, &cert).with_context(|| format!("checking {}", path.display()))?;
        if !valid {
            bail!("certificate {} does not verify", path.display());
        }
        writeln!(text, "certificate: valid ({}, rule {})", verdict_name(&cert), cert.rule.name())?;
        return Ok(Report {
            text,
            json: json!({
                "input": source,
                "rays": graph.len(),
                "certificate": path.display().to_string(),
                "valid": true,
                "verdict": verdict_name(&cert),
                "rule": cert.rule.name(),
            }),
            status: status_of(&cert),
        });
    }

    let cert = search(&graph, rule, args.mode.into())?;
    writeln!(text, "mode: {}", if matches!(args.mode, ModeArg::Sequential) { "sequential" } else { "parallel" })?;
    writeln!(text, "verdict: {}", verdict_name(&cert))?;
    writeln!(text, "nodes explored: {}", cert.nodes_explored)?;
    writeln!(text, "input digest: {}", hex(&cert.input_digest))?;
    let mut witness_json = serde_json::Value::Null;
    match &cert.verdict {
        Verdict::Colorable { witness } => {
            if cert.vacuous {
                writeln!(text, "no triads: every ray may take the unmarked value")?;
            }
            writeln!(text, "witness:")?;
            for (ray, v) in graph.rays().iter().zip(witness) {
                writeln!(text, "  {v}  {ray}")?;
            }
            witness_json = json!(graph
                .rays()
                .iter()
                .zip(witness)
                .map(|(r, v)| json!({"ray": r.to_string(), "value": v}))
                .collect::<Vec<_>>());
        }
        Verdict::Uncolorable { trace_digest } => {
            writeln!(text, "trace digest: {}", hex(trace_digest))?;
        }
    }

    let mut critical_json = serde_json::Value::Null;
    if args.critical {
        let critical: Vec<usize> = (0..graph.len())
            .filter(|&i| {
                search(&graph.without(i), rule, args.mode.into())
                    .map(|c| c.is_colorable())
                    .unwrap_or(false)
            })
            .collect();
        writeln!(text, "critical rays: {} of {}", critical.len(), graph.len())?;
        critical_json = json!(critical.iter().map(|&i| graph.rays()[i].to_string()).collect::<Vec<_>>());
    }

    if let Some(path) = &args.certificate {
        std::fs::write(path, cert.to_json()).with_context(|| format!("writing {}", path.display()))?;
        writeln!(text, "certificate written to {}", path.display())?;
    }

    Ok(Report {
        text,
        json: json!({
            "input": source,
            "rays": graph.len(),
            "orthogonal_pairs": graph.edges().len(),
            "triads": graph.triads().len(),
            "rule": rule.name(),
            "verdict": verdict_name(&cert),
            "nodes_explored": cert.nodes_explored,
            "input_digest": hex(&cert.input_digest),
            "witness": witness_json,
            "critical_rays": critical_json,
        }),
        status: status_of(&cert),
    })
}
