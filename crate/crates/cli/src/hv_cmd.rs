use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Subcommand, ValueEnum};
use ctxkit_core::hv::{
    faithfulness_deviation, find_context_flips, synthesize_model, HvModel, LambdaSet, Observable, ObservableForm,
    Outcome, Setting,
};
use ctxkit_core::quantum::{ks_state, singlet_state, Party, RealDirection, StateVector};
use serde_json::json;

use crate::{read_file, GlobalArgs, Report, Status};

#[derive(Subcommand, Debug)]
pub enum HvCommand {
    /// Build a deterministic model reproducing the Born statistics of a state.
    Synth(SynthArgs),
    /// Run the locality checks on a model file.
    Audit(AuditArgs),
    /// List hidden states whose outcome for a setting changes when a
    /// partner measurement is added.
    Flips(FlipsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum StateArg {
    /// Two spin-½ particles, total spin 0.
    Singlet,
    /// Two spin-1 particles, total spin 0.
    Ks,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub state: StateArg,
    /// `ID:SIDE:FORM:X,Y,Z` with FORM one of pauli, spin, squared.
    #[arg(long = "setting", required = true)]
    pub settings: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Partition,
    L,
    Product,
    Bell,
    Pi,
    Oi,
    Decomposition,
    Chsh,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    pub model: PathBuf,
    /// Restrict to these checks (default: all).
    #[arg(long = "check", value_enum)]
    pub checks: Vec<Check>,
}

#[derive(Args, Debug)]
pub struct FlipsArgs {
    pub model: PathBuf,
    #[arg(long)]
    pub setting: String,
    #[arg(long, allow_hyphen_values = true)]
    pub outcome: Outcome,
}

pub fn run(cmd: &HvCommand, g: &GlobalArgs) -> anyhow::Result<Report> {
    match cmd {
        HvCommand::Synth(a) => synth(a, g),
        HvCommand::Audit(a) => audit(a, g),
        HvCommand::Flips(a) => flips(a),
    }
}

fn parse_setting(spec: &str) -> anyhow::Result<Setting> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [id, side, form, dir] = parts[..] else {
        bail!("setting `{spec}` is not of the form ID:SIDE:FORM:X,Y,Z");
    };
    let side = match side {
        "1" => Party::First,
        "2" => Party::Second,
        other => bail!("setting `{spec}`: side must be 1 or 2, got `{other}`"),
    };
    let form = match form {
        "pauli" => ObservableForm::Pauli,
        "spin" => ObservableForm::Spin,
        "squared" => ObservableForm::Squared,
        other => bail!("setting `{spec}`: unknown form `{other}`"),
    };
    let v: Vec<f64> = dir
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!("setting `{spec}`: bad direction: {e}"))?;
    let v: [f64; 3] = v
        .try_into()
        .map_err(|_| anyhow!("setting `{spec}`: direction needs three components"))?;
    let n = RealDirection::normalized(v).map_err(|e| anyhow!("setting `{spec}`: {e}"))?;
    Ok(Setting::with_observable(id, side, Observable::new(form, &n)))
}

fn synth(args: &SynthArgs, g: &GlobalArgs) -> anyhow::Result<Report> {
    let state: StateVector = match args.state {
        StateArg::Singlet => singlet_state(),
        StateArg::Ks => ks_state(),
    };
    let settings = args
        .settings
        .iter()
        .map(|s| parse_setting(s))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (a, b): (Vec<Setting>, Vec<Setting>) = settings.into_iter().partition(|s| s.side == Party::First);
    let m = synthesize_model(&state, &a, &b)?;
    let dev = faithfulness_deviation(&m, &state)?;
    eprintln!("{} hidden states, faithfulness deviation {:.3e}", m.num_lambdas(), dev);
    let doc = m.to_doc();
    Ok(Report {
        text: m.to_json(),
        json: serde_json::to_value(&doc)?,
        status: if dev <= g.tolerance { Status::Pass } else { Status::Fail },
    })
}

fn load(path: &Path) -> anyhow::Result<HvModel> {
    HvModel::from_json(&read_file(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn measure_text(m: &HvModel, set: &LambdaSet) -> String {
    match m.measure_exact(set) {
        Some(q) => format!("{q} ({})", m.measure(set)),
        None => format!("{}", m.measure(set)),
    }
}

struct Line {
    check: Check,
    name: &'static str,
    ok: bool,
    detail: String,
    measure: Option<f64>,
}

fn audit(args: &AuditArgs, g: &GlobalArgs) -> anyhow::Result<Report> {
    let m = load(&args.model)?;
    let mut wanted = args.checks.clone();
    if wanted.is_empty() {
        wanted = vec![
            Check::Partition,
            Check::L,
            Check::Product,
            Check::Bell,
            Check::Pi,
            Check::Oi,
            Check::Decomposition,
            Check::Chsh,
        ];
    }
    wanted.sort();
    wanted.dedup();

    let mut lines = Vec::new();
    for &check in &wanted {
        let line = match check {
            Check::Partition => {
                let r = m.check_partition();
                Line {
                    check,
                    name: "partition",
                    ok: r.is_none(),
                    detail: r.unwrap_or_default(),
                    measure: None,
                }
            }
            Check::L => {
                let r = m.check_assumption_l();
                Line {
                    check,
                    name: "assumption L",
                    ok: r.holds(),
                    detail: format!(
                        "flip measure {}; side 1 {}, side 2 {}",
                        measure_text(&m, &r.flips.sigma),
                        r.per_side[0],
                        r.per_side[1]
                    ),
                    measure: Some(r.flips.measure),
                }
            }
            Check::Product => {
                let r = m.check_product_identity();
                Line {
                    check,
                    name: "product identity",
                    ok: r.is_none(),
                    detail: r
                        .map(|c| {
                            format!(
                                "cell {}={} {}={}: joint {:?} vs intersection {:?}",
                                m.setting(c.a).id,
                                c.outcome_a,
                                m.setting(c.b).id,
                                c.outcome_b,
                                m.labels(&c.joint_set),
                                m.labels(&c.intersection)
                            )
                        })
                        .unwrap_or_default(),
                    measure: None,
                }
            }
            Check::Bell => {
                let r = m.check_bell_factorization();
                Line {
                    check,
                    name: "bell factorization",
                    ok: r.holds(),
                    detail: format!("failure measure {}", measure_text(&m, &r.set)),
                    measure: Some(r.measure),
                }
            }
            Check::Pi => {
                let r = m.check_parameter_independence();
                Line {
                    check,
                    name: "parameter independence",
                    ok: r.holds(),
                    detail: format!(
                        "violation measure {}; side 1 {}, side 2 {}",
                        measure_text(&m, &r.set),
                        r.per_side[0],
                        r.per_side[1]
                    ),
                    measure: Some(r.measure),
                }
            }
            Check::Oi => {
                let r = m.check_outcome_independence();
                Line {
                    check,
                    name: "outcome independence",
                    ok: r.holds(),
                    detail: format!("{} violations", r.violations.len()),
                    measure: None,
                }
            }
            Check::Decomposition => {
                let r = m.check_decomposition();
                Line {
                    check,
                    name: "factorization <=> PI and OI",
                    ok: r.counterexample.is_none(),
                    detail: match r.counterexample {
                        None => format!("{} cases", r.checked),
                        Some((l, a, b)) => format!(
                            "fails at {} with {}, {}",
                            m.lambda_label(l),
                            m.setting(a).id,
                            m.setting(b).id
                        ),
                    },
                    measure: None,
                }
            }
            Check::Chsh => match m.max_abs_chsh() {
                Some(v) => Line {
                    check,
                    name: "|CHSH| <= 2",
                    ok: v <= 2.0 + g.tolerance,
                    detail: format!("max |CHSH| {v}"),
                    measure: None,
                },
                None => Line {
                    check,
                    name: "|CHSH| <= 2",
                    ok: true,
                    detail: "not applicable: needs two ±1 settings on each side".into(),
                    measure: None,
                },
            },
        };
        lines.push(line);
    }

    let all_ok = lines.iter().all(|l| l.ok);
    let mut text = String::new();
    writeln!(
        text,
        "model {}: {} hidden states, {} with positive weight, {} settings",
        args.model.display(),
        m.num_lambdas(),
        m.support().len(),
        m.settings().len()
    )?;
    for l in &lines {
        writeln!(text, "{:<9} {:<28} {}", if l.ok { "ok" } else { "violated" }, l.name, l.detail)?;
    }
    let json_lines: Vec<_> = lines
        .iter()
        .map(|l| {
            json!({
                "check": format!("{:?}", l.check).to_lowercase(),
                "name": l.name,
                "ok": l.ok,
                "detail": l.detail,
                "measure": l.measure,
            })
        })
        .collect();
    Ok(Report {
        text,
        json: json!({
            "model": args.model.display().to_string(),
            "lambdas": m.num_lambdas(),
            "checks": json_lines,
            "all_ok": all_ok,
        }),
        status: if all_ok { Status::Pass } else { Status::Violation },
    })
}

fn flips(args: &FlipsArgs) -> anyhow::Result<Report> {
    let m = load(&args.model)?;
    let f = find_context_flips(&m, &args.setting, args.outcome)?;
    let mut text = String::new();
    writeln!(
        text,
        "target {} (side {}), outcome {} alone",
        args.setting,
        m.setting(f.target).side.index(),
        args.outcome
    )?;
    writeln!(text, "sigma: {} hidden states, measure {}", f.report.sigma.len(), measure_text(&m, &f.report.sigma))?;
    let mut cells = Vec::new();
    for c in f.cells.iter().filter(|c| !c.set.is_empty()) {
        writeln!(
            text,
            "  with {} = {}: {} shows {}; measure {}; {:?}",
            m.setting(c.partner).id,
            c.partner_outcome,
            args.setting,
            c.flipped,
            measure_text(&m, &c.set),
            m.labels(&c.set)
        )?;
        cells.push(json!({
            "partner": m.setting(c.partner).id,
            "partner_outcome": c.partner_outcome,
            "flipped_to": c.flipped,
            "lambdas": m.labels(&c.set),
            "measure": c.measure,
        }));
    }
    let verified = f.report.witnesses.iter().all(|w| w.verify(&m));
    writeln!(text, "witnesses: {} ({})", f.report.witnesses.len(), if verified { "all re-verified" } else { "MISMATCH" })?;
    if !verified {
        bail!("a flip witness does not match the model responses");
    }
    Ok(Report {
        text,
        json: json!({
            "target": args.setting,
            "outcome": args.outcome,
            "sigma": m.labels(&f.report.sigma),
            "measure": f.report.measure,
            "cells": cells,
            "witnesses": f.report.witnesses.len(),
        }),
        status: if f.report.sigma.is_empty() { Status::Pass } else { Status::Violation },
    })
}
