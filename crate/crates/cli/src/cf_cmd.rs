use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use ctxkit_core::counterfactual::{
    enumerate_worlds, epr_scenario, eval_cf, parse_proposition, CfResult, CfVerdict, Configuration, DilemmaReport,
    SpherePolicy, World, WorldView,
};
use ctxkit_core::hv::{HvModel, Outcome};
use ctxkit_core::quantum::Party;
use serde::Deserialize;
use serde_json::json;

use crate::{read_file, GlobalArgs, Report, Status};

#[derive(Args, Debug)]
pub struct CfArgs {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = PolicyArg::FixLambda)]
    pub policy: PolicyArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyArg {
    FixLambda,
    FixOutcome,
}

/// A scenario: the model, the actual world, and either a counterfactual
/// `phi □→ psi`, the two-observer dilemma, or both.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct Scenario {
    /// Model file, relative to the scenario file.
    model: PathBuf,
    actual: ActualSpec,
    phi: Option<String>,
    psi: Option<String>,
    /// Setting whose actual outcome the fix-outcome policy freezes; defaults
    /// to the one actually measured.
    fix: Option<String>,
    dilemma: Option<DilemmaSpec>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ActualSpec {
    lambda: String,
    #[serde(default)]
    measured: Vec<String>,
    /// Outcomes the scenario claims were recorded; must match the model.
    #[serde(default)]
    outcomes: BTreeMap<String, Outcome>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct DilemmaSpec {
    k: String,
    l: String,
}

fn actual_world(m: &HvModel, spec: &ActualSpec) -> anyhow::Result<World> {
    let lambda = (0..m.num_lambdas())
        .find(|&x| m.lambda_label(x) == spec.lambda)
        .ok_or_else(|| anyhow!("unknown hidden state `{}`", spec.lambda))?;
    if !m.is_positive(lambda) {
        bail!("hidden state `{}` has zero weight", spec.lambda);
    }
    let mut first = None;
    let mut second = None;
    for id in &spec.measured {
        let s = m.setting_index(id)?;
        let slot = if m.setting(s).side == Party::First { &mut first } else { &mut second };
        if slot.replace(s).is_some() {
            bail!("two settings measured on side {}", m.setting(s).side.index());
        }
    }
    let config = match (first, second) {
        (None, None) => Configuration::Nothing,
        (Some(a), None) => Configuration::First(a),
        (None, Some(b)) => Configuration::Second(b),
        (Some(a), Some(b)) => Configuration::Both(a, b),
    };
    let world = World::new(m, lambda, config)?;
    for (id, &claimed) in &spec.outcomes {
        let s = m.setting_index(id)?;
        match world.record(s) {
            Some(v) if v == claimed => {}
            Some(v) => bail!("actual world records {v} for `{id}`, scenario claims {claimed}"),
            None => bail!("scenario claims an outcome for `{id}`, which is not measured"),
        }
    }
    Ok(world)
}

fn world_line(v: &WorldView) -> String {
    let outcomes: Vec<String> = v.outcomes.iter().map(|(k, o)| format!("{k}={o}")).collect();
    format!("{} [{}] {}", v.lambda, v.configuration, outcomes.join(" "))
}

fn verdict_name(v: CfVerdict) -> &'static str {
    match v {
        CfVerdict::Vacuous => "vacuous",
        CfVerdict::True => "true",
        CfVerdict::False => "false",
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dilemma_text(text: &mut String, d: &DilemmaReport) -> std::fmt::Result {
    writeln!(text, "dilemma: {} on side 1, {} on side 2", d.k, d.l)?;
    writeln!(text, "  antecedent {}", d.antecedent)?;
    writeln!(text, "  consequent {}", d.consequent)?;
    writeln!(text, "  sigma {:?}, measure {}", d.sigma, d.sigma_measure)?;
    for p in [&d.fix_lambda, &d.fix_outcome] {
        let mut counts = BTreeMap::new();
        for v in &p.verdicts {
            *counts.entry(verdict_name(v.verdict)).or_insert(0usize) += 1;
        }
        let counts: Vec<String> = counts.iter().map(|(k, n)| format!("{k} {n}")).collect();
        writeln!(text, "  {}: {}", p.policy, counts.join(", "))?;
        writeln!(text, "    false on {:?}, measure {}", p.false_lambdas, p.false_measure)?;
        writeln!(
            text,
            "    {} breach worlds on {:?}, measure {}",
            p.breaches.len(),
            p.breach_lambdas,
            p.breach_measure
        )?;
    }
    writeln!(text, "  fix-lambda false set equals sigma: {}", yes(d.fix_lambda_false_equals_sigma))?;
    writeln!(text, "  fix-outcome breaches are the complement worlds: {}", yes(d.breaches_equal_complement))
}

pub fn run(args: &CfArgs, _g: &GlobalArgs) -> anyhow::Result<Report> {
    let text_in = read_file(&args.scenario)?;
    let sc: Scenario = serde_json::from_str(&text_in).with_context(|| format!("parsing {}", args.scenario.display()))?;
    let base = args.scenario.parent().unwrap_or_else(|| std::path::Path::new("."));
    let model_path = base.join(&sc.model);
    let m = HvModel::from_json(&read_file(&model_path)?)
        .with_context(|| format!("loading model {}", model_path.display()))?;
    let actual = actual_world(&m, &sc.actual)?;

    let mut text = String::new();
    let view = actual.view(&m);
    writeln!(text, "model: {}", sc.model.display())?;
    writeln!(text, "actual: {}", world_line(&view))?;

    let mut result_json = serde_json::Value::Null;
    match (&sc.phi, &sc.psi) {
        (Some(phi), Some(psi)) => {
            let phi = parse_proposition(phi, &m)?;
            let psi = parse_proposition(psi, &m)?;
            let policy = match args.policy {
                PolicyArg::FixLambda => SpherePolicy::FixLambda,
                PolicyArg::FixOutcome => {
                    let setting = match &sc.fix {
                        Some(id) => m.setting_index(id)?,
                        None => match actual.records()[..] {
                            [(s, _)] => s,
                            _ => bail!("fix-outcome needs `fix` unless exactly one setting was measured"),
                        },
                    };
                    let value = actual
                        .record(setting)
                        .ok_or_else(|| anyhow!("`{}` was not measured in the actual world", m.setting(setting).id))?;
                    SpherePolicy::FixOutcome { setting, value }
                }
            };
            let worlds = enumerate_worlds(&m)?;
            let r: CfResult = eval_cf(&m, &phi, &psi, &actual, policy, &worlds)?;
            writeln!(text, "policy: {}", policy.name())?;
            writeln!(text, "{} []-> {}", phi.render(&m), psi.render(&m))?;
            writeln!(text, "verdict: {}", verdict_name(r.verdict))?;
            let witnesses: Vec<WorldView> = r.witnesses.iter().map(|&i| worlds[i].view(&m)).collect();
            let breaches: Vec<WorldView> = r.breaches.iter().map(|&i| worlds[i].view(&m)).collect();
            let label = match r.verdict {
                CfVerdict::False => "counterexamples",
                _ => "antecedent worlds",
            };
            writeln!(text, "{label}: {}", witnesses.len())?;
            for w in &witnesses {
                writeln!(text, "  {}", world_line(w))?;
            }
            writeln!(text, "breaches: {}", breaches.len())?;
            for w in &breaches {
                writeln!(text, "  {}", world_line(w))?;
            }
            result_json = json!({
                "policy": policy.name(),
                "phi": phi.render(&m),
                "psi": psi.render(&m),
                "verdict": r.verdict,
                "witnesses": witnesses,
                "breaches": breaches,
            });
        }
        (None, None) => {}
        _ => bail!("a scenario needs both `phi` and `psi`, or neither"),
    }

    let mut dilemma_json = serde_json::Value::Null;
    if let Some(d) = &sc.dilemma {
        let report = epr_scenario(&m, &d.k, &d.l)?;
        dilemma_text(&mut text, &report)?;
        dilemma_json = serde_json::to_value(&report)?;
    }
    if result_json.is_null() && dilemma_json.is_null() {
        bail!("the scenario asks for nothing: give `phi` and `psi`, or `dilemma`");
    }

    Ok(Report {
        text,
        json: json!({
            "model": sc.model.display().to_string(),
            "actual": view,
            "result": result_json,
            "dilemma": dilemma_json,
        }),
        status: Status::Pass,
    })
}
