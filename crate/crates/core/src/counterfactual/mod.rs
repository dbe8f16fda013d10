//! Possible-worlds evaluation of counterfactuals `φ □→ ψ` over the worlds
//! of a hidden-variable model.
//!
//! A world is a hidden state λ, a measurement configuration and the
//! outcomes the model's responses assign to it. Similarity is two-tier:
//! a policy picks the accessible sphere around the actual world, and
//! `φ □→ ψ` is true when every accessible φ-world is a ψ-world, false when
//! one is not, and vacuous when there is none.

mod dilemma;
mod prop;

pub use dilemma::{epr_scenario, DilemmaReport, LambdaVerdict, PolicySummary, ACTUAL_OUTCOME, PREDICTED_OUTCOME};
pub use prop::{parse_proposition, Proposition};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::hv::{HvError, HvModel, Outcome};
use crate::quantum::Party;

/// Upper bound on the number of enumerated worlds.
pub const MAX_WORLDS: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum CfError {
    #[error(transparent)]
    Model(#[from] HvError),
    #[error("proposition: {0}")]
    Proposition(String),
    #[error("policy: {0}")]
    Policy(String),
    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),
    #[error("too many worlds: {0} (max {MAX_WORLDS})")]
    TooManyWorlds(usize),
    #[error("directions of `{0}` and `{1}` are not orthogonal")]
    NotOrthogonal(String, String),
}

/// Which settings are measured; indices into the model's settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    Nothing,
    First(usize),
    Second(usize),
    Both(usize, usize),
}

impl Configuration {
    pub fn on_side(&self, side: Party) -> Option<usize> {
        match (self, side) {
            (Configuration::First(a) | Configuration::Both(a, _), Party::First) => Some(*a),
            (Configuration::Second(b) | Configuration::Both(_, b), Party::Second) => Some(*b),
            _ => None,
        }
    }

    pub fn describe(&self, m: &HvModel) -> String {
        let id = |s: &usize| m.setting(*s).id.clone();
        match self {
            Configuration::Nothing => "none".into(),
            Configuration::First(a) => format!("1:{}", id(a)),
            Configuration::Second(b) => format!("2:{}", id(b)),
            Configuration::Both(a, b) => format!("1:{} 2:{}", id(a), id(b)),
        }
    }
}

/// A world; outcomes are always the model's responses for its λ and
/// configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    lambda: usize,
    config: Configuration,
    first: Option<Outcome>,
    second: Option<Outcome>,
}

impl World {
    pub fn new(m: &HvModel, lambda: usize, config: Configuration) -> Result<World, CfError> {
        if lambda >= m.num_lambdas() {
            return Err(CfError::Inconsistent(format!("no hidden state with index {lambda}")));
        }
        let check = |s: usize, side: Party| -> Result<(), CfError> {
            if s >= m.settings().len() || m.setting(s).side != side {
                return Err(CfError::Inconsistent(format!("setting index {s} is not on side {}", side.index())));
            }
            Ok(())
        };
        let (first, second) = match config {
            Configuration::Nothing => (None, None),
            Configuration::First(a) => {
                check(a, Party::First)?;
                (Some(m.single(lambda, a)), None)
            }
            Configuration::Second(b) => {
                check(b, Party::Second)?;
                (None, Some(m.single(lambda, b)))
            }
            Configuration::Both(a, b) => {
                check(a, Party::First)?;
                check(b, Party::Second)?;
                let (x, y) = m.joint(lambda, a, b);
                (Some(x), Some(y))
            }
        };
        Ok(World {
            lambda,
            config,
            first,
            second,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn config(&self) -> Configuration {
        self.config
    }

    pub fn performs(&self, s: usize) -> bool {
        self.config.on_side(Party::First) == Some(s) || self.config.on_side(Party::Second) == Some(s)
    }

    /// Recorded outcome of setting `s`, if it was measured.
    pub fn record(&self, s: usize) -> Option<Outcome> {
        if self.config.on_side(Party::First) == Some(s) {
            self.first
        } else if self.config.on_side(Party::Second) == Some(s) {
            self.second
        } else {
            None
        }
    }

    /// `(setting, outcome)` for every measured setting.
    pub fn records(&self) -> Vec<(usize, Outcome)> {
        let mut out = Vec::new();
        if let (Some(a), Some(x)) = (self.config.on_side(Party::First), self.first) {
            out.push((a, x));
        }
        if let (Some(b), Some(y)) = (self.config.on_side(Party::Second), self.second) {
            out.push((b, y));
        }
        out
    }

    pub fn is_single_measurement(&self) -> bool {
        matches!(self.config, Configuration::First(_) | Configuration::Second(_))
    }

    pub fn view(&self, m: &HvModel) -> WorldView {
        WorldView {
            lambda: m.lambda_label(self.lambda).to_string(),
            configuration: self.config.describe(m),
            outcomes: self
                .records()
                .into_iter()
                .map(|(s, o)| (m.setting(s).id.clone(), o))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorldView {
    pub lambda: String,
    pub configuration: String,
    pub outcomes: BTreeMap<String, Outcome>,
}

/// Every configuration of the menu, in order: nothing, side 1 alone,
/// side 2 alone, both.
pub fn configurations(m: &HvModel) -> Vec<Configuration> {
    let mut out = vec![Configuration::Nothing];
    out.extend(m.side_settings(Party::First).iter().map(|&a| Configuration::First(a)));
    out.extend(m.side_settings(Party::Second).iter().map(|&b| Configuration::Second(b)));
    out.extend(m.pairs().map(|(a, b)| Configuration::Both(a, b)));
    out
}

/// Every positive-weight λ crossed with every configuration, λ-major.
pub fn enumerate_worlds(m: &HvModel) -> Result<Vec<World>, CfError> {
    let configs = configurations(m);
    let support = m.support();
    let n = support.len().saturating_mul(configs.len());
    if n > MAX_WORLDS {
        return Err(CfError::TooManyWorlds(n));
    }
    let mut out = Vec::with_capacity(n);
    for &l in support.members() {
        for &c in &configs {
            out.push(World::new(m, l, c)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpherePolicy {
    /// Worlds with the actual hidden state.
    FixLambda,
    /// Worlds that either record `value` for `setting`, or do not measure
    /// it and keep the actual hidden state.
    FixOutcome { setting: usize, value: Outcome },
}

impl SpherePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            SpherePolicy::FixLambda => "fix-lambda",
            SpherePolicy::FixOutcome { .. } => "fix-outcome",
        }
    }
}

/// Indices of the worlds in the sphere around `actual`.
pub fn accessible(actual: &World, policy: SpherePolicy, worlds: &[World]) -> Result<Vec<usize>, CfError> {
    match policy {
        SpherePolicy::FixLambda => Ok(select(worlds, |w| w.lambda == actual.lambda)),
        SpherePolicy::FixOutcome { setting, value } => {
            if actual.record(setting) != Some(value) {
                return Err(CfError::Policy(format!(
                    "the actual world does not record outcome {value} for setting index {setting}"
                )));
            }
            Ok(select(worlds, |w| match w.record(setting) {
                Some(v) => v == value,
                None => w.lambda == actual.lambda,
            }))
        }
    }
}

fn select(worlds: &[World], keep: impl Fn(&World) -> bool) -> Vec<usize> {
    (0..worlds.len()).filter(|&i| keep(&worlds[i])).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CfVerdict {
    Vacuous,
    True,
    False,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfResult {
    pub verdict: CfVerdict,
    /// True: every accessible φ-world. False: the accessible φ∧¬ψ worlds.
    pub witnesses: Vec<usize>,
    /// Accessible worlds whose hidden state would have given a different
    /// outcome to one of the actual world's single measurements.
    pub breaches: Vec<usize>,
}

/// Truth of `φ □→ ψ` when `sphere` is the accessible set.
pub fn eval_in_sphere(
    m: &HvModel,
    phi: &Proposition,
    psi: &Proposition,
    actual: &World,
    sphere: &[usize],
    worlds: &[World],
) -> CfResult {
    let phi_worlds: Vec<usize> = sphere.iter().copied().filter(|&i| phi.eval(&worlds[i])).collect();
    let counter: Vec<usize> = phi_worlds.iter().copied().filter(|&i| !psi.eval(&worlds[i])).collect();
    let (verdict, witnesses) = if phi_worlds.is_empty() {
        (CfVerdict::Vacuous, Vec::new())
    } else if counter.is_empty() {
        (CfVerdict::True, phi_worlds)
    } else {
        (CfVerdict::False, counter)
    };
    let frozen: Vec<(usize, Outcome)> = if actual.is_single_measurement() {
        actual.records()
    } else {
        Vec::new()
    };
    let breaches = sphere
        .iter()
        .copied()
        .filter(|&i| frozen.iter().any(|&(s, v)| m.single(worlds[i].lambda, s) != v))
        .collect();
    CfResult {
        verdict,
        witnesses,
        breaches,
    }
}

pub fn eval_cf(
    m: &HvModel,
    phi: &Proposition,
    psi: &Proposition,
    actual: &World,
    policy: SpherePolicy,
    worlds: &[World],
) -> Result<CfResult, CfError> {
    let sphere = accessible(actual, policy, worlds)?;
    Ok(eval_in_sphere(m, phi, psi, actual, &sphere, worlds))
}
