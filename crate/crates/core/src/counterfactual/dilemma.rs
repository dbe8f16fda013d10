//! The two-observer scenario: Alice alone measures `k` and records 0; would
//! Bob, had he measured `l` as well, have obtained 1?
//!
//! The counterfactual antecedent is "both `k` and `l` are measured", since
//! Alice's measurement is already in the past. Each positive-weight λ that
//! gives 0 for `k` alone is a candidate actual world; the report evaluates
//! the counterfactual at each of them under both sphere policies.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{
    accessible, enumerate_worlds, eval_in_sphere, CfError, CfVerdict, Configuration, Proposition, SpherePolicy,
    World, WorldView,
};
use crate::hv::{find_context_flips, HvModel, LambdaSet};
use crate::quantum::{Party, ORTHO_TOL};

/// Alice's actual record.
pub const ACTUAL_OUTCOME: i32 = 0;
/// What the counterfactual claims Bob would have seen.
pub const PREDICTED_OUTCOME: i32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct LambdaVerdict {
    pub lambda: String,
    pub verdict: CfVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolicySummary {
    pub policy: &'static str,
    pub verdicts: Vec<LambdaVerdict>,
    pub false_lambdas: Vec<String>,
    pub false_measure: f64,
    pub breaches: Vec<WorldView>,
    pub breach_lambdas: Vec<String>,
    pub breach_measure: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DilemmaReport {
    pub k: String,
    pub l: String,
    pub antecedent: String,
    pub consequent: String,
    /// λ where `k` gives 0 alone but 1 next to `l`, which gives 0.
    pub sigma: Vec<String>,
    pub sigma_measure: f64,
    pub fix_lambda: PolicySummary,
    pub fix_outcome: PolicySummary,
    /// FixLambda's false set equals `sigma`.
    pub fix_lambda_false_equals_sigma: bool,
    /// FixOutcome's breaches are exactly its accessible worlds whose λ gives
    /// a different outcome for `k` alone.
    pub breaches_equal_complement: bool,
    #[serde(skip)]
    pub sigma_set: LambdaSet,
    #[serde(skip)]
    pub fix_lambda_false_set: LambdaSet,
    #[serde(skip)]
    pub breach_set: LambdaSet,
}

impl DilemmaReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn epr_scenario(m: &HvModel, k: &str, l: &str) -> Result<DilemmaReport, CfError> {
    let ki = m.setting_index(k)?;
    let li = m.setting_index(l)?;
    for (s, side) in [(ki, Party::First), (li, Party::Second)] {
        if m.setting(s).side != side {
            return Err(CfError::Inconsistent(format!(
                "`{}` must be on side {}",
                m.setting(s).id,
                side.index()
            )));
        }
    }
    if let (Some(a), Some(b)) = (&m.setting(ki).observable, &m.setting(li).observable) {
        let dot: f64 = a.direction.iter().zip(&b.direction).map(|(x, y)| x * y).sum();
        if dot.abs() > ORTHO_TOL {
            return Err(CfError::NotOrthogonal(k.to_string(), l.to_string()));
        }
    }
    for (s, v) in [(ki, ACTUAL_OUTCOME), (li, PREDICTED_OUTCOME)] {
        if !m.setting(s).outcomes.contains(&v) {
            return Err(CfError::Inconsistent(format!("`{}` cannot show {v}", m.setting(s).id)));
        }
    }

    let worlds = enumerate_worlds(m)?;
    let phi = Proposition::And(vec![
        Proposition::performs(m, Party::First, k)?,
        Proposition::performs(m, Party::Second, l)?,
    ]);
    let psi = Proposition::outcome(m, Party::Second, l, PREDICTED_OUTCOME)?;

    let candidates: Vec<usize> = m
        .support()
        .members()
        .iter()
        .copied()
        .filter(|&x| m.single(x, ki) == ACTUAL_OUTCOME)
        .collect();
    if candidates.is_empty() {
        return Err(CfError::Inconsistent(format!(
            "no positive-weight hidden state gives {ACTUAL_OUTCOME} for `{k}` alone"
        )));
    }

    let flips = find_context_flips(m, k, ACTUAL_OUTCOME)?;
    let sigma_set = flips
        .cell(li, PREDICTED_OUTCOME, ACTUAL_OUTCOME)
        .map(|c| c.set.clone())
        .unwrap_or_else(|| LambdaSet::empty("no flip cell"));

    let policies = [
        SpherePolicy::FixLambda,
        SpherePolicy::FixOutcome {
            setting: ki,
            value: ACTUAL_OUTCOME,
        },
    ];
    let mut summaries = Vec::new();
    let mut false_sets = Vec::new();
    let mut breach_sets = Vec::new();
    let mut complement_ok = true;
    for policy in policies {
        let mut verdicts = Vec::new();
        let mut false_lambdas = Vec::new();
        let mut breach_worlds = BTreeSet::new();
        for &x in &candidates {
            let actual = World::new(m, x, Configuration::First(ki))?;
            let sphere = accessible(&actual, policy, &worlds)?;
            let r = eval_in_sphere(m, &phi, &psi, &actual, &sphere, &worlds);
            if r.verdict == CfVerdict::False {
                false_lambdas.push(x);
            }
            verdicts.push(LambdaVerdict {
                lambda: m.lambda_label(x).to_string(),
                verdict: r.verdict,
            });
            if matches!(policy, SpherePolicy::FixOutcome { .. }) {
                let expected: Vec<usize> = sphere
                    .iter()
                    .copied()
                    .filter(|&i| m.single(worlds[i].lambda(), ki) != ACTUAL_OUTCOME)
                    .collect();
                complement_ok &= expected == r.breaches;
            }
            breach_worlds.extend(r.breaches);
        }
        let false_set = LambdaSet::new(false_lambdas, format!("{} false", policy.name()));
        let breach_set = LambdaSet::new(
            breach_worlds.iter().map(|&i| worlds[i].lambda()),
            format!("{} breaches", policy.name()),
        );
        summaries.push(PolicySummary {
            policy: policy.name(),
            verdicts,
            false_lambdas: m.labels(&false_set),
            false_measure: m.measure(&false_set),
            breaches: breach_worlds.iter().map(|&i| worlds[i].view(m)).collect(),
            breach_lambdas: m.labels(&breach_set),
            breach_measure: m.measure(&breach_set),
        });
        false_sets.push(false_set);
        breach_sets.push(breach_set);
    }
    let fix_outcome = summaries.pop().expect("two policies");
    let fix_lambda = summaries.pop().expect("two policies");
    let breach_set = breach_sets.pop().expect("two policies");
    let fix_lambda_false_set = false_sets.swap_remove(0);

    Ok(DilemmaReport {
        k: k.to_string(),
        l: l.to_string(),
        antecedent: phi.render(m),
        consequent: psi.render(m),
        sigma: m.labels(&sigma_set),
        sigma_measure: m.measure(&sigma_set),
        fix_lambda_false_equals_sigma: fix_lambda_false_set.same_members(&sigma_set),
        breaches_equal_complement: complement_ok,
        fix_lambda,
        fix_outcome,
        sigma_set,
        fix_lambda_false_set,
        breach_set,
    })
}
