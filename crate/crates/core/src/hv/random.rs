//! Random finite models for property testing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use super::model::{HvModel, Outcome, Setting};
use crate::quantum::Party;

#[derive(Clone, Debug)]
pub struct RandomModelSpec {
    pub max_lambdas: usize,
    pub max_settings_per_side: usize,
    /// Only ±1 alphabets; otherwise each setting picks ±1 or {1, 0, −1}.
    pub binary_only: bool,
    /// Joint responses copy the single responses (the model satisfies
    /// assumption L). Otherwise each joint component agrees with the
    /// single response only with probability 1/2.
    pub local: bool,
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        RandomModelSpec {
            max_lambdas: 6,
            max_settings_per_side: 3,
            binary_only: false,
            local: false,
        }
    }
}

/// A model with exact rational weights (some possibly zero).
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, spec: &RandomModelSpec) -> HvModel {
    let n = rng.gen_range(1..=spec.max_lambdas.max(1));
    let mut settings = Vec::new();
    for side in [Party::First, Party::Second] {
        let count = rng.gen_range(1..=spec.max_settings_per_side.max(1));
        for i in 0..count {
            let outcomes = if spec.binary_only || rng.gen_bool(0.5) {
                vec![1, -1]
            } else {
                vec![1, 0, -1]
            };
            let prefix = if side == Party::First { "a" } else { "b" };
            settings.push(Setting::abstract_setting(&format!("{prefix}{i}"), side, outcomes));
        }
    }

    let mut raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = raw.iter().sum();
    let exact: Vec<BigRational> = raw
        .iter()
        .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    let weights = exact.iter().map(|r| r.to_f64().expect("finite")).collect();

    let pick = |rng: &mut R, s: &Setting| -> Outcome { s.outcomes[rng.gen_range(0..s.outcomes.len())] };
    let mut single = Vec::with_capacity(n);
    let mut joint = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<Outcome> = settings.iter().map(|s| pick(rng, s)).collect();
        let mut jrow = Vec::new();
        let idx = |p: Party| -> Vec<usize> { (0..settings.len()).filter(|&i| settings[i].side == p).collect() };
        for a in idx(Party::First) {
            for b in idx(Party::Second) {
                let mut comp = |s: usize| {
                    if spec.local || rng.gen_bool(0.5) {
                        row[s]
                    } else {
                        pick(rng, &settings[s])
                    }
                };
                let x = comp(a);
                let y = comp(b);
                jrow.push((x, y));
            }
        }
        single.push(row);
        joint.push(jrow);
    }
    let lambdas = (0..n).map(|i| format!("l{i}")).collect();
    HvModel::from_parts(lambdas, weights, Some(exact), settings, single, joint)
}
