//! A deterministic model that reproduces every single and joint Born
//! distribution of a menu exactly.
//!
//! Each λ is a complete table with one entry per context (each setting
//! alone, each cross-side pair together); its weight is the product of the
//! Born probabilities of its entries. Marginalizing over the other contexts
//! gives back each context's Born distribution, and single and joint
//! entries are independent by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::model::{HvModel, Observable, Outcome, Setting};
use super::HvError;
use crate::quantum::{born_joint, born_single, Party, StateVector, EIGEN_CLUSTER_TOL, EXACT_TOL};

/// At most this many cross-side pairs.
pub const MAX_CONTEXT_PAIRS: usize = 6;
pub const MAX_ALPHABET: usize = 3;
/// Upper bound on the number of context tables.
pub const MAX_LAMBDAS: usize = 1_000_000;

/// Largest denominator tried when recognizing a probability as rational.
const MAX_DENOMINATOR: i64 = 1000;

fn rationalize(p: f64) -> Option<BigRational> {
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let n = (p * q as f64).round();
        ((p - n / q as f64).abs() <= EXACT_TOL).then(|| BigRational::new(BigInt::from(n as i64), BigInt::from(q)))
    })
}

fn to_outcome(value: f64, setting: &Setting) -> Result<Outcome, HvError> {
    let r = value.round();
    let o = r as Outcome;
    if (value - r).abs() > EIGEN_CLUSTER_TOL || !setting.outcomes.contains(&o) {
        return Err(HvError::NotInAlphabet {
            setting: setting.id.clone(),
            outcome: o,
        });
    }
    Ok(o)
}

fn observable(s: &Setting) -> Result<&Observable, HvError> {
    s.observable.as_ref().ok_or_else(|| HvError::NoObservable(s.id.clone()))
}

/// Born distribution of one setting measured alone, as (outcome, p).
fn single_distribution(state: &StateVector, s: &Setting) -> Result<Vec<(Outcome, f64)>, HvError> {
    born_single(state, &observable(s)?.operator()?, s.side)?
        .into_iter()
        .map(|(v, p)| Ok((to_outcome(v, s)?, p)))
        .collect()
}

/// Born distribution of `a` (side 1) and `b` (side 2) measured together.
type JointTable = Vec<((Outcome, Outcome), f64)>;

fn joint_distribution(state: &StateVector, a: &Setting, b: &Setting) -> Result<JointTable, HvError> {
    let d = born_joint(state, &observable(a)?.operator()?, &observable(b)?.operator()?)?;
    let mut out = Vec::new();
    for (i, va) in d.values_a.iter().enumerate() {
        for (j, vb) in d.values_b.iter().enumerate() {
            out.push(((to_outcome(*va, a)?, to_outcome(*vb, b)?), d.probs[i][j]));
        }
    }
    Ok(out)
}

fn check_menu(menu: &[Setting], side: Party) -> Result<(), HvError> {
    for s in menu {
        if s.side != side {
            return Err(HvError::WrongSide {
                setting: s.id.clone(),
                expected: side.index(),
                actual: s.side.index(),
            });
        }
        if s.outcomes.len() > MAX_ALPHABET {
            return Err(HvError::MenuCap(format!(
                "setting `{}` has {} outcomes (max {MAX_ALPHABET})",
                s.id,
                s.outcomes.len()
            )));
        }
        observable(s)?;
    }
    Ok(())
}

enum Entry {
    Single(Outcome),
    Joint(Outcome, Outcome),
}

struct Context {
    support: Vec<(Entry, f64, Option<BigRational>)>,
}

pub fn synthesize_model(state: &StateVector, menu_a: &[Setting], menu_b: &[Setting]) -> Result<HvModel, HvError> {
    check_menu(menu_a, Party::First)?;
    check_menu(menu_b, Party::Second)?;
    let pairs = menu_a.len() * menu_b.len();
    if pairs > MAX_CONTEXT_PAIRS {
        return Err(HvError::MenuCap(format!(
            "{} × {} = {pairs} setting pairs (max {MAX_CONTEXT_PAIRS})",
            menu_a.len(),
            menu_b.len()
        )));
    }
    let settings: Vec<Setting> = menu_a.iter().chain(menu_b).cloned().collect();
    {
        let mut ids: Vec<&str> = settings.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(HvError::Invalid(vec![super::Defect {
                kind: super::DefectKind::Setting,
                message: format!("duplicate setting id `{}`", w[0]),
            }]));
        }
    }

    let keep = |p: f64| p > EXACT_TOL;
    let mut contexts = Vec::new();
    for s in &settings {
        let support = single_distribution(state, s)?
            .into_iter()
            .filter(|&(_, p)| keep(p))
            .map(|(o, p)| (Entry::Single(o), p, rationalize(p)))
            .collect();
        contexts.push(Context { support });
    }
    for a in menu_a {
        for b in menu_b {
            let support = joint_distribution(state, a, b)?
                .into_iter()
                .filter(|&(_, p)| keep(p))
                .map(|((x, y), p)| (Entry::Joint(x, y), p, rationalize(p)))
                .collect();
            contexts.push(Context { support });
        }
    }

    let count = contexts
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.support.len()))
        .filter(|&n| n <= MAX_LAMBDAS)
        .ok_or_else(|| HvError::MenuCap(format!("more than {MAX_LAMBDAS} context tables")))?;
    // exact only if every context's recognized fractions sum to exactly 1
    let exact_ok = contexts.iter().all(|c| {
        c.support
            .iter()
            .map(|e| e.2.clone())
            .sum::<Option<BigRational>>()
            .is_some_and(|t| t.is_one())
    });

    let n_single = settings.len();
    let width = (count.max(2) - 1).to_string().len();
    let mut lambdas = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut exact = exact_ok.then(|| Vec::with_capacity(count));
    let mut single = Vec::with_capacity(count);
    let mut joint = Vec::with_capacity(count);
    let mut digits = vec![0usize; contexts.len()];
    for t in 0..count {
        let mut w = 1.0;
        let mut wx = BigRational::one();
        let mut row_s = Vec::with_capacity(n_single);
        let mut row_j = Vec::with_capacity(pairs);
        for (c, &d) in contexts.iter().zip(&digits) {
            let (entry, p, px) = &c.support[d];
            w *= p;
            if exact_ok {
                wx *= px.as_ref().expect("checked");
            }
            match entry {
                Entry::Single(o) => row_s.push(*o),
                Entry::Joint(x, y) => row_j.push((*x, *y)),
            }
        }
        lambdas.push(format!("t{t:0width$}"));
        if let Some(e) = exact.as_mut() {
            weights.push(wx.to_f64().unwrap_or(w));
            e.push(wx);
        } else {
            weights.push(w);
        }
        single.push(row_s);
        joint.push(row_j);
        // mixed-radix increment, last context fastest
        for (i, c) in contexts.iter().enumerate().rev() {
            digits[i] += 1;
            if digits[i] < c.support.len() {
                break;
            }
            digits[i] = 0;
        }
    }
    Ok(HvModel::from_parts(lambdas, weights, exact, settings, single, joint))
}

/// Largest |model probability − Born probability| over every context and
/// every outcome of the menu.
pub fn faithfulness_deviation(m: &HvModel, state: &StateVector) -> Result<f64, HvError> {
    let mut worst: f64 = 0.0;
    for s in 0..m.settings().len() {
        for (o, p) in single_distribution(state, m.setting(s))? {
            worst = worst.max((m.measure(&m.single_set(s, o)) - p).abs());
        }
    }
    for (a, b) in m.pairs() {
        for ((x, y), p) in joint_distribution(state, m.setting(a), m.setting(b))? {
            worst = worst.max((m.measure(&m.joint_set(a, b, x, y)) - p).abs());
        }
    }
    Ok(worst)
}

/// Born correlation `Σ p(x,y)·x·y` of two observables on a pair.
pub fn born_correlation(state: &StateVector, a: &Observable, b: &Observable) -> Result<f64, HvError> {
    Ok(born_joint(state, &a.operator()?, &b.operator()?)?.correlation())
}

/// `E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)` from the Born rule.
pub fn quantum_chsh(
    state: &StateVector,
    a: &Observable,
    a2: &Observable,
    b: &Observable,
    b2: &Observable,
) -> Result<f64, HvError> {
    Ok(born_correlation(state, a, b)? + born_correlation(state, a, b2)? + born_correlation(state, a2, b)?
        - born_correlation(state, a2, b2)?)
}
