use ctxkit_core::hv::{
    faithfulness_deviation, find_context_flips, quantum_chsh, random_model, synthesize_model, HvModel, LambdaSet,
    Observable, ObservableForm, RandomModelSpec, Setting,
};
use ctxkit_core::quantum::{
    born_joint, born_single, ks_state, pauli_along, singlet_state, Party, RealDirection, EXACT_TOL,
};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODELS: usize = 500;

fn models(local: bool, binary_only: bool, seed: u64) -> impl Iterator<Item = HvModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomModelSpec {
        local,
        binary_only,
        ..RandomModelSpec::default()
    };
    (0..MODELS).map(move |_| random_model(&mut rng, &spec))
}

fn ids(m: &HvModel, side: Party) -> Vec<String> {
    m.side_settings(side).iter().map(|&s| m.setting(s).id.clone()).collect()
}

fn exact_sum(m: &HvModel, pred: impl Fn(usize) -> bool) -> BigRational {
    (0..m.num_lambdas())
        .filter(|&l| pred(l))
        .map(|l| m.exact_weight(l).unwrap().clone())
        .fold(BigRational::zero(), |acc, w| acc + w)
}

/// Largest |CHSH| over the 16 deterministic local strategies
/// (a, a′, b, b′) ∈ {±1}⁴.
fn local_strategy_bound() -> i32 {
    let mut best = 0;
    for bits in 0..16u32 {
        let v = |i: u32| if bits >> i & 1 == 0 { 1 } else { -1 };
        let (a, a2, b, b2) = (v(0), v(1), v(2), v(3));
        best = best.max((a * b + a * b2 + a2 * b - a2 * b2).abs());
    }
    best
}

#[test]
fn strategy_oracle_gives_two() {
    assert_eq!(local_strategy_bound(), 2);
}

#[test]
fn partition_laws_on_random_models() {
    for m in models(false, false, 1) {
        assert_eq!(m.check_partition(), None);
        let all = m.all_lambdas();
        for s in m.settings() {
            let mut union = LambdaSet::empty("union");
            for (i, &o) in s.outcomes.iter().enumerate() {
                let set = m.lambda_single(s.side, &s.id, o).unwrap();
                for &o2 in &s.outcomes[i + 1..] {
                    assert!(set.intersection(&m.lambda_single(s.side, &s.id, o2).unwrap()).is_empty());
                }
                union = union.union(&set);
            }
            assert!(union.same_members(&all));
        }
        for a in ids(&m, Party::First) {
            for b in ids(&m, Party::Second) {
                let sa = &m.setting(m.setting_index(&a).unwrap()).outcomes;
                let sb = &m.setting(m.setting_index(&b).unwrap()).outcomes;
                let mut union = LambdaSet::empty("union");
                let mut total = 0;
                for &i in sa {
                    for &j in sb {
                        let cell = m.lambda_joint(&a, &b, i, j).unwrap();
                        // measure equals the indicator-weighted sum, exactly
                        let ai = m.setting_index(&a).unwrap();
                        let bi = m.setting_index(&b).unwrap();
                        assert_eq!(
                            m.measure_exact(&cell).unwrap(),
                            exact_sum(&m, |l| m.joint(l, ai, bi) == (i, j))
                        );
                        total += cell.len();
                        union = union.union(&cell);
                    }
                }
                assert_eq!(total, m.num_lambdas(), "cells overlap");
                assert!(union.same_members(&all));
            }
        }
        assert_eq!(m.measure_exact(&all).unwrap(), BigRational::from_integer(1.into()));
    }
}

#[test]
fn local_models_satisfy_the_whole_chain() {
    let bound = BigRational::from_integer(local_strategy_bound().into());
    for m in models(true, true, 2) {
        assert!(m.check_assumption_l().holds());
        assert!(m.check_product_identity().is_none());
        assert!(m.check_bell_factorization().holds());
        assert!(m.check_parameter_independence().holds());
        let (a_ids, b_ids) = (ids(&m, Party::First), ids(&m, Party::Second));
        for a in &a_ids {
            for a2 in &a_ids {
                for b in &b_ids {
                    for b2 in &b_ids {
                        let c = m.chsh_exact(a, a2, b, b2).unwrap().unwrap();
                        assert!(c.abs() <= bound, "{a} {a2} {b} {b2}: {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn each_implication_of_the_chain_separately() {
    // On arbitrary models: L ⇒ product identity ⇒ factorization.
    for m in models(false, false, 3) {
        if m.check_assumption_l().holds() {
            assert!(m.check_product_identity().is_none());
        }
        if m.check_product_identity().is_none() {
            assert!(m.check_bell_factorization().holds());
        }
    }
}

#[test]
fn outcome_independence_always_and_decomposition_never_falsified() {
    for (i, m) in models(false, false, 4).enumerate() {
        assert!(m.check_outcome_independence().holds(), "model {i}");
        let d = m.check_decomposition();
        assert_eq!(d.counterexample, None, "model {i}");
        assert!(d.checked > 0);
        // with OI holding, factorization fails exactly where PI does
        let bell = m.check_bell_factorization();
        let pi = m.check_parameter_independence();
        assert!(bell.set.same_members(&pi.set), "model {i}");
    }
}

#[test]
fn bell_factorizing_models_respect_chsh() {
    let bound = BigRational::from_integer(2.into());
    for m in models(false, true, 5) {
        if !m.check_bell_factorization().holds() {
            continue;
        }
        let (a_ids, b_ids) = (ids(&m, Party::First), ids(&m, Party::Second));
        for a in &a_ids {
            for a2 in &a_ids {
                for b in &b_ids {
                    for b2 in &b_ids {
                        assert!(m.chsh_exact(a, a2, b, b2).unwrap().unwrap().abs() <= bound);
                    }
                }
            }
        }
    }
}

#[test]
fn flip_witnesses_reverify() {
    for m in models(false, false, 6) {
        let report = m.check_assumption_l();
        for w in &report.flips.witnesses {
            assert!(w.verify(&m));
            assert!(report.flips.sigma.contains(w.lambda));
        }
        for s in m.settings() {
            for &o in &s.outcomes {
                let flips = find_context_flips(&m, &s.id, o).unwrap();
                for w in &flips.report.witnesses {
                    assert!(w.verify(&m));
                }
                assert!(flips.report.sigma.is_subset(&report.flips.sigma));
            }
        }
    }
}

fn pauli(id: &str, side: Party, n: RealDirection) -> Setting {
    Setting::with_observable(id, side, Observable::new(ObservableForm::Pauli, &n))
}

fn squared(id: &str, side: Party, n: RealDirection) -> Setting {
    Setting::with_observable(id, side, Observable::new(ObservableForm::Squared, &n))
}

#[test]
fn singlet_model_is_faithful_and_flips_half_the_time() {
    let z = RealDirection::z();
    let psi = singlet_state();
    let m = synthesize_model(&psi, &[pauli("a", Party::First, z)], &[pauli("b", Party::Second, z)]).unwrap();
    assert!(faithfulness_deviation(&m, &psi).unwrap() <= 1e-12);

    // Direct probability computation: the single and joint contexts are
    // independent, so P(flip on a wing) = Σ_o p_single(o)·(1 − p_joint(o)).
    let op = pauli_along(&z);
    let joint = born_joint(&psi, &op, &op).unwrap();
    let expect = |single: Vec<(f64, f64)>, marginal: Vec<f64>| -> f64 {
        single.iter().zip(marginal).map(|((_, p), q)| p * (1.0 - q)).sum()
    };
    let side1 = expect(born_single(&psi, &op, Party::First).unwrap(), joint.marginal_a());
    let side2 = expect(born_single(&psi, &op, Party::Second).unwrap(), joint.marginal_b());
    assert!((side1 - 0.5).abs() <= EXACT_TOL && (side2 - 0.5).abs() <= EXACT_TOL);

    let l = m.check_assumption_l();
    assert!(!l.holds());
    assert!((l.per_side[0] - side1).abs() <= 1e-12);
    assert!((l.per_side[1] - side2).abs() <= 1e-12);
    let pi = m.check_parameter_independence();
    assert!(!pi.holds());
    assert!((pi.per_side[0] - side1).abs() <= 1e-12);
    assert!((pi.per_side[1] - side2).abs() <= 1e-12);
    assert!(m.check_outcome_independence().holds());
    assert!(m.check_bell_factorization().measure > 0.0);
    assert_eq!(m.correlation("a", "b").unwrap(), -1.0);
}

#[test]
fn singlet_chsh_model_matches_quantum_value() {
    let psi = singlet_state();
    let d = RealDirection::in_xz_plane;
    let (a, a2, b, b2) = (d(90.0), d(0.0), d(45.0), d(135.0));
    let m = synthesize_model(
        &psi,
        &[pauli("a", Party::First, a), pauli("a2", Party::First, a2)],
        &[pauli("b", Party::Second, b), pauli("b2", Party::Second, b2)],
    )
    .unwrap();
    assert!(faithfulness_deviation(&m, &psi).unwrap() <= 1e-12);
    let obs = |n: RealDirection| Observable::new(ObservableForm::Pauli, &n);
    let q = quantum_chsh(&psi, &obs(a), &obs(a2), &obs(b), &obs(b2)).unwrap();
    assert!((q.abs() - 2.0 * 2f64.sqrt()).abs() <= 1e-12);
    // a faithful model has to carry the quantum value, hence cannot factorize
    assert!((m.chsh("a", "a2", "b", "b2").unwrap() - q).abs() <= 1e-12);
    assert!(!m.check_bell_factorization().holds());
}

#[test]
fn ks_model_has_positive_flip_measure() {
    let psi = ks_state();
    let m = synthesize_model(
        &psi,
        &[squared("k", Party::First, RealDirection::z())],
        &[
            squared("i", Party::Second, RealDirection::x()),
            squared("j", Party::Second, RealDirection::y()),
        ],
    )
    .unwrap();
    assert!(faithfulness_deviation(&m, &psi).unwrap() <= 1e-12);
    let flips = find_context_flips(&m, "k", 0).unwrap();
    assert!(flips.report.measure > 0.0);
    for w in &flips.report.witnesses {
        assert!(w.verify(&m));
        assert_eq!((w.single, w.joint.0), (0, 1));
    }
    // P(k = 0 alone) · P(k = 1, i = 0 jointly) = 1/3 · 1/3
    let i = m.setting_index("i").unwrap();
    let cell = flips.cell(i, 1, 0).unwrap();
    let exact = m.measure_exact(&cell.set).unwrap();
    assert_eq!(exact, BigRational::new(1.into(), 9.into()));
    assert!(!flips.cell(i, 1, 1).unwrap().set.is_empty());
    // outcome pair (0, 0) never occurs on orthogonal directions
    assert!(m.lambda_joint("k", "i", 0, 0).unwrap().is_empty());
}

#[test]
fn local_model_has_no_flips() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = RandomModelSpec {
        local: true,
        ..RandomModelSpec::default()
    };
    for _ in 0..50 {
        let m = random_model(&mut rng, &spec);
        for s in m.settings() {
            for &o in &s.outcomes {
                assert!(find_context_flips(&m, &s.id, o).unwrap().report.sigma.is_empty());
            }
        }
    }
}

#[test]
fn model_file_round_trip() {
    for m in models(false, false, 8).take(50) {
        let back = HvModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_json(), m.to_json());
    }
}
