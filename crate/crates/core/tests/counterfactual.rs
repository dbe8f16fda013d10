use ctxkit_core::counterfactual::{
    accessible, enumerate_worlds, epr_scenario, eval_cf, eval_in_sphere, parse_proposition, CfError, CfVerdict,
    Configuration, Proposition, SpherePolicy, World,
};
use ctxkit_core::hv::{
    find_context_flips, random_model, synthesize_model, HvModel, Observable, ObservableForm, RandomModelSpec,
    Setting,
};
use ctxkit_core::quantum::{ks_state, Party, RealDirection};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn squared(id: &str, side: Party, n: RealDirection) -> Setting {
    Setting::with_observable(id, side, Observable::new(ObservableForm::Squared, &n))
}

fn ks_model() -> HvModel {
    synthesize_model(
        &ks_state(),
        &[squared("k", Party::First, RealDirection::z())],
        &[
            squared("l", Party::Second, RealDirection::x()),
            squared("j", Party::Second, RealDirection::y()),
        ],
    )
    .unwrap()
}

/// A random atom or small combination over the model's settings.
fn random_prop(rng: &mut ChaCha8Rng, m: &HvModel, depth: u32) -> Proposition {
    let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..5) };
    match choice {
        0 | 1 => {
            let s = m.setting(rng.gen_range(0..m.settings().len()));
            if choice == 0 {
                Proposition::performs(m, s.side, &s.id).unwrap()
            } else {
                let v = s.outcomes[rng.gen_range(0..s.outcomes.len())];
                Proposition::outcome(m, s.side, &s.id, v).unwrap()
            }
        }
        2 => Proposition::Not(Box::new(random_prop(rng, m, depth - 1))),
        3 => Proposition::And(vec![random_prop(rng, m, depth - 1), random_prop(rng, m, depth - 1)]),
        _ => Proposition::Or(vec![random_prop(rng, m, depth - 1), random_prop(rng, m, depth - 1)]),
    }
}

#[test]
fn world_count_matches_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = random_model(&mut rng, &RandomModelSpec::default());
        let a = m.side_settings(Party::First).len();
        let b = m.side_settings(Party::Second).len();
        let worlds = enumerate_worlds(&m).unwrap();
        assert_eq!(worlds.len(), m.support().len() * (1 + a + b + a * b));
    }
}

#[test]
fn fix_outcome_reaches_other_hidden_states() {
    let m = ks_model();
    let worlds = enumerate_worlds(&m).unwrap();
    let k = m.setting_index("k").unwrap();
    let l = m.setting_index("l").unwrap();
    let x = (0..m.num_lambdas()).find(|&x| m.single(x, k) == 0).unwrap();
    let actual = World::new(&m, x, Configuration::First(k)).unwrap();
    let sphere = accessible(&actual, SpherePolicy::FixOutcome { setting: k, value: 0 }, &worlds).unwrap();
    assert!(sphere.iter().any(|&i| worlds[i].lambda() != x && worlds[i].config() == Configuration::Both(k, l)));
    for &i in &sphere {
        let w = &worlds[i];
        match w.record(k) {
            Some(v) => assert_eq!(v, 0),
            None => assert_eq!(w.lambda(), x),
        }
    }
    let fixed = accessible(&actual, SpherePolicy::FixLambda, &worlds).unwrap();
    assert!(fixed.iter().all(|&i| worlds[i].lambda() == x));
}

#[test]
fn vacuous_exactly_when_no_antecedent_world() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let m = random_model(&mut rng, &RandomModelSpec::default());
        let worlds = enumerate_worlds(&m).unwrap();
        let actual = worlds[rng.gen_range(0..worlds.len())].clone();
        let phi = random_prop(&mut rng, &m, 2);
        let psi = random_prop(&mut rng, &m, 2);
        let r = eval_cf(&m, &phi, &psi, &actual, SpherePolicy::FixLambda, &worlds).unwrap();
        let sphere = accessible(&actual, SpherePolicy::FixLambda, &worlds).unwrap();
        let any_phi = sphere.iter().any(|&i| phi.eval(&worlds[i]));
        assert_eq!(r.verdict == CfVerdict::Vacuous, !any_phi);
        // ψ = φ is true whenever it is not vacuous
        let same = eval_cf(&m, &phi, &phi, &actual, SpherePolicy::FixLambda, &worlds).unwrap();
        assert_eq!(same.verdict == CfVerdict::True, any_phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shrinking_the_sphere_keeps_true_true(seed in any::<u64>(), mask in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, &RandomModelSpec { max_lambdas: 4, max_settings_per_side: 2, ..Default::default() });
        let worlds = enumerate_worlds(&m).unwrap();
        let actual = worlds[rng.gen_range(0..worlds.len())].clone();
        let phi = random_prop(&mut rng, &m, 2);
        let psi = random_prop(&mut rng, &m, 2);
        let sphere: Vec<usize> = (0..worlds.len()).collect();
        let sub: Vec<usize> = sphere.iter().copied().filter(|&i| mask >> (i % 64) & 1 == 1).collect();
        let big = eval_in_sphere(&m, &phi, &psi, &actual, &sphere, &worlds);
        let small = eval_in_sphere(&m, &phi, &psi, &actual, &sub, &worlds);
        let sub_has_phi = sub.iter().any(|&i| phi.eval(&worlds[i]));
        if big.verdict == CfVerdict::True && sub_has_phi {
            prop_assert_eq!(small.verdict, CfVerdict::True);
        }
        if small.verdict == CfVerdict::False {
            prop_assert_eq!(big.verdict, CfVerdict::False);
        }
        if big.verdict == CfVerdict::Vacuous {
            prop_assert_eq!(small.verdict, CfVerdict::Vacuous);
        }
    }
}

#[test]
fn dilemma_on_the_ks_model() {
    let m = ks_model();
    let report = epr_scenario(&m, "k", "l").unwrap();
    let flips = find_context_flips(&m, "k", 0).unwrap();
    let l = m.setting_index("l").unwrap();
    let sigma = &flips.cell(l, 1, 0).unwrap().set;

    assert!(!sigma.is_empty());
    assert!(report.sigma_set.same_members(sigma));
    assert!(report.fix_lambda_false_set.same_members(sigma));
    assert!(report.fix_lambda_false_equals_sigma);
    assert!(report.fix_lambda.false_measure > 0.0);

    assert!(report.fix_outcome.verdicts.iter().all(|v| v.verdict == CfVerdict::True));
    assert!(!report.breach_set.is_empty());
    assert!(report.breaches_equal_complement);
    // every breach comes from the complement set: k alone would give 1
    let k = m.setting_index("k").unwrap();
    let complement = m.lambda_single(Party::First, "k", 1).unwrap();
    assert!(report.breach_set.is_subset(&complement));
    for &x in report.breach_set.members() {
        assert_eq!(m.single(x, k), 1);
    }
    // the flip: k alone 0 while the pair (k = 0, l = 1) also has hidden
    // states that give 1 for k alone
    let joint = m.lambda_joint("k", "l", 0, 1).unwrap();
    assert!(!joint.intersection(&m.lambda_single(Party::First, "k", 0).unwrap()).is_empty());
    assert!(!joint.intersection(&complement).is_empty());

    // JSON rendering is stable
    assert_eq!(report.to_json(), epr_scenario(&m, "k", "l").unwrap().to_json());
}

#[test]
fn local_toy_model_has_no_dilemma() {
    // joint responses copy the singles, and k = l = 0 never happens
    let m = HvModel::from_json(
        r#"{
            "lambdas": ["p", "q"],
            "weights": ["1/2", "1/2"],
            "settings": [
                {"id": "k", "side": 1, "outcomes": [1, 0]},
                {"id": "l", "side": 2, "outcomes": [1, 0]}
            ],
            "single": {"p|k": 0, "p|l": 1, "q|k": 1, "q|l": 0},
            "joint": {"p|k|l": [0, 1], "q|k|l": [1, 0]}
        }"#,
    )
    .unwrap();
    assert!(m.check_assumption_l().holds());
    let report = epr_scenario(&m, "k", "l").unwrap();
    assert!(report.sigma_set.is_empty());
    assert!(report.fix_lambda_false_set.is_empty());
    assert!(report.breach_set.is_empty());
    for v in report.fix_lambda.verdicts.iter().chain(&report.fix_outcome.verdicts) {
        assert_eq!(v.verdict, CfVerdict::True);
    }
}

#[test]
fn non_orthogonal_pair_rejected() {
    let m = synthesize_model(
        &ks_state(),
        &[squared("k", Party::First, RealDirection::z())],
        &[squared("l", Party::Second, RealDirection::normalized([1.0, 0.0, 1.0]).unwrap())],
    )
    .unwrap();
    assert!(matches!(epr_scenario(&m, "k", "l"), Err(CfError::NotOrthogonal(..))));
}

#[test]
fn parsed_propositions_evaluate_like_built_ones() {
    let m = ks_model();
    let parsed = parse_proposition("(and (performs 1 k) (performs 2 l))", &m).unwrap();
    let built = Proposition::And(vec![
        Proposition::performs(&m, Party::First, "k").unwrap(),
        Proposition::performs(&m, Party::Second, "l").unwrap(),
    ]);
    assert_eq!(parsed, built);
}
