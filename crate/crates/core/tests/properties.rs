mod common;

use common::props::{violations, witness_replays, Case};
use common::{strings, RED, YELLOW};
use multiway_core::homotopy::{iterate_homotopy, HomotopySpec, Limits, PairPolicy};
use multiway_core::*;
use proptest::prelude::*;

fn word(letters: Vec<char>, min: usize, max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(letters), min..=max).prop_map(String::from_iter)
}

fn small_case(min_rhs: usize) -> impl Strategy<Value = Case> {
    (1usize..=3)
        .prop_flat_map(move |k| {
            let letters: Vec<char> = "ABC".chars().take(k).collect();
            (
                prop::collection::vec((word(letters.clone(), 1, 2), word(letters.clone(), min_rhs, 3)), 1..=3),
                prop::collection::vec(word(letters, 1, 4), 1..=2),
                0usize..=4,
            )
        })
        .prop_map(|(rules, initial, generations)| Case {
            rules: rules
                .into_iter()
                .enumerate()
                .map(|(i, (l, r))| (format!("r{i}"), l, r, 0))
                .collect(),
            initial,
            generations,
        })
}

fn system_of(case: &Case) -> RuleSystem {
    RuleSystem::new(
        case.rules
            .iter()
            .map(|(id, l, r, _)| Rule::new(id.as_str(), l.as_str(), r.as_str()))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn small_systems_have_no_violations(case in small_case(0)) {
        prop_assert_eq!(violations(&case), [0; 5]);
    }

    #[test]
    fn inverted_systems_are_groupoids(case in small_case(1)) {
        let inv = invert_system(&system_of(&case)).unwrap();
        let g = evolve(&case.initial, &inv, case.generations).unwrap();
        let report = verify_groupoid(&ExtendedSystem::new(inv), &g, 1).unwrap();
        prop_assert_eq!(report.groupoid, Some(true));
        let expanded: Vec<&str> = g
            .nodes()
            .iter()
            .filter(|n| g.is_expanded(n.id))
            .map(|n| n.string.as_str())
            .collect();
        for a in &expanded {
            for b in &expanded {
                prop_assert_eq!(reachable(&g, a, b).unwrap(), reachable(&g, b, a).unwrap());
            }
        }
    }

    #[test]
    fn inversion_is_idempotent(case in small_case(1)) {
        let sys = system_of(&case);
        let once = invert_system(&sys).unwrap();
        prop_assert_eq!(once.len(), 2 * sys.len());
        prop_assert_eq!(invert_system(&once).unwrap(), once);
    }
}

#[test]
fn every_rung_deletion_yields_a_replayable_witness() {
    let spec = HomotopySpec::from_states(2, strings(&RED), strings(&YELLOW)).unwrap();
    let es = extend_system(&ExtendedSystem::new(parse_rules("r: A -> AB").unwrap()), &spec).unwrap();
    for rung in &spec.rungs {
        let broken = es.without_rule(&rung.id).unwrap();
        let g = evolve(&["AA".into()], broken.combined(), 8).unwrap();
        let report = verify_double_category(&broken, &g).unwrap();
        assert!(!report.passed, "deleting {} went unnoticed", rung.id);
        let w = report.first_witness().expect("failure carries a witness");
        assert!(w.missing_arrows().any(|a| a.src == rung.lhs && a.dst == rung.rhs));
        assert!(witness_replays(&g, w));
    }
}

#[test]
fn groupoid_witness_replays() {
    let base = parse_rules("A -> AB").unwrap();
    let g = evolve(&["AA".into()], &base, 8).unwrap();
    let report = verify_groupoid(&ExtendedSystem::new(base), &g, 1).unwrap();
    let w = report.first_witness().unwrap();
    assert_eq!(w.corners, strings(&["AA", "AAB"]));
    assert!(witness_replays(&g, w));
}

#[test]
fn verification_is_monotone_in_order() {
    let es = ExtendedSystem::new(parse_rules("A -> AB").unwrap());
    let it = iterate_homotopy(&es, "AA", "ABBBABBB", 4, &Limits::default(), PairPolicy::All).unwrap();
    let g = evolve(&["AA".into()], it.system.combined(), 8).unwrap();
    for n in 2..=4 {
        assert!(verify_nfold(&it.system, &g, n).unwrap().passed, "order {n}");
    }
}
