use multiway_core::export::{graph_to_dot, graph_to_json};
use multiway_core::homotopy::{auto_homotopy, iterate_homotopy, Limits, PairPolicy};
use multiway_core::*;

const BASE: &str = "r: A -> AB";

fn build(system: &RuleSystem, threads: usize, shuffle_seed: Option<u64>) -> MultiwayGraph {
    let opts = EvolveOptions {
        threads,
        shuffle_seed,
        ..EvolveOptions::default()
    };
    evolve_with(&["AA".into()], system, 8, &opts).unwrap()
}

/// Everything the pipeline emits for one scheduling configuration.
fn outputs(threads: usize, shuffle_seed: Option<u64>) -> Vec<String> {
    let base = parse_rules(BASE).unwrap();
    let g = build(&base, threads, shuffle_seed);
    let auto = auto_homotopy(&g, "AA", "ABBBABBB", 6, 2).unwrap();
    let limits = Limits {
        threads,
        ..Limits::default()
    };
    let it = iterate_homotopy(
        &ExtendedSystem::new(base.clone()),
        "AA",
        "ABBBABBB",
        3,
        &limits,
        PairPolicy::All,
    )
    .unwrap();
    let g3 = build(it.system.combined(), threads, shuffle_seed);
    let inv = it.system.with_inverted_base().unwrap();
    let ginv = build(inv.combined(), threads, shuffle_seed);
    vec![
        graph_to_json(&g),
        graph_to_dot(&g),
        serde_json::to_string(&auto).unwrap(),
        it.system.to_rules_text(),
        graph_to_json(&g3),
        verify_nfold(&it.system, &g3, 3).unwrap().to_json(),
        verify_groupoid(&inv, &ginv, 3).unwrap().to_json(),
        verify_double_category(&ExtendedSystem::new(base), &g)
            .unwrap()
            .render_text(),
    ]
}

#[test]
fn thread_counts_agree() {
    let reference = outputs(1, None);
    for threads in [4, 16] {
        assert_eq!(outputs(threads, None), reference, "{threads} threads");
    }
}

#[test]
fn shuffled_work_order_agrees() {
    let reference = outputs(1, None);
    for seed in [1, 7, 42, 1234] {
        assert_eq!(outputs(1, Some(seed)), reference, "seed {seed}");
        assert_eq!(outputs(4, Some(seed)), reference, "seed {seed}, 4 threads");
    }
}

#[test]
fn repeated_runs_agree() {
    assert_eq!(outputs(4, None), outputs(4, None));
}
