//! Property tests tying the solvers to first-principles definitions on
//! randomized instances.

use proptest::prelude::*;

use mo_gamma_sp::bottleneck::{extend, solve_lsa_with, z_la, BottleneckCost, BottleneckLayout};
use mo_gamma_sp::dsa::{solve_general, solve_general_with, DsaOptions};
use mo_gamma_sp::gen::{generate, Family, GenSpec};
use mo_gamma_sp::label::{run_label_setting, SearchOptions, SumAlgebra};
use mo_gamma_sp::model::{
    pareto_filter, worst_case_cost, Cost, CostVector, Instance, Path,
};
use mo_gamma_sp::oracle::{enumerate_simple_paths, scenario_check, EnumerationBudget};

fn small_instance(seed: u64, family_pick: u8, gamma: usize, x: u32) -> Instance {
    let family = match family_pick % 4 {
        0 => Family::Random,
        1 => Family::PopulationStyle,
        2 => Family::Correlated,
        _ => Family::ObjectiveIndependent,
    };
    let k = family.fixed_objectives().unwrap_or(2);
    generate(&GenSpec {
        seed,
        layers: 2,
        layer_width: 3,
        extra_edges: 3,
        objectives: k,
        gamma: vec![gamma; k],
        population_uncertainty: x,
        family,
    })
    .unwrap()
}

fn budget() -> EnumerationBudget {
    EnumerationBudget::default()
}

fn some_path(instance: &Instance, pick: usize) -> Option<Path> {
    let paths = enumerate_simple_paths(
        instance.graph(),
        instance.source(),
        instance.target(),
        &budget(),
    )
    .unwrap();
    if paths.is_empty() {
        None
    } else {
        Some(paths[pick % paths.len()].clone())
    }
}

fn with_gamma(instance: &Instance, gamma: Vec<usize>) -> Instance {
    let m = instance.graph().edge_count();
    Instance::new(
        instance.graph().clone(),
        (0..m).map(|e| instance.nominal_row(e).to_vec()).collect(),
        (0..m).map(|e| instance.delta_row(e).to_vec()).collect(),
        gamma,
        instance.source(),
        instance.target(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn worst_case_monotone_in_gamma(seed in 0u64..5_000, pick in 0usize..8, x in 0u32..=100) {
        let instance = small_instance(seed, 0, 0, x);
        let Some(path) = some_path(&instance, pick) else { return Ok(()); };
        let m = instance.graph().edge_count();
        let mut previous: Option<CostVector> = None;
        for gamma in 0..=m {
            let inst = with_gamma(&instance, vec![gamma; instance.objectives()]);
            let cost = worst_case_cost(&inst, &path).unwrap();
            if let Some(prev) = previous {
                prop_assert!(prev.weakly_dominates(&cost));
            }
            previous = Some(cost);
        }
        // Gamma zero is the nominal sum; gamma >= |path| adds every delta.
        let zero = worst_case_cost(&with_gamma(&instance, vec![0; instance.objectives()]), &path).unwrap();
        let all = worst_case_cost(&with_gamma(&instance, vec![m; instance.objectives()]), &path).unwrap();
        for i in 0..instance.objectives() {
            let nominal: Cost = path.edges().iter().map(|&e| instance.nominal(e, i)).sum();
            let total_delta: Cost = path.edges().iter().map(|&e| instance.delta(e, i)).sum();
            prop_assert_eq!(zero.values()[i], nominal);
            prop_assert_eq!(all.values()[i], nominal + total_delta);
        }
    }

    #[test]
    fn worst_case_matches_explicit_scenario_enumeration(
        seed in 0u64..5_000, pick in 0usize..8, gamma in 0usize..4, x in 0u32..=100
    ) {
        let instance = small_instance(seed, 1, gamma, x);
        let Some(path) = some_path(&instance, pick) else { return Ok(()); };
        prop_assume!(path.len() <= 8);
        // A sample cap large enough to force full enumeration for |q| <= 8.
        let bound = scenario_check(&instance, &path, 1 << 16, 0).unwrap();
        prop_assert_eq!(bound, worst_case_cost(&instance, &path).unwrap());
    }

    #[test]
    fn pareto_filter_covers_every_input(
        vectors in prop::collection::vec(prop::collection::vec(0i64..6, 2), 0..24)
    ) {
        let candidates: Vec<(Path, CostVector)> = vectors
            .iter()
            .enumerate()
            .map(|(idx, v)| (Path(vec![idx]), CostVector(v.clone())))
            .collect();
        let front = pareto_filter(candidates);
        prop_assert!(front.check_invariants());
        for v in &vectors {
            let cost = CostVector(v.clone());
            prop_assert!(
                front.entries().iter().any(|(_, kept)| kept.weakly_dominates(&cost)),
                "input {:?} neither kept nor dominated", cost
            );
        }
        // Every kept vector is an input vector.
        for (_, kept) in front.entries() {
            prop_assert!(vectors.iter().any(|v| CostVector(v.clone()) == *kept));
        }
    }

    #[test]
    fn label_engine_matches_exhaustive_enumeration(seed in 0u64..5_000) {
        // Plain bicriteria sums: target labels must carry exactly the
        // non-dominated path-sum vectors.
        let instance = small_instance(seed, 0, 0, 50);
        let graph = instance.graph();
        let costs: Vec<Vec<Cost>> = (0..graph.edge_count())
            .map(|e| instance.nominal_row(e).to_vec())
            .collect();
        let algebra = SumAlgebra::new(costs.clone(), instance.objectives());
        let run = run_label_setting(
            graph,
            instance.source(),
            instance.target(),
            &algebra,
            SearchOptions::default(),
        );
        let mut engine_values: Vec<CostVector> = run.target_costs();
        engine_values.sort();

        let paths = enumerate_simple_paths(graph, instance.source(), instance.target(), &budget()).unwrap();
        let candidates: Vec<(Path, CostVector)> = paths
            .into_iter()
            .map(|p| {
                let mut total = vec![0; instance.objectives()];
                for &e in p.edges() {
                    for (t, c) in total.iter_mut().zip(&costs[e]) {
                        *t += c;
                    }
                }
                (p, CostVector(total))
            })
            .collect();
        let expected = pareto_filter(candidates);
        prop_assert_eq!(engine_values, expected.value_set());

        // Backtracked paths re-evaluate to their label costs.
        for &id in run.target_labels() {
            let path = run.backtrack(graph, id).unwrap();
            let mut total = vec![0; instance.objectives()];
            for &e in path.edges() {
                for (t, c) in total.iter_mut().zip(&costs[e]) {
                    *t += c;
                }
            }
            prop_assert_eq!(&total, run.cost(id));
        }
    }

    #[test]
    fn target_pruning_is_output_neutral(seed in 0u64..5_000, family in 0u8..4, gamma in 0usize..4) {
        let instance = small_instance(seed, family, gamma, 50);
        let pruned = solve_lsa_with(&instance, SearchOptions { prune_against_target: true });
        let unpruned = solve_lsa_with(&instance, SearchOptions { prune_against_target: false });
        prop_assert_eq!(pruned.front.value_set(), unpruned.front.value_set());
        prop_assert!(pruned.labels_created <= unpruned.labels_created);
    }

    #[test]
    fn z_la_is_order_independent(seed in 0u64..5_000, pick in 0usize..8, gamma in 0usize..4) {
        let instance = small_instance(seed, 2, gamma, 80);
        let Some(path) = some_path(&instance, pick) else { return Ok(()); };
        let forward = z_la(&instance, &path).unwrap();
        // Fold the same edge multiset in reverse; the result is the same
        // even though the reversed sequence is not a path.
        let layout = BottleneckLayout::new(&instance);
        let mut reversed = BottleneckCost::zeros(layout);
        for &e in path.edges().iter().rev() {
            reversed = extend(&reversed, &instance, e);
        }
        prop_assert_eq!(forward, reversed);
    }

    #[test]
    fn dsa_option_surface_is_value_identical(seed in 0u64..2_000, family in 0u8..4, gamma in 0usize..4) {
        let instance = small_instance(seed, family, gamma, 50);
        let reference = solve_general(&instance).front.value_set();
        for options in [
            DsaOptions { solution_checking: false, ..DsaOptions::default() },
            DsaOptions { strong_checking: true, ..DsaOptions::default() },
            DsaOptions { force_general: true, ..DsaOptions::default() },
            DsaOptions { parallel: true, ..DsaOptions::default() },
        ] {
            let report = solve_general_with(&instance, &options);
            prop_assert_eq!(report.front.value_set(), reference.clone());
            prop_assert!(report.subproblems_solved <= report.subproblems_considered);
        }
    }
}
