//! Brute-force ground truth: exhaustive simple-path enumeration with exact
//! worst-case evaluation. Intended for small instances only; both solvers are
//! validated against the front this module produces.

use thiserror::Error;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::model::{
    pareto_filter, worst_case_cost_unchecked, Cost, CostVector, EdgeId, Front, Graph, Instance,
    ModelError, NodeId, Path,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded: more than {max_paths} simple paths")]
    TooManyPaths { max_paths: usize },
    #[error("enumeration budget exceeded: graph has {nodes} nodes, cap is {max_nodes}")]
    TooManyNodes { nodes: usize, max_nodes: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Caps for exhaustive enumeration. Exceeding a cap is a hard error, never a
/// silently truncated result.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationBudget {
    pub max_paths: usize,
    pub max_nodes: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_paths: 200_000,
            max_nodes: 16,
        }
    }
}

/// All simple paths from `source` to `target`, by depth-first search with
/// on-path node marking. Deterministic: edges are explored in edge-id order.
pub fn enumerate_simple_paths(
    graph: &Graph,
    source: NodeId,
    target: NodeId,
    budget: &EnumerationBudget,
) -> Result<Vec<Path>, OracleError> {
    if graph.node_count() > budget.max_nodes {
        return Err(OracleError::TooManyNodes {
            nodes: graph.node_count(),
            max_nodes: budget.max_nodes,
        });
    }
    let mut paths = Vec::new();
    let mut on_path = vec![false; graph.node_count()];
    let mut stack: Vec<EdgeId> = Vec::new();
    on_path[source] = true;
    dfs(graph, source, target, budget, &mut on_path, &mut stack, &mut paths)?;
    Ok(paths)
}

fn dfs(
    graph: &Graph,
    at: NodeId,
    target: NodeId,
    budget: &EnumerationBudget,
    on_path: &mut Vec<bool>,
    stack: &mut Vec<EdgeId>,
    paths: &mut Vec<Path>,
) -> Result<(), OracleError> {
    if at == target {
        if paths.len() >= budget.max_paths {
            return Err(OracleError::TooManyPaths {
                max_paths: budget.max_paths,
            });
        }
        paths.push(Path(stack.clone()));
        return Ok(());
    }
    for &edge in graph.out_edges(at) {
        let head = graph.head(edge);
        if on_path[head] {
            continue;
        }
        on_path[head] = true;
        stack.push(edge);
        dfs(graph, head, target, budget, on_path, stack, paths)?;
        stack.pop();
        on_path[head] = false;
    }
    Ok(())
}

/// The reference robust-efficient front: every simple source-target path is
/// evaluated with the exact worst-case cost and the non-dominated values are
/// kept.
pub fn oracle_front(instance: &Instance, budget: &EnumerationBudget) -> Result<Front, OracleError> {
    let paths = enumerate_simple_paths(
        instance.graph(),
        instance.source(),
        instance.target(),
        budget,
    )?;
    let candidates = paths
        .into_iter()
        .map(|p| {
            let cost = worst_case_cost_unchecked(instance, &p);
            (p, cost)
        })
        .collect();
    Ok(pareto_filter(candidates))
}

/// Evaluates explicit deviation scenarios for `path` and returns the
/// componentwise maximum found.
///
/// Per objective, a scenario picks a subset of at most `gamma[i]` path edges
/// to deviate to their maximum cost. When the number of subsets is at most
/// `samples` they are all enumerated and the result equals the exact worst
/// case; otherwise `samples` random subsets are drawn (seeded, deterministic)
/// and the result is a lower bound on it.
pub fn scenario_check(
    instance: &Instance,
    path: &Path,
    samples: usize,
    seed: u64,
) -> Result<CostVector, ModelError> {
    path.validate(instance)?;
    let n = path.len();
    let mut out = Vec::with_capacity(instance.objectives());
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..instance.objectives() {
        let base: Cost = path.edges().iter().map(|&e| instance.nominal(e, i)).sum();
        let deltas: Vec<Cost> = path.edges().iter().map(|&e| instance.delta(e, i)).collect();
        let gamma = instance.gamma()[i].min(n);
        let total = count_subsets_up_to(n, gamma);
        let mut best: Cost = 0;
        if total.map(|t| t <= samples as u128).unwrap_or(false) {
            enumerate_deviations(&deltas, gamma, 0, 0, &mut best);
        } else {
            for _ in 0..samples {
                let size = rng.gen_range(0..=gamma);
                let mut sum = 0;
                let mut picked = vec![false; n];
                for _ in 0..size {
                    loop {
                        let j = rng.gen_range(0..n);
                        if !picked[j] {
                            picked[j] = true;
                            sum += deltas[j];
                            break;
                        }
                    }
                }
                best = best.max(sum);
            }
        }
        out.push(base + best);
    }
    Ok(CostVector(out))
}

/// Number of subsets of size at most `k` from `n` elements, or `None` on
/// overflow.
fn count_subsets_up_to(n: usize, k: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=k.min(n) {
        if j > 0 {
            binom = binom.checked_mul((n - j + 1) as u128)? / j as u128;
        }
        total = total.checked_add(binom)?;
    }
    Some(total)
}

fn enumerate_deviations(deltas: &[Cost], remaining: usize, from: usize, sum: Cost, best: &mut Cost) {
    *best = (*best).max(sum);
    if remaining == 0 {
        return;
    }
    for j in from..deltas.len() {
        enumerate_deviations(deltas, remaining - 1, j + 1, sum + deltas[j], best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{worst_case_cost, Graph, Instance};

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    #[test]
    fn single_edge_graph_has_one_path() {
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        let paths = enumerate_simple_paths(&graph, 0, 1, &budget()).unwrap();
        assert_eq!(paths, vec![Path(vec![0])]);
    }

    #[test]
    fn two_disjoint_routes_give_two_paths() {
        let graph = Graph::new(
            6,
            vec![(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)],
        )
        .unwrap();
        let paths = enumerate_simple_paths(&graph, 0, 5, &budget()).unwrap();
        assert_eq!(paths.len(), 2);
    }

    #[test]
    fn complete_digraph_path_count_matches_formula() {
        // In a complete digraph on n nodes the number of simple s-t paths is
        // sum over r of (n-2)!/(n-2-r)! intermediate arrangements.
        let n = 5;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::new(n, edges).unwrap();
        let paths = enumerate_simple_paths(&graph, 0, n - 1, &budget()).unwrap();
        let mut expected = 0usize;
        let mut arrangements = 1usize;
        expected += arrangements; // direct edge
        for r in 1..=n - 2 {
            arrangements *= n - 1 - r;
            expected += arrangements;
        }
        assert_eq!(paths.len(), expected);
    }

    #[test]
    fn budget_refuses_instead_of_truncating() {
        let n = 9;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::new(n, edges).unwrap();
        let tight = EnumerationBudget {
            max_paths: 10,
            max_nodes: 16,
        };
        assert!(matches!(
            enumerate_simple_paths(&graph, 0, n - 1, &tight),
            Err(OracleError::TooManyPaths { .. })
        ));
        let node_cap = EnumerationBudget {
            max_paths: 1_000_000,
            max_nodes: 4,
        };
        assert!(matches!(
            enumerate_simple_paths(&graph, 0, n - 1, &node_cap),
            Err(OracleError::TooManyNodes { .. })
        ));
    }

    #[test]
    fn oracle_front_two_disjoint_paths_gamma_two() {
        let instance = crate::model::tests::two_disjoint_paths(2);
        let front = oracle_front(&instance, &budget()).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front.entries()[0].1, CostVector(vec![2]));
        assert_eq!(front.entries()[0].0, Path(vec![3, 4, 5]));
    }

    #[test]
    fn oracle_front_invariant_under_edge_permutation() {
        // Same instance with the edge list permuted must give the same
        // value set.
        let graph_a = Graph::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let instance_a = Instance::new(
            graph_a,
            vec![vec![1, 2], vec![2, 1], vec![3, 0], vec![0, 3]],
            vec![vec![2, 0], vec![0, 2], vec![1, 1], vec![1, 1]],
            vec![1, 1],
            0,
            3,
        )
        .unwrap();
        let graph_b = Graph::new(4, vec![(2, 3), (0, 2), (1, 3), (0, 1)]).unwrap();
        let instance_b = Instance::new(
            graph_b,
            vec![vec![0, 3], vec![3, 0], vec![2, 1], vec![1, 2]],
            vec![vec![1, 1], vec![1, 1], vec![0, 2], vec![2, 0]],
            vec![1, 1],
            0,
            3,
        )
        .unwrap();
        let front_a = oracle_front(&instance_a, &budget()).unwrap();
        let front_b = oracle_front(&instance_b, &budget()).unwrap();
        assert_eq!(front_a.value_set(), front_b.value_set());
    }

    #[test]
    fn scenario_check_gamma_zero_is_nominal() {
        let instance = crate::model::tests::two_disjoint_paths(0);
        let path = Path(vec![0, 1, 2]);
        let bound = scenario_check(&instance, &path, 100, 7).unwrap();
        assert_eq!(bound, CostVector(vec![3]));
    }

    #[test]
    fn scenario_check_full_enumeration_attains_worst_case() {
        let graph = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let instance = Instance::new(
            graph,
            vec![vec![0], vec![0], vec![0]],
            vec![vec![5], vec![3], vec![1]],
            vec![2],
            0,
            3,
        )
        .unwrap();
        let path = Path(vec![0, 1, 2]);
        let bound = scenario_check(&instance, &path, 1000, 7).unwrap();
        assert_eq!(bound, CostVector(vec![8]));
        assert_eq!(bound, worst_case_cost(&instance, &path).unwrap());
    }

    #[test]
    fn sampled_scenarios_never_exceed_worst_case() {
        let n = 12;
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|u| (u, u + 1)).collect();
        let graph = Graph::new(n, edges).unwrap();
        let nominal: Vec<Vec<Cost>> = (0..n - 1).map(|e| vec![(e as Cost) % 7]).collect();
        let delta: Vec<Vec<Cost>> = (0..n - 1).map(|e| vec![(3 * e as Cost) % 11]).collect();
        let instance = Instance::new(graph, nominal, delta, vec![4], 0, n - 1).unwrap();
        let path = Path((0..n - 1).collect());
        let exact = worst_case_cost(&instance, &path).unwrap();
        for seed in 0..5 {
            let bound = scenario_check(&instance, &path, 50, seed).unwrap();
            assert!(bound.weakly_dominates(&exact), "{bound} vs {exact}");
        }
    }
}
