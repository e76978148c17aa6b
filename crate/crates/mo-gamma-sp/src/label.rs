//! Generic multi-objective label-setting engine.
//!
//! The engine explores labels `(cost, predecessor node, predecessor label)`
//! and is parameterized by a [`CostAlgebra`] that defines how a label cost is
//! extended along an edge and how it is aggregated to the scalar used for
//! selection. With a plain vector-sum algebra this is Martins' label-setting
//! algorithm with aggregate-cost selection; the bottleneck solver plugs in a
//! different extension operator.
//!
//! Deviations from the textbook algorithm, both load-bearing:
//! * a newly created label is deleted when its cost is dominated by **or
//!   equal to** the cost of any label at the same node, which is what makes
//!   the output a complete set (one representative per value) and keeps the
//!   search safe in the presence of zero-cost cycles;
//! * labels are selected by smallest aggregate cost instead of
//!   lexicographic order.

use thiserror::Error;

use crate::model::{Cost, CostVector, EdgeId, Graph, NodeId, Path};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("label {0} is not a permanent target label")]
    NotATargetLabel(usize),
    #[error("dangling predecessor reference in label {0}")]
    DanglingPredecessor(usize),
}

/// Cost structure driving the search.
///
/// `extend` must be monotone: extending a cost along an edge never decreases
/// any component. This holds for vector sums with non-negative edge costs and
/// for the sorted-insertion operator of the bottleneck solver.
pub trait CostAlgebra {
    fn dimension(&self) -> usize;
    /// Cost of a label at `head(edge)` created from a label with `cost`.
    fn extend(&self, cost: &[Cost], edge: EdgeId) -> Vec<Cost>;
    /// Scalar selection key; must be strictly increasing in every component.
    fn aggregate(&self, cost: &[Cost]) -> Cost;
}

/// Vector addition of fixed per-edge cost vectors.
pub struct SumAlgebra {
    /// `costs[edge][objective]`, all non-negative.
    costs: Vec<Vec<Cost>>,
    dimension: usize,
}

impl SumAlgebra {
    pub fn new(costs: Vec<Vec<Cost>>, dimension: usize) -> Self {
        debug_assert!(costs.iter().all(|c| c.len() == dimension));
        SumAlgebra { costs, dimension }
    }

    pub fn edge_cost(&self, edge: EdgeId) -> &[Cost] {
        &self.costs[edge]
    }
}

impl CostAlgebra for SumAlgebra {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn extend(&self, cost: &[Cost], edge: EdgeId) -> Vec<Cost> {
        cost.iter()
            .zip(&self.costs[edge])
            .map(|(a, b)| a + b)
            .collect()
    }

    fn aggregate(&self, cost: &[Cost]) -> Cost {
        cost.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelState {
    Temporary,
    Permanent,
    Deleted,
}

/// A label at `node` representing a path from the source whose last edge is
/// `(pred_node, node)`. The source label has no predecessor.
#[derive(Debug, Clone)]
pub struct Label {
    pub cost: Vec<Cost>,
    pub node: NodeId,
    pub pred_node: Option<NodeId>,
    pub pred_label: Option<usize>,
    pub state: LabelState,
}

/// Engine switches. `prune_against_target` enables deleting new labels at
/// any node when an existing target label weakly dominates them; the output
/// set is unchanged, only the label counts drop.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub prune_against_target: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune_against_target: true,
        }
    }
}

/// Result of one label-setting run. Labels are stored append-only with
/// stable indices so predecessor references stay valid; deletion is a state
/// flag.
pub struct LabelRun {
    labels: Vec<Label>,
    target_labels: Vec<usize>,
    permanent_order: Vec<usize>,
    pub labels_created: usize,
    pub labels_permanent: usize,
}

impl LabelRun {
    /// Permanent labels at the target, in the order they were made
    /// permanent (non-decreasing aggregate cost).
    pub fn target_labels(&self) -> &[usize] {
        &self.target_labels
    }

    /// All permanent labels in the order they were made permanent.
    pub fn permanent_order(&self) -> &[usize] {
        &self.permanent_order
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &Label {
        &self.labels[id]
    }

    pub fn cost(&self, id: usize) -> &[Cost] {
        &self.labels[id].cost
    }

    pub fn target_costs(&self) -> Vec<CostVector> {
        self.target_labels
            .iter()
            .map(|&id| CostVector(self.labels[id].cost.clone()))
            .collect()
    }

    /// Follows predecessor references back to the source label and returns
    /// the represented path.
    pub fn backtrack(&self, graph: &Graph, label_id: usize) -> Result<Path, EngineError> {
        let mut edges = Vec::new();
        let mut at = label_id;
        loop {
            let label = self
                .labels
                .get(at)
                .ok_or(EngineError::DanglingPredecessor(label_id))?;
            match (label.pred_node, label.pred_label) {
                (None, None) => break,
                (Some(pred_node), Some(pred_label)) => {
                    let edge = graph
                        .edge_between(pred_node, label.node)
                        .ok_or(EngineError::DanglingPredecessor(at))?;
                    edges.push(edge);
                    at = pred_label;
                }
                _ => return Err(EngineError::DanglingPredecessor(at)),
            }
        }
        edges.reverse();
        Ok(Path(edges))
    }
}

/// Runs label setting from `source` until no temporary label remains and
/// returns the permanent labels found at `target`.
///
/// An unreachable target is not an error; the run simply ends with no
/// target labels.
pub fn run_label_setting<A: CostAlgebra>(
    graph: &Graph,
    source: NodeId,
    target: NodeId,
    algebra: &A,
    options: SearchOptions,
) -> LabelRun {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut labels: Vec<Label> = Vec::new();
    let mut node_labels: Vec<Vec<usize>> = vec![Vec::new(); graph.node_count()];
    // Keyed by (aggregate, node id, insertion sequence) so equal-aggregate
    // ties break deterministically.
    let mut queue: BinaryHeap<Reverse<(Cost, NodeId, usize)>> = BinaryHeap::new();
    let mut target_labels = Vec::new();
    let mut permanent_order = Vec::new();
    let mut labels_created = 0usize;
    let mut labels_permanent = 0usize;

    let root = Label {
        cost: vec![0; algebra.dimension()],
        node: source,
        pred_node: None,
        pred_label: None,
        state: LabelState::Temporary,
    };
    let agg = algebra.aggregate(&root.cost);
    labels.push(root);
    labels_created += 1;
    node_labels[source].push(0);
    queue.push(Reverse((agg, source, 0)));

    while let Some(Reverse((_, _, id))) = queue.pop() {
        if labels[id].state != LabelState::Temporary {
            continue; // deleted while queued
        }
        labels[id].state = LabelState::Permanent;
        labels_permanent += 1;
        permanent_order.push(id);
        let node = labels[id].node;
        if node == target {
            target_labels.push(id);
        }

        for &edge in graph.out_edges(node) {
            let head = graph.head(edge);
            let cost = algebra.extend(&labels[id].cost, edge);
            labels_created += 1;

            let dominated_here = node_labels[head].iter().any(|&other| {
                weakly_dominates(&labels[other].cost, &cost)
            });
            if dominated_here {
                continue;
            }
            if options.prune_against_target
                && head != target
                && node_labels[target]
                    .iter()
                    .any(|&other| weakly_dominates(&labels[other].cost, &cost))
            {
                continue;
            }

            // The new label strictly dominates some temporaries at `head`;
            // drop them. Permanent labels cannot be dominated here because
            // they were selected with a smaller or equal aggregate.
            let mut removed = Vec::new();
            for &other in &node_labels[head] {
                if labels[other].state == LabelState::Temporary
                    && weakly_dominates(&cost, &labels[other].cost)
                {
                    removed.push(other);
                }
            }
            for other in removed {
                labels[other].state = LabelState::Deleted;
                node_labels[head].retain(|&x| x != other);
            }

            let new_id = labels.len();
            let agg = algebra.aggregate(&cost);
            labels.push(Label {
                cost,
                node: head,
                pred_node: Some(node),
                pred_label: Some(id),
                state: LabelState::Temporary,
            });
            node_labels[head].push(new_id);
            queue.push(Reverse((agg, head, new_id)));
        }
    }

    LabelRun {
        labels,
        target_labels,
        permanent_order,
        labels_created,
        labels_permanent,
    }
}

fn weakly_dominates(a: &[Cost], b: &[Cost]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;

    fn sum_run(
        graph: &Graph,
        costs: Vec<Vec<Cost>>,
        dim: usize,
        source: NodeId,
        target: NodeId,
    ) -> LabelRun {
        let algebra = SumAlgebra::new(costs, dim);
        run_label_setting(graph, source, target, &algebra, SearchOptions::default())
    }

    #[test]
    fn single_edge_single_label() {
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        let run = sum_run(&graph, vec![vec![7]], 1, 0, 1);
        assert_eq!(run.target_labels().len(), 1);
        assert_eq!(run.cost(run.target_labels()[0]), &[7]);
        let path = run.backtrack(&graph, run.target_labels()[0]).unwrap();
        assert_eq!(path, Path(vec![0]));
    }

    #[test]
    fn source_label_backtracks_to_empty_path() {
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        let run = sum_run(&graph, vec![vec![7]], 1, 0, 0);
        assert_eq!(run.target_labels().len(), 1);
        let path = run.backtrack(&graph, run.target_labels()[0]).unwrap();
        assert!(path.is_empty());
    }

    #[test]
    fn unreachable_target_yields_no_labels() {
        let graph = Graph::new(3, vec![(0, 1)]).unwrap();
        let run = sum_run(&graph, vec![vec![1]], 1, 0, 2);
        assert!(run.target_labels().is_empty());
    }

    #[test]
    fn bicriteria_diamond_keeps_both_tradeoffs() {
        // Two routes 0->1->3 and 0->2->3 with opposite objective profiles,
        // plus a dominated direct edge.
        let graph = Graph::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)]).unwrap();
        let costs = vec![
            vec![1, 5],
            vec![1, 5],
            vec![5, 1],
            vec![5, 1],
            vec![20, 20],
        ];
        let run = sum_run(&graph, costs, 2, 0, 3);
        let mut values = run.target_costs();
        values.sort();
        assert_eq!(
            values,
            vec![CostVector(vec![2, 10]), CostVector(vec![10, 2])]
        );
    }

    #[test]
    fn equal_cost_labels_are_deleted() {
        // Two parallel routes with identical costs; only one label survives.
        let graph = Graph::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let costs = vec![vec![1], vec![1], vec![1], vec![1]];
        let run = sum_run(&graph, costs, 1, 0, 3);
        assert_eq!(run.target_labels().len(), 1);
        assert_eq!(run.cost(run.target_labels()[0]), &[2]);
    }

    #[test]
    fn zero_cost_cycle_terminates() {
        let graph = Graph::new(3, vec![(0, 1), (1, 0), (1, 2)]).unwrap();
        let costs = vec![vec![0], vec![0], vec![3]];
        let run = sum_run(&graph, costs, 1, 0, 2);
        assert_eq!(run.target_labels().len(), 1);
        assert_eq!(run.cost(run.target_labels()[0]), &[3]);
    }

    #[test]
    fn permanent_order_is_nondecreasing_in_aggregate() {
        let graph = Graph::new(
            5,
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (3, 4), (2, 4)],
        )
        .unwrap();
        let costs = vec![
            vec![2, 1],
            vec![1, 2],
            vec![3, 1],
            vec![1, 3],
            vec![1, 1],
            vec![2, 2],
            vec![5, 0],
        ];
        let algebra = SumAlgebra::new(costs, 2);
        let run = run_label_setting(&graph, 0, 4, &algebra, SearchOptions::default());
        let mut last = Cost::MIN;
        for &id in run.permanent_order() {
            let agg: Cost = run.cost(id).iter().sum();
            assert!(agg >= last);
            last = agg;
        }
    }

    #[test]
    fn no_two_permanents_at_a_node_dominate_each_other() {
        let graph = Graph::new(
            5,
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (3, 4), (2, 4)],
        )
        .unwrap();
        let costs = vec![
            vec![2, 1],
            vec![1, 2],
            vec![3, 1],
            vec![1, 3],
            vec![1, 1],
            vec![2, 2],
            vec![5, 0],
        ];
        let algebra = SumAlgebra::new(costs, 2);
        let run = run_label_setting(&graph, 0, 4, &algebra, SearchOptions::default());
        for (i, a) in run.labels().iter().enumerate() {
            if a.state != LabelState::Permanent {
                continue;
            }
            for b in run.labels().iter().skip(i + 1) {
                if b.state == LabelState::Permanent && a.node == b.node {
                    assert!(!weakly_dominates(&a.cost, &b.cost));
                    assert!(!weakly_dominates(&b.cost, &a.cost));
                }
            }
        }
    }

    #[test]
    fn target_pruning_does_not_change_output() {
        let graph = Graph::new(
            6,
            vec![
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (1, 4),
                (2, 4),
                (3, 5),
                (4, 5),
                (0, 5),
            ],
        )
        .unwrap();
        let costs = vec![
            vec![1, 4],
            vec![4, 1],
            vec![2, 2],
            vec![3, 3],
            vec![1, 6],
            vec![6, 1],
            vec![1, 1],
            vec![2, 2],
            vec![9, 9],
        ];
        let with = {
            let algebra = SumAlgebra::new(costs.clone(), 2);
            let run = run_label_setting(
                &graph,
                0,
                5,
                &algebra,
                SearchOptions {
                    prune_against_target: true,
                },
            );
            let mut v = run.target_costs();
            v.sort();
            v
        };
        let without = {
            let algebra = SumAlgebra::new(costs, 2);
            let run = run_label_setting(
                &graph,
                0,
                5,
                &algebra,
                SearchOptions {
                    prune_against_target: false,
                },
            );
            let mut v = run.target_costs();
            v.sort();
            v
        };
        assert_eq!(with, without);
    }

    #[test]
    fn no_two_target_labels_dominate_each_other() {
        let graph = Graph::new(
            5,
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 4), (2, 4)],
        )
        .unwrap();
        let costs = vec![
            vec![1, 3],
            vec![3, 1],
            vec![2, 0],
            vec![0, 2],
            vec![1, 1],
            vec![9, 0],
            vec![0, 9],
        ];
        let run = sum_run(&graph, costs, 2, 0, 4);
        let values = run.target_costs();
        for (i, a) in values.iter().enumerate() {
            for (j, b) in values.iter().enumerate() {
                if i != j {
                    assert!(!a.weakly_dominates(b), "{a} vs {b}");
                }
            }
        }
    }
}
