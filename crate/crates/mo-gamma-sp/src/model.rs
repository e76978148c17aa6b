//! Graph and instance data model, dominance relations, exact worst-case
//! evaluation and Pareto filtering.
//!
//! Everything downstream (both solvers, the oracle, the file format) builds
//! on the types in this module. Costs are plain integers; there is no
//! floating point anywhere in the cost arithmetic, so dominance comparisons
//! are exact.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Scalar cost unit. All nominal costs and interval lengths are integers.
pub type Cost = i64;
/// Node identifier, in `0..node_count`.
pub type NodeId = usize;
/// Edge identifier, an index into the instance edge list.
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("node {node} out of range (graph has {node_count} nodes)")]
    InvalidNode { node: NodeId, node_count: usize },
    #[error("edge {edge} is a self-loop at node {node}; self-loops are not allowed")]
    SelfLoop { edge: EdgeId, node: NodeId },
    #[error("duplicate edge ({tail}, {head}); parallel edges are not allowed")]
    DuplicateEdge { tail: NodeId, head: NodeId },
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error(
        "edge {edge}, objective {objective}: nominal cost {value} is negative; \
         costs must be conservative (non-negative nominal and interval lengths, \
         so every cycle has non-negative cost in every scenario)"
    )]
    NegativeNominal {
        edge: EdgeId,
        objective: usize,
        value: Cost,
    },
    #[error(
        "edge {edge}, objective {objective}: interval length {value} is negative; \
         interval lengths must satisfy delta >= 0"
    )]
    NegativeDelta {
        edge: EdgeId,
        objective: usize,
        value: Cost,
    },
    #[error("objective {objective}: gamma = {gamma} exceeds the number of edges {edge_count}")]
    GammaOutOfRange {
        objective: usize,
        gamma: usize,
        edge_count: usize,
    },
    #[error("expected {expected} objectives, got {got}")]
    ObjectiveCountMismatch { expected: usize, got: usize },
    #[error("instance must have at least one objective")]
    NoObjectives,
    #[error("cost table for edge {edge} has wrong arity")]
    BadCostArity { edge: EdgeId },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Directed graph: a node count plus an ordered edge list with an adjacency
/// index. No parallel edges, no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self, ModelError> {
        if node_count == 0 {
            return Err(ModelError::EmptyGraph);
        }
        let mut seen = HashSet::new();
        let mut out_edges = vec![Vec::new(); node_count];
        for (id, &(tail, head)) in edges.iter().enumerate() {
            for node in [tail, head] {
                if node >= node_count {
                    return Err(ModelError::InvalidNode { node, node_count });
                }
            }
            if tail == head {
                return Err(ModelError::SelfLoop { edge: id, node: tail });
            }
            if !seen.insert((tail, head)) {
                return Err(ModelError::DuplicateEdge { tail, head });
            }
            out_edges[tail].push(id);
        }
        Ok(Graph {
            node_count,
            edges,
            out_edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn tail(&self, edge: EdgeId) -> NodeId {
        self.edges[edge].0
    }

    pub fn head(&self, edge: EdgeId) -> NodeId {
        self.edges[edge].1
    }

    /// Outgoing edge ids of `node`, in edge-list order.
    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node]
    }

    /// The unique edge from `tail` to `head`, if present. Uniqueness is
    /// guaranteed because parallel edges are rejected at construction.
    pub fn edge_between(&self, tail: NodeId, head: NodeId) -> Option<EdgeId> {
        self.out_edges[tail]
            .iter()
            .copied()
            .find(|&e| self.edges[e].1 == head)
    }
}

/// A multi-objective shortest-path instance with cardinality-constrained
/// cost uncertainty.
///
/// Each edge `e` carries, per objective `i`, a nominal cost and an interval
/// length `delta`, so the uncertain cost ranges over
/// `[nominal, nominal + delta]`. In any scenario at most `gamma[i]` edges may
/// deviate from their nominal cost in objective `i`.
///
/// Construction validates: non-negative nominal costs and interval lengths
/// (conservative costs), `gamma[i] <= edge_count`, and the graph rules
/// (no self-loops or parallel edges). A classic construction that this
/// rejects is a cycle whose cost is negative in some scenario: with such
/// costs a robust shortest path can be forced to traverse the cycle and no
/// simple robust shortest path exists, which breaks every solver here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    objectives: usize,
    /// `nominal[edge][objective]`
    nominal: Vec<Vec<Cost>>,
    /// `delta[edge][objective]`
    delta: Vec<Vec<Cost>>,
    gamma: Vec<usize>,
    source: NodeId,
    target: NodeId,
}

impl Instance {
    pub fn new(
        graph: Graph,
        nominal: Vec<Vec<Cost>>,
        delta: Vec<Vec<Cost>>,
        gamma: Vec<usize>,
        source: NodeId,
        target: NodeId,
    ) -> Result<Self, ModelError> {
        let objectives = gamma.len();
        if objectives == 0 {
            return Err(ModelError::NoObjectives);
        }
        let m = graph.edge_count();
        if nominal.len() != m || delta.len() != m {
            return Err(ModelError::BadCostArity {
                edge: nominal.len().min(delta.len()),
            });
        }
        for node in [source, target] {
            if node >= graph.node_count() {
                return Err(ModelError::InvalidNode {
                    node,
                    node_count: graph.node_count(),
                });
            }
        }
        for edge in 0..m {
            if nominal[edge].len() != objectives || delta[edge].len() != objectives {
                return Err(ModelError::BadCostArity { edge });
            }
            for i in 0..objectives {
                if nominal[edge][i] < 0 {
                    return Err(ModelError::NegativeNominal {
                        edge,
                        objective: i,
                        value: nominal[edge][i],
                    });
                }
                if delta[edge][i] < 0 {
                    return Err(ModelError::NegativeDelta {
                        edge,
                        objective: i,
                        value: delta[edge][i],
                    });
                }
            }
        }
        for (i, &g) in gamma.iter().enumerate() {
            if g > m {
                return Err(ModelError::GammaOutOfRange {
                    objective: i,
                    gamma: g,
                    edge_count: m,
                });
            }
        }
        Ok(Instance {
            graph,
            objectives,
            nominal,
            delta,
            gamma,
            source,
            target,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Number of objectives `k`.
    pub fn objectives(&self) -> usize {
        self.objectives
    }

    pub fn nominal(&self, edge: EdgeId, objective: usize) -> Cost {
        self.nominal[edge][objective]
    }

    pub fn delta(&self, edge: EdgeId, objective: usize) -> Cost {
        self.delta[edge][objective]
    }

    pub fn nominal_row(&self, edge: EdgeId) -> &[Cost] {
        &self.nominal[edge]
    }

    pub fn delta_row(&self, edge: EdgeId) -> &[Cost] {
        &self.delta[edge]
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    /// True iff all nominal costs and interval lengths are non-negative.
    ///
    /// With non-negative entries every cycle has non-negative cost in every
    /// scenario, so a complete set of robust efficient solutions containing
    /// only simple paths exists. Constructed instances always satisfy this;
    /// the check is exposed for validation symmetry with the parser.
    pub fn is_conservative(&self) -> bool {
        self.nominal
            .iter()
            .chain(self.delta.iter())
            .all(|row| row.iter().all(|&c| c >= 0))
    }
}

/// A vector of objective values, one entry per objective.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostVector(pub Vec<Cost>);

impl CostVector {
    pub fn zeros(dim: usize) -> Self {
        CostVector(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[Cost] {
        &self.0
    }

    /// Componentwise `<=` with `self != other` (strict Pareto dominance).
    ///
    /// Panics if the dimensions differ; comparing vectors of different
    /// arities is a usage error, not a data condition.
    pub fn dominates(&self, other: &CostVector) -> bool {
        self.weakly_dominates(other) && self != other
    }

    /// Componentwise `<=` (dominates or equal).
    pub fn weakly_dominates(&self, other: &CostVector) -> bool {
        assert_eq!(
            self.dim(),
            other.dim(),
            "cost vector dimension mismatch: {} vs {}",
            self.dim(),
            other.dim()
        );
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `a` strictly dominates `b`: `a <= b` componentwise and `a != b`.
pub fn dominates(a: &CostVector, b: &CostVector) -> bool {
    a.dominates(b)
}

/// A walk through the graph stored as an ordered list of edge ids. All paths
/// produced by the solvers are simple source-target paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path(pub Vec<EdgeId>);

impl Path {
    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Node sequence of the walk, starting at `from`.
    pub fn nodes(&self, graph: &Graph, from: NodeId) -> Vec<NodeId> {
        let mut nodes = vec![from];
        for &e in &self.0 {
            nodes.push(graph.head(e));
        }
        nodes
    }

    /// Checks that this is a simple path from the instance source to the
    /// instance target: consecutive edges chain, no node repeats.
    pub fn validate(&self, instance: &Instance) -> Result<(), ModelError> {
        let graph = instance.graph();
        let mut at = instance.source();
        let mut visited = HashSet::new();
        visited.insert(at);
        for &e in &self.0 {
            if e >= graph.edge_count() {
                return Err(ModelError::InvalidPath(format!("edge {e} out of range")));
            }
            if graph.tail(e) != at {
                return Err(ModelError::InvalidPath(format!(
                    "edge {e} starts at {} but the walk is at {at}",
                    graph.tail(e)
                )));
            }
            at = graph.head(e);
            if !visited.insert(at) {
                return Err(ModelError::InvalidPath(format!("node {at} repeated")));
            }
        }
        if at != instance.target() {
            return Err(ModelError::InvalidPath(format!(
                "walk ends at {at}, not at target {}",
                instance.target()
            )));
        }
        Ok(())
    }
}

/// Exact worst-case objective vector of a simple source-target path.
///
/// Per objective `i` this is the nominal sum plus the sum of the
/// `min(|path|, gamma[i])` largest interval lengths on the path: the worst
/// scenario raises exactly the edges with the largest intervals to their
/// maximum. The result does not depend on edge order within the path.
pub fn worst_case_cost(instance: &Instance, path: &Path) -> Result<CostVector, ModelError> {
    path.validate(instance)?;
    Ok(worst_case_cost_unchecked(instance, path))
}

/// As [`worst_case_cost`], skipping path validation. Used by the solvers on
/// paths they constructed themselves.
pub fn worst_case_cost_unchecked(instance: &Instance, path: &Path) -> CostVector {
    let k = instance.objectives();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let base: Cost = path.edges().iter().map(|&e| instance.nominal(e, i)).sum();
        let mut deltas: Vec<Cost> = path.edges().iter().map(|&e| instance.delta(e, i)).collect();
        deltas.sort_unstable_by(|a, b| b.cmp(a));
        let take = instance.gamma()[i].min(deltas.len());
        let deviation: Cost = deltas[..take].iter().sum();
        out.push(base + deviation);
    }
    CostVector(out)
}

/// A complete set of solutions: paths paired with pairwise non-dominated,
/// duplicate-free cost vectors, sorted lexicographically by cost vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Front(Vec<(Path, CostVector)>);

impl Front {
    pub fn entries(&self) -> &[(Path, CostVector)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_entries(self) -> Vec<(Path, CostVector)> {
        self.0
    }

    /// The cost-vector value set, sorted. Two fronts computed by different
    /// solvers are compared on this.
    pub fn value_set(&self) -> Vec<CostVector> {
        self.0.iter().map(|(_, c)| c.clone()).collect()
    }

    /// Checks the front invariants: pairwise non-dominated, no duplicate
    /// values, sorted lexicographically.
    pub fn check_invariants(&self) -> bool {
        for (idx, (_, a)) in self.0.iter().enumerate() {
            for (_, b) in &self.0[idx + 1..] {
                if a.weakly_dominates(b) || b.weakly_dominates(a) {
                    return false;
                }
            }
        }
        self.0.windows(2).all(|w| w[0].1 < w[1].1)
    }
}

/// Keeps one representative per non-dominated cost vector.
///
/// Candidates are scanned in input order; among equal cost vectors the first
/// one seen is kept. The output is sorted lexicographically by cost vector,
/// so the result is independent of the (deterministic) scan only in the
/// choice of representatives.
pub fn pareto_filter(candidates: Vec<(Path, CostVector)>) -> Front {
    let mut kept: Vec<(Path, CostVector)> = Vec::new();
    for (path, cost) in candidates {
        if kept.iter().any(|(_, c)| c.weakly_dominates(&cost)) {
            continue;
        }
        kept.retain(|(_, c)| !cost.dominates(c));
        kept.push((path, cost));
    }
    kept.sort_by(|a, b| a.1.cmp(&b.1));
    Front(kept)
}
