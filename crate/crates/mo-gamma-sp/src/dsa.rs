//! Deterministic subproblems solver.
//!
//! The uncertain problem is reduced to a family of deterministic sum-cost
//! shortest-path subproblems. For one objective, edges are sorted by interval
//! length and a subproblem index `l` charges every edge among the `l - 1`
//! largest-interval edges the surcharge `delta_e - threshold(l)`; the minima
//! of these subproblems over a small index set cover all robust optima. With
//! several objectives the index becomes a vector, one component per
//! objective, and the subproblem grid is the product of per-objective index
//! sets — unless some objectives share a common descending interval order
//! and an equal gamma, in which case their components move in lockstep and
//! the grid collapses.
//!
//! Two reductions keep the grid small:
//! * index-set reduction: start at `gamma + 1`, collapse runs of equal
//!   interval lengths, keep every second index plus the sentinel;
//! * solution checking: a subproblem whose cost function agrees with the
//!   previously solved one on every edge used by the previous solutions is
//!   skipped and the previous complete set reused.

use std::collections::HashSet;
use std::rc::Rc;

use thiserror::Error;

use crate::label::{run_label_setting, SearchOptions, SumAlgebra};
use crate::model::{
    pareto_filter, worst_case_cost_unchecked, Cost, CostVector, EdgeId, Front, Instance, Path,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsaError {
    #[error("instance has {0} objectives; this solver requires exactly one")]
    RequiresSingleObjective(usize),
    #[error(
        "instance does not have an objective-independent element order; \
         use the general solver"
    )]
    NotObjectiveIndependent,
}

/// Per-objective descending interval orders with threshold accessors.
///
/// For objective `i`, `order(i)` lists edge ids by interval length
/// descending (ties by edge id) and `threshold(i, l)` is the `l`-th largest
/// interval length, with the sentinel `threshold(i, edge_count + 1) = 0`.
pub struct SortedDeltas {
    orders: Vec<Vec<EdgeId>>,
    ranks: Vec<Vec<usize>>,
    /// `thresholds[i][l - 1]` for `l` in `1..=m+1`; last entry is 0.
    thresholds: Vec<Vec<Cost>>,
}

impl SortedDeltas {
    pub fn new(instance: &Instance) -> Self {
        let m = instance.graph().edge_count();
        let k = instance.objectives();
        let mut orders = Vec::with_capacity(k);
        let mut ranks = Vec::with_capacity(k);
        let mut thresholds = Vec::with_capacity(k);
        for i in 0..k {
            let mut order: Vec<EdgeId> = (0..m).collect();
            order.sort_by(|&a, &b| {
                instance
                    .delta(b, i)
                    .cmp(&instance.delta(a, i))
                    .then(a.cmp(&b))
            });
            let mut rank = vec![0usize; m];
            for (pos, &e) in order.iter().enumerate() {
                rank[e] = pos;
            }
            let mut thresh: Vec<Cost> = order.iter().map(|&e| instance.delta(e, i)).collect();
            thresh.push(0);
            orders.push(order);
            ranks.push(rank);
            thresholds.push(thresh);
        }
        SortedDeltas {
            orders,
            ranks,
            thresholds,
        }
    }

    pub fn order(&self, objective: usize) -> &[EdgeId] {
        &self.orders[objective]
    }

    /// 0-based position of `edge` in the descending order of `objective`.
    pub fn rank(&self, objective: usize, edge: EdgeId) -> usize {
        self.ranks[objective][edge]
    }

    /// Threshold for subproblem index `l` in `1..=m+1`.
    pub fn threshold(&self, objective: usize, l: usize) -> Cost {
        self.thresholds[objective][l - 1]
    }

    fn index_range(&self) -> usize {
        self.thresholds[0].len() // m + 1
    }
}

/// Deterministic per-edge costs of subproblem `l` for one objective: edges
/// among the `l - 1` largest intervals cost nominal plus
/// `delta - threshold(l)`, all others cost nominal. Every output is at least
/// the nominal cost.
pub fn subproblem_costs(
    instance: &Instance,
    sorted: &SortedDeltas,
    objective: usize,
    l: usize,
) -> Vec<Cost> {
    assert!(
        (1..=sorted.index_range()).contains(&l),
        "subproblem index {l} out of range 1..={}",
        sorted.index_range()
    );
    let thresh = sorted.threshold(objective, l);
    (0..instance.graph().edge_count())
        .map(|e| {
            let base = instance.nominal(e, objective);
            if sorted.rank(objective, e) + 1 < l {
                base + (instance.delta(e, objective) - thresh)
            } else {
                base
            }
        })
        .collect()
}

/// The approximation `g` of the worst-case cost of `path` at subproblem
/// index `index` (one component per objective): nominal sum, plus
/// `gamma * threshold`, plus the surcharges of the used large-interval
/// edges. It never underestimates the worst case, and for each path some
/// index in the full grid attains it exactly.
pub fn g_value(
    instance: &Instance,
    sorted: &SortedDeltas,
    path: &Path,
    index: &[usize],
) -> CostVector {
    let k = instance.objectives();
    assert_eq!(index.len(), k, "subproblem index arity mismatch");
    let mut out = Vec::with_capacity(k);
    for (i, &l) in index.iter().enumerate() {
        assert!(
            (1..=sorted.index_range()).contains(&l),
            "subproblem index {l} out of range"
        );
        let thresh = sorted.threshold(i, l);
        let mut value: Cost = instance.gamma()[i] as Cost * thresh;
        for &e in path.edges() {
            value += instance.nominal(e, i);
            if sorted.rank(i, e) + 1 < l {
                value += instance.delta(e, i) - thresh;
            }
        }
        out.push(value);
    }
    CostVector(out)
}

/// Index set of subproblems to solve for one objective: start at
/// `gamma + 1`, collapse runs of equal interval lengths, keep every second
/// index and the final one. At most `ceil((m - gamma) / 2) + 1` entries.
pub fn index_set_single(instance: &Instance, sorted: &SortedDeltas, objective: usize) -> Vec<usize> {
    let m = instance.graph().edge_count();
    let rows: Vec<Vec<Cost>> = (1..=m + 1)
        .map(|l| vec![sorted.threshold(objective, l)])
        .collect();
    reduced_index_set(&rows, instance.gamma()[objective], m)
}

/// Algorithm shared by the scalar and the class (vector-threshold) case.
/// `rows[l - 1]` is the threshold row of index `l`; two adjacent indices are
/// merged when their rows are equal.
fn reduced_index_set(rows: &[Vec<Cost>], gamma: usize, m: usize) -> Vec<usize> {
    let mut l = gamma + 1;
    let mut set = vec![l];
    while l < m + 1 {
        while l < m + 1 && rows[l - 1] == rows[l] {
            l += 1;
        }
        if l < m + 1 {
            l += 1;
            if l < m + 1 {
                l += 1;
            }
            set.push(l);
        }
    }
    set
}

/// A group of objectives sharing a descending element order and an equal
/// gamma. Their subproblem index components always move in lockstep.
#[derive(Debug, Clone)]
pub struct OrderClass {
    pub objectives: Vec<usize>,
    pub gamma: usize,
    /// Common permutation: interval lengths descending for every objective
    /// in the class.
    pub order: Vec<EdgeId>,
    /// 0-based position of each edge in `order`.
    pub rank: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderStructure {
    /// One order fits all objectives and all gammas are equal.
    ObjectiveIndependent,
    /// A nontrivial partition into classes (given as objective index lists).
    PartialObjectiveIndependent(Vec<Vec<usize>>),
    /// Every objective is its own class.
    General,
}

#[derive(Debug, Clone)]
pub struct OrderAnalysis {
    pub classes: Vec<OrderClass>,
}

impl OrderAnalysis {
    pub fn is_objective_independent(&self) -> bool {
        self.classes.len() == 1
    }

    pub fn structure(&self) -> OrderStructure {
        let k: usize = self.classes.iter().map(|c| c.objectives.len()).sum();
        if self.classes.len() == 1 {
            OrderStructure::ObjectiveIndependent
        } else if self.classes.len() == k {
            OrderStructure::General
        } else {
            OrderStructure::PartialObjectiveIndependent(
                self.classes.iter().map(|c| c.objectives.clone()).collect(),
            )
        }
    }
}

/// Partitions the objectives into maximal classes sharing both a common
/// descending interval order and an equal gamma.
///
/// Objectives are processed in index order and greedily merged into the
/// first compatible class, so the partition is deterministic. Compatibility
/// is decided by sorting the class-restricted interval rows
/// lexicographically descending (ties by edge id) and verifying every
/// column is non-increasing; a common order exists if and only if this
/// witness works, so ties never hide a valid order.
pub fn detect_order_structure(instance: &Instance) -> OrderAnalysis {
    let k = instance.objectives();
    let mut classes: Vec<OrderClass> = Vec::new();
    for i in 0..k {
        let gamma = instance.gamma()[i];
        let mut placed = false;
        for class in &mut classes {
            if class.gamma != gamma {
                continue;
            }
            let mut objectives = class.objectives.clone();
            objectives.push(i);
            if let Some(order) = common_order(instance, &objectives) {
                class.rank = rank_of(&order);
                class.order = order;
                class.objectives = objectives;
                placed = true;
                break;
            }
        }
        if !placed {
            let order = common_order(instance, &[i]).expect("single column is always sortable");
            classes.push(OrderClass {
                objectives: vec![i],
                gamma,
                rank: rank_of(&order),
                order,
            });
        }
    }
    OrderAnalysis { classes }
}

/// A permutation sorting the interval lengths of all `objectives`
/// descending simultaneously, or `None` if no such order exists.
fn common_order(instance: &Instance, objectives: &[usize]) -> Option<Vec<EdgeId>> {
    let m = instance.graph().edge_count();
    let rows: Vec<Vec<Cost>> = (0..m)
        .map(|e| objectives.iter().map(|&i| instance.delta(e, i)).collect())
        .collect();
    let mut ids: Vec<EdgeId> = (0..m).collect();
    ids.sort_by(|&a, &b| rows[b].cmp(&rows[a]).then(a.cmp(&b)));
    for (col, _) in objectives.iter().enumerate() {
        for w in ids.windows(2) {
            if rows[w[0]][col] < rows[w[1]][col] {
                return None;
            }
        }
    }
    Some(ids)
}

fn rank_of(order: &[EdgeId]) -> Vec<usize> {
    let mut rank = vec![0usize; order.len()];
    for (pos, &e) in order.iter().enumerate() {
        rank[e] = pos;
    }
    rank
}

#[derive(Debug, Clone, Copy)]
pub struct DsaOptions {
    /// Skip a subproblem when the previous solutions avoid every edge whose
    /// cost changed (reusing the previous complete set).
    pub solution_checking: bool,
    /// Replace the prefix-membership test with an exact changed-cost-column
    /// test. Skips at least as often as the standard check.
    pub strong_checking: bool,
    /// Ignore detected order classes and give every objective its own loop.
    pub force_general: bool,
    /// Use the full index grid `{1..m+1}` per loop instead of the reduced
    /// sets (testing hook for index-reduction safety).
    pub full_grid: bool,
    /// Solve grid points concurrently. Disables solution checking; the
    /// front is value-identical to the sequential result.
    pub parallel: bool,
}

impl Default for DsaOptions {
    fn default() -> Self {
        DsaOptions {
            solution_checking: true,
            strong_checking: false,
            force_general: false,
            full_grid: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsaVariant {
    Single,
    ObjectiveIndependent,
    PartialObjectiveIndependent,
    General,
}

impl DsaVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            DsaVariant::Single => "single",
            DsaVariant::ObjectiveIndependent => "oi",
            DsaVariant::PartialObjectiveIndependent => "partial-oi",
            DsaVariant::General => "general",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DsaReport {
    pub front: Front,
    /// Grid points visited (skipped ones included).
    pub subproblems_considered: usize,
    /// Label-setting runs actually performed.
    pub subproblems_solved: usize,
    pub variant: DsaVariant,
}

/// Single-objective solver. The front contains exactly one entry whenever
/// the target is reachable.
pub fn solve_single(instance: &Instance) -> Result<DsaReport, DsaError> {
    solve_single_with(instance, &DsaOptions::default())
}

pub fn solve_single_with(instance: &Instance, options: &DsaOptions) -> Result<DsaReport, DsaError> {
    if instance.objectives() != 1 {
        return Err(DsaError::RequiresSingleObjective(instance.objectives()));
    }
    Ok(solve_general_with(instance, options))
}

/// Solver for instances with an objective-independent element order: one
/// permutation sorts all interval columns and all gammas are equal, so a
/// single index loop suffices. Errors on other instances rather than
/// computing with an invalid premise.
pub fn solve_oi(instance: &Instance) -> Result<DsaReport, DsaError> {
    solve_oi_with(instance, &DsaOptions::default())
}

pub fn solve_oi_with(instance: &Instance, options: &DsaOptions) -> Result<DsaReport, DsaError> {
    let analysis = detect_order_structure(instance);
    if !analysis.is_objective_independent() {
        return Err(DsaError::NotObjectiveIndependent);
    }
    Ok(run_dsa(instance, analysis.classes, options))
}

/// General solver for any number of objectives. Detected order classes are
/// collapsed to shared loops unless `force_general` is set.
pub fn solve_general(instance: &Instance) -> DsaReport {
    solve_general_with(instance, &DsaOptions::default())
}

pub fn solve_general_with(instance: &Instance, options: &DsaOptions) -> DsaReport {
    let classes = if options.force_general {
        singleton_classes(instance)
    } else {
        detect_order_structure(instance).classes
    };
    run_dsa(instance, classes, options)
}

fn singleton_classes(instance: &Instance) -> Vec<OrderClass> {
    (0..instance.objectives())
        .map(|i| {
            let order = common_order(instance, &[i]).expect("single column is always sortable");
            OrderClass {
                objectives: vec![i],
                gamma: instance.gamma()[i],
                rank: rank_of(&order),
                order,
            }
        })
        .collect()
}

/// Threshold row of a class at index `l`: one interval length per class
/// objective, the sentinel row at `m + 1` being all zeros.
fn class_threshold_rows(instance: &Instance, class: &OrderClass) -> Vec<Vec<Cost>> {
    let m = instance.graph().edge_count();
    let mut rows: Vec<Vec<Cost>> = class
        .order
        .iter()
        .map(|&e| class.objectives.iter().map(|&i| instance.delta(e, i)).collect())
        .collect();
    rows.push(vec![0; class.objectives.len()]);
    debug_assert_eq!(rows.len(), m + 1);
    rows
}

struct GridIter {
    sizes: Vec<usize>,
    pos: Vec<usize>,
    started: bool,
    done: bool,
}

impl GridIter {
    fn new(sizes: Vec<usize>) -> Self {
        let done = sizes.contains(&0);
        GridIter {
            pos: vec![0; sizes.len()],
            sizes,
            started: false,
            done,
        }
    }

    /// Advances odometer-style (last coordinate fastest) and returns the
    /// outermost coordinate that changed.
    fn next(&mut self) -> Option<(&[usize], usize)> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some((&self.pos, 0));
        }
        let mut level = self.sizes.len();
        loop {
            if level == 0 {
                self.done = true;
                return None;
            }
            level -= 1;
            self.pos[level] += 1;
            if self.pos[level] < self.sizes[level] {
                break;
            }
            self.pos[level] = 0;
        }
        Some((&self.pos, level))
    }
}

fn run_dsa(instance: &Instance, classes: Vec<OrderClass>, options: &DsaOptions) -> DsaReport {
    let m = instance.graph().edge_count();
    let k = instance.objectives();
    let variant = if k == 1 {
        DsaVariant::Single
    } else if classes.len() == 1 {
        DsaVariant::ObjectiveIndependent
    } else if classes.len() < k {
        DsaVariant::PartialObjectiveIndependent
    } else {
        DsaVariant::General
    };

    let index_sets: Vec<Vec<usize>> = classes
        .iter()
        .map(|class| {
            if options.full_grid {
                (1..=m + 1).collect()
            } else {
                let rows = class_threshold_rows(instance, class);
                reduced_index_set(&rows, class.gamma, m)
            }
        })
        .collect();

    let mut pool: Vec<Path> = Vec::new();
    let mut pooled: HashSet<Vec<EdgeId>> = HashSet::new();
    let pool_paths = |paths: &[Path], pool: &mut Vec<Path>, pooled: &mut HashSet<Vec<EdgeId>>| {
        for path in paths {
            if pooled.insert(path.0.clone()) {
                pool.push(path.clone());
            }
        }
    };

    let mut considered = 0usize;
    let mut solved = 0usize;

    if options.parallel {
        use rayon::prelude::*;
        let grid: Vec<Vec<usize>> = {
            let mut grid = Vec::new();
            let mut iter = GridIter::new(index_sets.iter().map(|s| s.len()).collect());
            while let Some((pos, _)) = iter.next() {
                grid.push(
                    pos.iter()
                        .zip(&index_sets)
                        .map(|(&p, set)| set[p])
                        .collect(),
                );
            }
            grid
        };
        considered = grid.len();
        solved = grid.len();
        let sets: Vec<Vec<Path>> = grid
            .par_iter()
            .map(|lambda| solve_subproblem(instance, &classes, lambda))
            .collect();
        for set in &sets {
            pool_paths(set, &mut pool, &mut pooled);
        }
    } else {
        // One checkpoint per loop level: the subproblem index and complete
        // set last seen at that level. The test at level `h` compares the
        // current index against checkpoint `h`, which differs only in
        // component `h`.
        type Checkpoint = (Vec<usize>, Rc<Vec<Path>>);
        let mut checkpoints: Vec<Option<Checkpoint>> = vec![None; classes.len()];
        let mut iter = GridIter::new(index_sets.iter().map(|s| s.len()).collect());
        while let Some((pos, level)) = iter.next() {
            let lambda: Vec<usize> = pos
                .iter()
                .zip(&index_sets)
                .map(|(&p, set)| set[p])
                .collect();
            considered += 1;

            let reused: Option<Rc<Vec<Path>>> = if !options.solution_checking {
                None
            } else {
                match &checkpoints[level] {
                    None => None,
                    Some((prev_lambda, prev_set)) => {
                        let touched = if options.strong_checking {
                            any_solution_touches_changed_columns(
                                instance,
                                &classes[level],
                                prev_lambda[level],
                                lambda[level],
                                prev_set,
                            )
                        } else {
                            let prefix = if classes.len() == 1 {
                                // Single loop: test the first l - 1 elements.
                                lambda[level] - 1
                            } else {
                                // Nested loops: test the first l_h elements.
                                lambda[level].min(m)
                            };
                            prev_set.iter().any(|path| {
                                path.edges()
                                    .iter()
                                    .any(|&e| classes[level].rank[e] < prefix)
                            })
                        };
                        if touched {
                            None
                        } else {
                            Some(Rc::clone(prev_set))
                        }
                    }
                }
            };

            let set: Rc<Vec<Path>> = match reused {
                Some(set) => set,
                None => {
                    solved += 1;
                    Rc::new(solve_subproblem(instance, &classes, &lambda))
                }
            };
            pool_paths(&set, &mut pool, &mut pooled);
            for slot in checkpoints.iter_mut().skip(level) {
                *slot = Some((lambda.clone(), Rc::clone(&set)));
            }
        }
    }

    let candidates = pool
        .into_iter()
        .map(|p| {
            let cost = worst_case_cost_unchecked(instance, &p);
            (p, cost)
        })
        .collect();
    DsaReport {
        front: pareto_filter(candidates),
        subproblems_considered: considered,
        subproblems_solved: solved,
        variant,
    }
}

/// Exact form of the skip test: compare the cost columns of the previous and
/// the current index on the level class and look for a solution using an
/// edge whose cost changed.
fn any_solution_touches_changed_columns(
    instance: &Instance,
    class: &OrderClass,
    prev_l: usize,
    cur_l: usize,
    solutions: &[Path],
) -> bool {
    let m = instance.graph().edge_count();
    let mut changed = vec![false; m];
    for &i in &class.objectives {
        let prev_thresh = class_threshold(instance, class, i, prev_l);
        let cur_thresh = class_threshold(instance, class, i, cur_l);
        for (e, flag) in changed.iter_mut().enumerate() {
            let prev_cost = if class.rank[e] + 1 < prev_l {
                instance.delta(e, i) - prev_thresh
            } else {
                0
            };
            let cur_cost = if class.rank[e] + 1 < cur_l {
                instance.delta(e, i) - cur_thresh
            } else {
                0
            };
            if prev_cost != cur_cost {
                *flag = true;
            }
        }
    }
    solutions
        .iter()
        .any(|path| path.edges().iter().any(|&e| changed[e]))
}

fn class_threshold(instance: &Instance, class: &OrderClass, objective: usize, l: usize) -> Cost {
    if l == class.order.len() + 1 {
        0
    } else {
        instance.delta(class.order[l - 1], objective)
    }
}

/// Solves one deterministic subproblem by label setting on its modified
/// costs and returns a complete set of efficient paths.
fn solve_subproblem(instance: &Instance, classes: &[OrderClass], lambda: &[usize]) -> Vec<Path> {
    let m = instance.graph().edge_count();
    let k = instance.objectives();
    let mut costs = vec![vec![0; k]; m];
    for (class, &l) in classes.iter().zip(lambda) {
        for &i in &class.objectives {
            let thresh = class_threshold(instance, class, i, l);
            for (e, row) in costs.iter_mut().enumerate() {
                row[i] = if class.rank[e] + 1 < l {
                    instance.nominal(e, i) + (instance.delta(e, i) - thresh)
                } else {
                    instance.nominal(e, i)
                };
            }
        }
    }
    let algebra = SumAlgebra::new(costs, k);
    let run = run_label_setting(
        instance.graph(),
        instance.source(),
        instance.target(),
        &algebra,
        SearchOptions::default(),
    );
    run.target_labels()
        .iter()
        .map(|&id| {
            run.backtrack(instance.graph(), id)
                .expect("target labels backtrack to the source")
        })
        .collect()
}

/// Upper bound on the number of grid points the solver may consider:
/// product over loop levels of `ceil((m - gamma) / 2) + 1`.
pub fn subproblem_bound(instance: &Instance, classes: &[OrderClass]) -> usize {
    let m = instance.graph().edge_count();
    classes
        .iter()
        .map(|c| (m - c.gamma).div_ceil(2) + 1)
        .product()
}
