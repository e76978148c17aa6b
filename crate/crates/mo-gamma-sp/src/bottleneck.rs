//! Bottleneck reformulation and label-setting solver.
//!
//! The uncertain problem with `k` objectives is recast as a deterministic
//! problem with `sum(gamma[i] + 1)` objectives: per original objective one
//! running nominal sum plus, for `j = 1..=gamma[i]`, the `j`-th largest
//! interval length seen on the path (zero-padded for short paths). A path's
//! exact worst case is recovered from such a cost by adding each block up,
//! so label setting on the reformulated objective followed by a worst-case
//! filter yields a complete set of robust efficient paths.

use crate::label::{run_label_setting, CostAlgebra, LabelRun, SearchOptions};
use crate::model::{
    pareto_filter, Cost, CostVector, EdgeId, Front, Instance, ModelError, Path,
};

/// Block layout of a bottleneck cost vector: per objective `i` one nominal
/// entry followed by `gamma[i]` sorted interval entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckLayout {
    gammas: Vec<usize>,
    offsets: Vec<usize>,
    dimension: usize,
}

impl BottleneckLayout {
    /// Layout for an instance; `gamma` values beyond the edge count are
    /// clamped to it (zero-padding makes the extra entries identically
    /// zero, so the clamp does not change any value).
    pub fn new(instance: &Instance) -> Self {
        let m = instance.graph().edge_count();
        let gammas: Vec<usize> = instance.gamma().iter().map(|&g| g.min(m)).collect();
        let mut offsets = Vec::with_capacity(gammas.len());
        let mut dimension = 0;
        for &g in &gammas {
            offsets.push(dimension);
            dimension += g + 1;
        }
        BottleneckLayout {
            gammas,
            offsets,
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn gammas(&self) -> &[usize] {
        &self.gammas
    }

    /// Index of the nominal-sum entry of objective `i`.
    pub fn nominal_slot(&self, objective: usize) -> usize {
        self.offsets[objective]
    }

    /// Index of the `j`-th largest interval entry of objective `i`,
    /// `j` in `1..=gamma[i]`.
    pub fn kmax_slot(&self, objective: usize, j: usize) -> usize {
        debug_assert!(1 <= j && j <= self.gammas[objective]);
        self.offsets[objective] + j
    }
}

/// A bottleneck cost vector together with its layout. Within each objective
/// block the interval entries are non-increasing and non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckCost {
    pub layout: BottleneckLayout,
    pub values: Vec<Cost>,
}

impl BottleneckCost {
    pub fn zeros(layout: BottleneckLayout) -> Self {
        let values = vec![0; layout.dimension()];
        BottleneckCost { layout, values }
    }

    pub fn nominal_sum(&self, objective: usize) -> Cost {
        self.values[self.layout.nominal_slot(objective)]
    }

    pub fn kmax(&self, objective: usize, j: usize) -> Cost {
        self.values[self.layout.kmax_slot(objective, j)]
    }
}

/// The label-extension operator: adds the edge's nominal cost to each
/// block's sum entry and inserts the edge's interval length into the sorted
/// prefix, shifting smaller entries right and dropping the last.
pub fn extend(cost: &BottleneckCost, instance: &Instance, edge: EdgeId) -> BottleneckCost {
    let mut out = cost.clone();
    extend_in_place(&mut out.values, &out.layout, instance, edge);
    out
}

fn extend_in_place(values: &mut [Cost], layout: &BottleneckLayout, instance: &Instance, edge: EdgeId) {
    for i in 0..layout.gammas.len() {
        let off = layout.nominal_slot(i);
        values[off] += instance.nominal(edge, i);
        let gamma = layout.gammas[i];
        let delta = instance.delta(edge, i);
        let block = &mut values[off + 1..=off + gamma];
        for pos in 0..gamma {
            if delta > block[pos] {
                block[pos..].rotate_right(1);
                block[pos] = delta;
                break;
            }
        }
    }
}

/// Bottleneck cost of a whole path: the fold of [`extend`] over its edges
/// starting from the all-zero cost. Order-independent.
pub fn z_la(instance: &Instance, path: &Path) -> Result<BottleneckCost, ModelError> {
    path.validate(instance)?;
    let layout = BottleneckLayout::new(instance);
    let mut values = vec![0; layout.dimension()];
    for &edge in path.edges() {
        extend_in_place(&mut values, &layout, instance, edge);
    }
    Ok(BottleneckCost { layout, values })
}

/// Maps a bottleneck cost to the worst-case objective vector: per objective
/// the nominal sum plus all interval entries of the block.
pub fn bottleneck_to_worst_case(cost: &BottleneckCost) -> CostVector {
    CostVector(worst_case_from_flat(&cost.values, &cost.layout))
}

fn worst_case_from_flat(values: &[Cost], layout: &BottleneckLayout) -> Vec<Cost> {
    (0..layout.gammas.len())
        .map(|i| {
            let off = layout.nominal_slot(i);
            values[off..=off + layout.gammas[i]].iter().sum()
        })
        .collect()
}

/// Cost algebra plugging the bottleneck extension into the label engine.
pub struct KmaxAlgebra<'a> {
    instance: &'a Instance,
    layout: BottleneckLayout,
}

impl<'a> KmaxAlgebra<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        KmaxAlgebra {
            layout: BottleneckLayout::new(instance),
            instance,
        }
    }

    pub fn layout(&self) -> &BottleneckLayout {
        &self.layout
    }
}

impl CostAlgebra for KmaxAlgebra<'_> {
    fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    fn extend(&self, cost: &[Cost], edge: EdgeId) -> Vec<Cost> {
        let mut out = cost.to_vec();
        extend_in_place(&mut out, &self.layout, self.instance, edge);
        out
    }

    /// Sum of all components; per block this is exactly the worst-case value
    /// of the represented prefix path.
    fn aggregate(&self, cost: &[Cost]) -> Cost {
        cost.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct LsaReport {
    pub front: Front,
    pub labels_created: usize,
    pub labels_permanent: usize,
    /// Bottleneck costs of the permanent target labels before the
    /// worst-case filter, in the order they were made permanent.
    pub target_costs: Vec<CostVector>,
}

/// Runs the label-setting pass and returns the raw labels. Exposed for
/// inspection; [`solve_lsa`] is the end-to-end solver.
pub fn run_lsa_labels(instance: &Instance, options: SearchOptions) -> LabelRun {
    let algebra = KmaxAlgebra::new(instance);
    run_label_setting(
        instance.graph(),
        instance.source(),
        instance.target(),
        &algebra,
        options,
    )
}

/// End-to-end bottleneck solver: label setting on the reformulated
/// objective, worst-case mapping of every permanent target label, Pareto
/// filter, one representative path per surviving value.
pub fn solve_lsa(instance: &Instance) -> LsaReport {
    solve_lsa_with(instance, SearchOptions::default())
}

pub fn solve_lsa_with(instance: &Instance, options: SearchOptions) -> LsaReport {
    let layout = BottleneckLayout::new(instance);
    let run = run_lsa_labels(instance, options);
    let target_costs: Vec<CostVector> = run
        .target_labels()
        .iter()
        .map(|&id| CostVector(run.cost(id).to_vec()))
        .collect();
    let candidates: Vec<(Path, CostVector)> = run
        .target_labels()
        .iter()
        .map(|&id| {
            let path = run
                .backtrack(instance.graph(), id)
                .expect("target labels backtrack to the source");
            let worst = CostVector(worst_case_from_flat(run.cost(id), &layout));
            (path, worst)
        })
        .collect();
    LsaReport {
        front: pareto_filter(candidates),
        labels_created: run.labels_created,
        labels_permanent: run.labels_permanent,
        target_costs,
    }
}
