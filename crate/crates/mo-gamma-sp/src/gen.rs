//! Seeded instance generators.
//!
//! Instances are layered DAGs with shortcut edges: a source node, `layers`
//! intermediate layers of `layer_width` nodes each, and a target node. Every
//! node in a layer has at least one edge to the next layer and every node is
//! reachable from the previous layer, so a source-target path always exists.
//! On top of the topology the families differ only in how edge costs are
//! drawn; all draws are integers from a ChaCha8 stream seeded with
//! `GenSpec::seed`, so the same spec always produces a bit-identical
//! instance.
//!
//! Families (`x` is the population uncertainty in percent):
//! * `random`: `objectives` columns, nominal uniform in `1..=100`, interval
//!   length uniform in `0..=floor(x * nominal / 100)`;
//! * `population-style`: two objectives. Travel time with interval lengths
//!   up to 50% of the nominal value, population with interval lengths up to
//!   `x%` of the nominal value;
//! * `three-objective`: population-style plus a second, independently drawn
//!   population column with the same `x`;
//! * `oi`: population-style, except the population column copies the travel
//!   time interval lengths, which yields an objective-independent element
//!   order (all gammas must be equal);
//! * `correlated`: travel time as above (intervals up to `x%`), second
//!   objective obtained by scaling nominal and interval with independent
//!   per-edge factors uniform in `[0.9, 1.1]`, rounded half-up.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Cost, Graph, Instance, ModelError, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("degenerate topology: layers and layer_width must be positive")]
    DegenerateTopology,
    #[error("family {family} uses {expected} objectives, but gamma has {got} entries")]
    GammaArity {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("family oi requires equal gamma values, got {0:?}")]
    UnequalGamma(Vec<usize>),
    #[error("random family requires at least one objective")]
    NoObjectives,
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    PopulationStyle,
    ObjectiveIndependent,
    Correlated,
    ThreeObjective,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::PopulationStyle => "population-style",
            Family::ObjectiveIndependent => "oi",
            Family::Correlated => "correlated",
            Family::ThreeObjective => "three-objective",
        }
    }

    /// Number of objectives the family produces; `None` means the spec's
    /// `objectives` field decides.
    pub fn fixed_objectives(&self) -> Option<usize> {
        match self {
            Family::Random => None,
            Family::PopulationStyle | Family::ObjectiveIndependent | Family::Correlated => Some(2),
            Family::ThreeObjective => Some(3),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "random" => Ok(Family::Random),
            "population-style" => Ok(Family::PopulationStyle),
            "oi" => Ok(Family::ObjectiveIndependent),
            "correlated" => Ok(Family::Correlated),
            "three-objective" => Ok(Family::ThreeObjective),
            other => Err(GenError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub seed: u64,
    pub layers: usize,
    pub layer_width: usize,
    /// Additional forward shortcut edges to attempt on top of the layered
    /// skeleton.
    pub extra_edges: usize,
    /// Objective count for the `random` family; other families fix it.
    pub objectives: usize,
    /// One gamma per objective; values above the edge count are clamped.
    pub gamma: Vec<usize>,
    /// Population uncertainty `x` in percent.
    pub population_uncertainty: u32,
    pub family: Family,
}

impl GenSpec {
    /// A short deterministic identifier used in result files.
    pub fn id(&self) -> String {
        format!(
            "{}-s{}-l{}x{}-e{}-x{}-g{}",
            self.family,
            self.seed,
            self.layers,
            self.layer_width,
            self.extra_edges,
            self.population_uncertainty,
            self.gamma
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join("_")
        )
    }
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    if spec.layers == 0 || spec.layer_width == 0 {
        return Err(GenError::DegenerateTopology);
    }
    let k = match spec.family.fixed_objectives() {
        Some(k) => k,
        None => {
            if spec.objectives == 0 {
                return Err(GenError::NoObjectives);
            }
            spec.objectives
        }
    };
    if spec.gamma.len() != k {
        return Err(GenError::GammaArity {
            family: spec.family,
            expected: k,
            got: spec.gamma.len(),
        });
    }
    if spec.family == Family::ObjectiveIndependent
        && spec.gamma.windows(2).any(|w| w[0] != w[1])
    {
        return Err(GenError::UnequalGamma(spec.gamma.clone()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = build_topology(spec, &mut rng);
    let node_count = 2 + spec.layers * spec.layer_width;
    let graph = Graph::new(node_count, edges)?;
    let m = graph.edge_count();

    let x = spec.population_uncertainty as Cost;
    let mut nominal: Vec<Vec<Cost>> = Vec::with_capacity(m);
    let mut delta: Vec<Vec<Cost>> = Vec::with_capacity(m);
    for _ in 0..m {
        let (nom, del) = match spec.family {
            Family::Random => {
                let mut nom = Vec::with_capacity(k);
                let mut del = Vec::with_capacity(k);
                for _ in 0..k {
                    let c = rng.gen_range(1..=100);
                    nom.push(c);
                    del.push(rng.gen_range(0..=x * c / 100));
                }
                (nom, del)
            }
            Family::PopulationStyle => {
                let (tc, td) = draw_time(&mut rng);
                let (pc, pd) = draw_population(&mut rng, x);
                (vec![tc, pc], vec![td, pd])
            }
            Family::ThreeObjective => {
                let (tc, td) = draw_time(&mut rng);
                let (pc, pd) = draw_population(&mut rng, x);
                let (qc, qd) = draw_population(&mut rng, x);
                (vec![tc, pc, qc], vec![td, pd, qd])
            }
            Family::ObjectiveIndependent => {
                let (tc, td) = draw_time(&mut rng);
                let pc = rng.gen_range(1..=100);
                // Population intervals copy the travel time intervals.
                (vec![tc, pc], vec![td, td])
            }
            Family::Correlated => {
                let tc = rng.gen_range(1..=100);
                let td = rng.gen_range(0..=x * tc / 100);
                let nom_factor: Cost = rng.gen_range(90..=110);
                let del_factor: Cost = rng.gen_range(90..=110);
                let sc = round_half_up_div100(tc * nom_factor);
                let sd = round_half_up_div100(td * del_factor);
                (vec![tc, sc], vec![td, sd])
            }
        };
        nominal.push(nom);
        delta.push(del);
    }

    let gamma: Vec<usize> = spec.gamma.iter().map(|&g| g.min(m)).collect();
    let target = node_count - 1;
    Ok(Instance::new(graph, nominal, delta, gamma, 0, target)?)
}

/// Round-half-up of `value / 100` for non-negative `value`.
fn round_half_up_div100(value: Cost) -> Cost {
    (value + 50) / 100
}

fn draw_time(rng: &mut ChaCha8Rng) -> (Cost, Cost) {
    let c = rng.gen_range(1..=100);
    (c, rng.gen_range(0..=c / 2))
}

fn draw_population(rng: &mut ChaCha8Rng, x: Cost) -> (Cost, Cost) {
    let c = rng.gen_range(1..=100);
    (c, rng.gen_range(0..=x * c / 100))
}

/// Levels: `{source}`, `layers` layers of `layer_width` nodes, `{target}`.
/// Consecutive levels are connected with random bipartite edges covering
/// both sides, then `extra_edges` forward shortcuts are attempted.
fn build_topology(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let level = |j: usize| -> Vec<NodeId> {
        if j == 0 {
            vec![0]
        } else if j == spec.layers + 1 {
            vec![1 + spec.layers * spec.layer_width]
        } else {
            let base = 1 + (j - 1) * spec.layer_width;
            (base..base + spec.layer_width).collect()
        }
    };

    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    let push = |edges: &mut Vec<(NodeId, NodeId)>,
                    present: &mut std::collections::HashSet<(NodeId, NodeId)>,
                    tail: NodeId,
                    head: NodeId| {
        if tail != head && present.insert((tail, head)) {
            edges.push((tail, head));
        }
    };

    for j in 0..=spec.layers {
        let from = level(j);
        let to = level(j + 1);
        for &u in &from {
            // At least one forward edge per node; each candidate joins with
            // probability 1/2.
            let first = to[rng.gen_range(0..to.len())];
            push(&mut edges, &mut present, u, first);
            for &v in &to {
                if rng.gen_bool(0.5) {
                    push(&mut edges, &mut present, u, v);
                }
            }
        }
        for &v in &to {
            if !edges.iter().any(|&(_, h)| h == v) {
                let u = from[rng.gen_range(0..from.len())];
                push(&mut edges, &mut present, u, v);
            }
        }
    }

    for _ in 0..spec.extra_edges {
        let j = rng.gen_range(0..=spec.layers);
        let j2 = rng.gen_range(j + 1..=spec.layers + 1);
        let from = level(j);
        let to = level(j2);
        let u = from[rng.gen_range(0..from.len())];
        let v = to[rng.gen_range(0..to.len())];
        push(&mut edges, &mut present, u, v);
    }
    edges
}
