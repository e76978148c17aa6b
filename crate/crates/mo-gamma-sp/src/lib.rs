//! Multi-objective shortest paths under cardinality-constrained (Gamma)
//! cost uncertainty.
//!
//! Each edge cost lies in an interval `[nominal, nominal + delta]` per
//! objective, and per objective at most `gamma` edges may deviate from their
//! nominal cost at once. A path is evaluated by its worst case under that
//! uncertainty, and solving means finding a complete set of robust efficient
//! paths: one representative per non-dominated worst-case vector.
//!
//! Two exact solvers are provided, validated against each other and against
//! a brute-force oracle:
//!
//! * [`dsa`] reduces the uncertain problem to a family of deterministic
//!   sum-cost subproblems over a small index grid;
//! * [`bottleneck`] reformulates it as one deterministic problem whose
//!   objective tracks, per original objective, the nominal sum and the
//!   largest interval lengths seen, solved by label setting.
//!
//! See the `book/` directory for a guided tour; its chapters double as the
//! doc-tests of the [`guide`] module.

pub mod bench;
pub mod bottleneck;
pub mod dsa;
pub mod gen;
pub mod guide;
pub mod io;
pub mod label;
pub mod model;
pub mod oracle;

pub use bottleneck::{solve_lsa, LsaReport};
pub use dsa::{solve_general, solve_oi, solve_single, DsaOptions, DsaReport};
pub use model::{
    dominates, pareto_filter, worst_case_cost, Cost, CostVector, EdgeId, Front, Graph, Instance,
    NodeId, Path,
};
pub use oracle::{oracle_front, EnumerationBudget};
