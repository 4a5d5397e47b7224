//! Complete-subtree gap distance: every unmatched node takes its whole
//! subtree with it, and each such subtree of `k` nodes costs `a + b k`.
//! Any arity is accepted.

use crate::cost::{CostModel, Rational};
use crate::error::Result;
use crate::forest::{self, GapDp, GapRule};
use crate::tree::LabeledTree;

pub use crate::forest::{GapCounters, GapDpTables, GapOutcome};

/// Distance, an optimal mapping (whose unmatched nodes form complete
/// subtrees) and work counters.
pub fn gap_distance_subtree(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<GapOutcome> {
    forest::solve(t1, t2, model, GapRule::CompleteSubtree)
}

pub fn gap_distance_subtree_value(
    t1: &LabeledTree,
    t2: &LabeledTree,
    model: &CostModel,
) -> Result<(Rational, GapCounters)> {
    forest::distance_only(t1, t2, model, GapRule::CompleteSubtree)
}

/// Tables for the top anchor pair; see [`crate::gap_general::top_tables`].
pub fn top_tables(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<GapDpTables> {
    Ok(GapDp::new(t1, t2, model, GapRule::CompleteSubtree)?.run())
}

/// Ceiling on `counters.cells`: `4 m² n²`.
pub fn cell_bound(m: usize, n: usize) -> u64 {
    let (m, n) = (m as u64, n as u64);
    4 * m * m * n * n
}
