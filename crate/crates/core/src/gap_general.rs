//! General-gap tree edit distance: unmatched nodes are grouped into maximal
//! edge-connected gaps and a gap of `k` nodes costs `a + b k`.
//!
//! The public entry point accepts binary trees only. The underlying program
//! (see the private `forest` module) does not depend on arity, but the
//! general-gap problem is NP-hard on arbitrary trees and the contract keeps
//! to the binary case.

use crate::cost::{CostModel, Rational};
use crate::error::Result;
use crate::forest::{self, GapDp, GapRule};
use crate::tree::LabeledTree;

pub use crate::forest::{GapCounters, GapDpTables, GapOutcome};

/// Distance, an optimal mapping and work counters.
///
/// # Errors
/// `NotBinary` if either tree has a node with more than two children, or a
/// cost-model error for labels missing from a relabel table.
pub fn gap_distance_general(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<GapOutcome> {
    t1.ensure_binary()?;
    t2.ensure_binary()?;
    forest::solve(t1, t2, model, GapRule::Connected)
}

/// Same as [`gap_distance_general`] without the mapping traceback.
pub fn gap_distance_general_value(
    t1: &LabeledTree,
    t2: &LabeledTree,
    model: &CostModel,
) -> Result<(Rational, GapCounters)> {
    t1.ensure_binary()?;
    t2.ensure_binary()?;
    forest::distance_only(t1, t2, model, GapRule::Connected)
}

/// Tables for the top anchor pair: forests are preorder suffixes of the
/// whole trees, starting at ordinal `i` in `1..=m+1` and `j` in `1..=n+1`.
pub fn top_tables(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<GapDpTables> {
    t1.ensure_binary()?;
    t2.ensure_binary()?;
    Ok(GapDp::new(t1, t2, model, GapRule::Connected)?.run())
}

/// Ceiling on `counters.cells`: `4 (7 + m + n) m² n²`.
pub fn cell_bound(m: usize, n: usize) -> u64 {
    let (m, n) = (m as u64, n as u64);
    4 * (7 + m + n) * m * m * n * n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::mapping::Model;

    fn t(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    fn affine(a: i64, b: i64) -> CostModel {
        CostModel::affine(Rational::from_integer(a), Rational::from_integer(b)).unwrap()
    }

    #[test]
    fn identical_trees_cost_nothing() {
        let x = t("a(b(d,e),c(f))");
        let out = gap_distance_general(&x, &x, &affine(1, 1)).unwrap();
        assert_eq!(out.distance, Rational::from_integer(0));
        assert_eq!(out.mapping.len(), x.len());
        assert!(out.mapping.gaps(&x, false).is_empty());
    }

    #[test]
    fn one_sided_boundary() {
        let x = t("a(b(d),c)");
        let y = t("z");
        let tables = top_tables(&x, &y, &affine(2, 3)).unwrap();
        // Whole first tree against the empty suffix of the second.
        assert_eq!(tables.best(1, 2), Cost::from(2 + 3 * 4));
        assert_eq!(tables.gap_first(1, 2), Cost::from(2 + 3 * 4));
        assert_eq!(tables.matched(1, 2), Cost::Infinite);
        assert_eq!(tables.gap_second(1, 2), Cost::Infinite);
        assert_eq!(tables.gap_first(5, 1), Cost::Infinite);
        assert_eq!(tables.best(5, 2), Cost::ZERO);
    }

    #[test]
    fn siblings_under_a_matched_root_are_two_gaps() {
        // Matching a to a leaves b and c as separate gaps: 2(a + b) = 4.
        // Matching b (or c) to a ties at 1 + (a + 2b); the match on the
        // roots wins the tie.
        let out = gap_distance_general(&t("a(b,c)"), &t("a"), &affine(1, 1)).unwrap();
        assert_eq!(out.distance, Rational::from_integer(4));
        assert_eq!(out.mapping.pairs, vec![(0, 0)]);
    }

    #[test]
    fn ancestor_condition_is_respected() {
        // x and y are siblings on one side and parent/child on the other, so
        // at most one of them can be matched.
        let out = gap_distance_general(&t("r(x,y)"), &t("r(x(y))"), &affine(0, 1)).unwrap();
        assert_eq!(out.distance, Rational::from_integer(2));
    }

    #[test]
    fn mapping_reprices_to_distance() {
        let (x, y) = (t("a(b(c,d),e(f))"), t("a(c(d),e(b,f))"));
        let model = affine(2, 1);
        let out = gap_distance_general(&x, &y, &model).unwrap();
        assert_eq!(out.mapping.model, Model::General);
        assert!(out.mapping.check(&x, &y).is_ok());
        assert_eq!(out.mapping.price(&x, &y, &model).unwrap(), Cost::Finite(out.distance));
    }

    #[test]
    fn rejects_non_binary() {
        let err = gap_distance_general(&t("a(b,c(d,e,f))"), &t("a"), &affine(1, 1)).unwrap_err();
        assert_eq!(err.to_string(), "NotBinary: node c has 3 children");
    }

    #[test]
    fn counters_stay_under_bound() {
        let (x, y) = (t("a(b(c,d),e(f,g(h)))"), t("a(b,c(d(e)))"));
        let out = gap_distance_general(&x, &y, &affine(1, 2)).unwrap();
        assert!(out.counters.cells <= cell_bound(x.len(), y.len()));
        assert_eq!(out.counters.anchor_pairs, (x.len() * y.len() + 1) as u64);
        let single = gap_distance_general(&t("a"), &t("b"), &affine(1, 1)).unwrap();
        assert_eq!(single.counters.cells, 1);
    }
}
