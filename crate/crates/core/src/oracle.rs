//! Exhaustive reference: enumerate every valid mapping between two small
//! trees and take the cheapest under the chosen model.
//!
//! Mappings are built by walking the first tree in preorder and giving each
//! node either no partner or a partner after the previous one in the second
//! tree's preorder. A new pair `(u, v)` is kept only if, against every
//! earlier pair `(u', v')`, `u` lies under `u'` exactly when `v` lies under
//! `v'`. Since `u' < u` and `v' < v` in preorder, "not under" means "to the
//! right of", so this single test covers the one-to-one, ancestor and
//! sibling conditions.

use crate::cost::{sat_add, Cost, CostModel, Weights, INF};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mapping::{EditMapping, Model};
use crate::tree::{LabeledTree, NodeId};

/// Largest tree the oracle accepts unless told otherwise.
pub const DEFAULT_MAX_SIZE: usize = 10;

fn last_descendant(tree: &LabeledTree) -> Vec<usize> {
    (0..tree.len()).map(|v| v + tree.subtree_size(v) - 1).collect()
}

/// Calls `f` once for every valid mapping between `t1` and `t2`, with pairs
/// sorted by both components. No size cap is applied here.
pub fn for_each_mapping(t1: &LabeledTree, t2: &LabeledTree, mut f: impl FnMut(&[(NodeId, NodeId)])) {
    let (r1, r2) = (last_descendant(t1), last_descendant(t2));
    let mut pairs = Vec::with_capacity(t1.len().min(t2.len()));
    extend(0, &r1, &r2, &mut pairs, &mut f);
}

fn extend(
    u: usize,
    r1: &[usize],
    r2: &[usize],
    pairs: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    if u == r1.len() {
        f(pairs);
        return;
    }
    extend(u + 1, r1, r2, pairs, f);
    let first_v = pairs.last().map_or(0, |&(_, v)| v + 1);
    for v in first_v..r2.len() {
        if pairs.iter().all(|&(pu, pv)| (u <= r1[pu]) == (v <= r2[pv])) {
            pairs.push((u, v));
            extend(u + 1, r1, r2, pairs, f);
            pairs.pop();
        }
    }
}

/// Every valid mapping, tagged with `model`.
pub fn enumerate_mappings(t1: &LabeledTree, t2: &LabeledTree, model: Model) -> Result<Vec<EditMapping>> {
    check_cap(t1, t2, DEFAULT_MAX_SIZE)?;
    let mut out = Vec::new();
    for_each_mapping(t1, t2, |p| out.push(EditMapping::new(model, p.to_vec())));
    Ok(out)
}

/// Price of one mapping; `Cost::Infinite` for a subtree-model mapping whose
/// unmatched nodes are not complete subtrees.
pub fn price_mapping(m: &EditMapping, t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<Cost> {
    m.price(t1, t2, model)
}

fn check_cap(t1: &LabeledTree, t2: &LabeledTree, cap: usize) -> Result<()> {
    if t1.len() > cap || t2.len() > cap {
        return Err(Error::SizeCap {
            sizes: (t1.len(), t2.len()),
            cap,
        });
    }
    Ok(())
}

/// All mappings between two tree shapes, with the label-independent parts
/// of their prices precomputed. Reusable across labelings of the shapes.
#[derive(Debug, Clone)]
pub struct MappingCatalog {
    m: usize,
    n: usize,
    pairs: Vec<(u8, u8)>,
    starts: Vec<u32>,
    // Gap components in both trees when unmatched nodes are grouped by edges.
    gaps: Vec<u16>,
    // Every unmatched node has only unmatched descendants, in both trees.
    complete: Vec<bool>,
}

impl MappingCatalog {
    pub fn new(t1: &LabeledTree, t2: &LabeledTree, cap: usize) -> Result<Self> {
        check_cap(t1, t2, cap.min(255))?;
        let mut cat = MappingCatalog {
            m: t1.len(),
            n: t2.len(),
            pairs: Vec::new(),
            starts: vec![0],
            gaps: Vec::new(),
            complete: Vec::new(),
        };
        let mut hit1 = vec![false; t1.len()];
        let mut hit2 = vec![false; t2.len()];
        for_each_mapping(t1, t2, |p| {
            hit1.iter_mut().for_each(|h| *h = false);
            hit2.iter_mut().for_each(|h| *h = false);
            for &(u, v) in p {
                hit1[u] = true;
                hit2[v] = true;
                cat.pairs.push((u as u8, v as u8));
            }
            cat.starts.push(cat.pairs.len() as u32);
            let (g1, c1) = structure(t1, &hit1);
            let (g2, c2) = structure(t2, &hit2);
            cat.gaps.push((g1 + g2) as u16);
            cat.complete.push(c1 && c2);
        });
        Ok(cat)
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn pairs(&self, k: usize) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.pairs[self.starts[k] as usize..self.starts[k + 1] as usize]
            .iter()
            .map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn mapping(&self, k: usize, model: Model) -> EditMapping {
        EditMapping::new(model, self.pairs(k).collect())
    }

    /// Scaled price of mapping `k`, `INF` if infeasible under `which`.
    fn price(&self, k: usize, w: &Weights, which: Model, base: i64) -> i64 {
        let pairs = &self.pairs[self.starts[k] as usize..self.starts[k + 1] as usize];
        match which {
            Model::Classic => pairs.iter().fold(base, |acc, &(u, v)| {
                let (u, v) = (u as usize, v as usize);
                acc + w.relabel(u, v) - w.delete[u] - w.insert[v]
            }),
            Model::General | Model::Subtree => {
                if which == Model::Subtree && !self.complete[k] {
                    return INF;
                }
                let unmatched = (self.m + self.n - 2 * pairs.len()) as i64;
                let gaps = w.open * i64::from(self.gaps[k]) + w.extend * unmatched;
                pairs
                    .iter()
                    .fold(gaps, |acc, &(u, v)| sat_add(acc, w.relabel(u as usize, v as usize)))
            }
        }
    }

    /// Cheapest mapping for trees with the catalog's shapes. Ties go to the
    /// mapping enumerated first.
    pub fn best(
        &self,
        t1: &LabeledTree,
        t2: &LabeledTree,
        model: &CostModel,
        which: Model,
        exec: Execution,
    ) -> Result<OracleResult> {
        debug_assert_eq!((t1.len(), t2.len()), (self.m, self.n));
        let w = model.weights(t1.labels(), t2.labels())?;
        let base = w.delete.iter().sum::<i64>() + w.insert.iter().sum::<i64>();
        const CHUNK: usize = 4096;
        let chunks = self.len().div_ceil(CHUNK);
        let best = exec
            .map_range(chunks, |c| {
                (c * CHUNK..((c + 1) * CHUNK).min(self.len()))
                    .map(|k| (self.price(k, &w, which, base), k))
                    .min()
                    .expect("chunks are nonempty")
            })
            .into_iter()
            .min()
            .expect("the empty mapping always exists");
        Ok(OracleResult {
            distance: w.to_cost(best.0),
            witness: self.mapping(best.1, which),
            mappings: self.len(),
        })
    }

    /// Like [`best`](Self::best) but only the distance, on the calling thread.
    pub fn best_cost(&self, t1: &LabeledTree, t2: &LabeledTree, model: &CostModel, which: Model) -> Result<Cost> {
        let w = model.weights(t1.labels(), t2.labels())?;
        let base = w.delete.iter().sum::<i64>() + w.insert.iter().sum::<i64>();
        let best = (0..self.len()).map(|k| self.price(k, &w, which, base)).min().unwrap_or(INF);
        Ok(w.to_cost(best))
    }
}

/// Number of edge-connected unmatched components, and whether no matched
/// node hangs below an unmatched one.
fn structure(tree: &LabeledTree, hit: &[bool]) -> (usize, bool) {
    let mut gaps = 0;
    let mut complete = true;
    for v in 0..tree.len() {
        let parent_hit = tree.parent(v).map(|p| hit[p]);
        if !hit[v] && parent_hit != Some(false) {
            gaps += 1;
        }
        if hit[v] && parent_hit == Some(false) {
            complete = false;
        }
    }
    (gaps, complete)
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub distance: Cost,
    /// An optimal mapping (the first one enumerated among ties).
    pub witness: EditMapping,
    /// How many mappings were enumerated.
    pub mappings: usize,
}

/// Size cap and scheduling for oracle queries.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub max_size: usize,
    pub execution: Execution,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            max_size: DEFAULT_MAX_SIZE,
            execution: Execution::default(),
        }
    }
}

impl Oracle {
    pub fn distance(&self, t1: &LabeledTree, t2: &LabeledTree, model: &CostModel, which: Model) -> Result<OracleResult> {
        check_cap(t1, t2, self.max_size)?;
        MappingCatalog::new(t1, t2, self.max_size)?.best(t1, t2, model, which, self.execution)
    }
}

/// Minimum mapping cost with the default cap.
pub fn oracle_distance(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel, which: Model) -> Result<OracleResult> {
    Oracle::default().distance(t1, t2, model, which)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Rational;
    use crate::gen;

    fn t(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    fn count(a: &str, b: &str) -> usize {
        let mut k = 0;
        for_each_mapping(&t(a), &t(b), |_| k += 1);
        k
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn hand_counted_enumerations() {
        assert_eq!(count("a", "b"), 2);
        assert_eq!(count("a(b)", "c"), 3);
        let all = enumerate_mappings(&t("a(b)"), &t("c"), Model::Classic).unwrap();
        let pairs: Vec<_> = all.iter().map(|m| m.pairs.clone()).collect();
        assert_eq!(pairs, vec![vec![], vec![(1, 0)], vec![(0, 0)]]);
    }

    #[test]
    fn spine_counts_follow_closed_form() {
        for m in 1..=5 {
            for n in 1..=5 {
                let expected: usize = (0..=m.min(n)).map(|k| binom(m, k) * binom(n, k)).sum();
                let mut k = 0;
                for_each_mapping(&gen::spine(m, "x"), &gen::spine(n, "x"), |_| k += 1);
                assert_eq!(k, expected, "spines {m} and {n}");
            }
        }
    }

    #[test]
    fn matches_subset_filtering() {
        // Independent route: try every subset of V1 x V2 and keep those the
        // checker accepts.
        let trees = gen::shapes(3, None);
        for a in &trees {
            for b in &trees {
                let cells: Vec<(usize, usize)> =
                    (0..a.len()).flat_map(|u| (0..b.len()).map(move |v| (u, v))).collect();
                let mut valid = 0;
                for bits in 0u32..(1 << cells.len()) {
                    let pairs = cells.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &c)| c);
                    if EditMapping::new(Model::Classic, pairs.collect()).check(a, b).is_ok() {
                        valid += 1;
                    }
                }
                let mut seen = Vec::new();
                for_each_mapping(a, b, |p| seen.push(p.to_vec()));
                assert_eq!(seen.len(), valid, "{a} vs {b}");
                seen.sort();
                seen.dedup();
                assert_eq!(seen.len(), valid);
            }
        }
    }

    #[test]
    fn every_mapping_passes_the_checker() {
        for (a, b) in [("a(b(c,d),e)", "a(b,c(d,e))"), ("r(x,y,z)", "r(x(y(z)))")] {
            let (a, b) = (t(a), t(b));
            for_each_mapping(&a, &b, |p| {
                assert!(EditMapping::new(Model::Classic, p.to_vec()).check(&a, &b).is_ok(), "{p:?}");
            });
        }
    }

    #[test]
    fn distances() {
        let unit = CostModel::unit();
        let d = |a: &str, b: &str, model: &CostModel, which| oracle_distance(&t(a), &t(b), model, which).unwrap().distance;
        assert_eq!(d("a(b,c)", "a(b,c)", &unit, Model::Classic), Cost::ZERO);
        assert_eq!(d("a(b,c)", "a(b)", &unit, Model::Classic), Cost::from(1));
        let affine = CostModel::affine(Rational::from_integer(1), Rational::from_integer(1)).unwrap();
        assert_eq!(d("a(b(d,e),c)", "a(c)", &affine, Model::Subtree), Cost::from(4));
        assert_eq!(d("a(b,c)", "a", &affine, Model::General), Cost::from(4));
    }

    #[test]
    fn catalog_prices_agree_with_mapping_price() {
        let (a, b) = (t("a(b(c),d)"), t("b(a,c(d))"));
        let model = CostModel::affine(Rational::new(1, 2), Rational::from_integer(2)).unwrap();
        let cat = MappingCatalog::new(&a, &b, 10).unwrap();
        let w = model.weights(a.labels(), b.labels()).unwrap();
        let base = w.delete.iter().sum::<i64>() + w.insert.iter().sum::<i64>();
        for which in [Model::Classic, Model::General, Model::Subtree] {
            for k in 0..cat.len() {
                let direct = cat.mapping(k, which).price(&a, &b, &model).unwrap();
                assert_eq!(w.to_cost(cat.price(k, &w, which, base)), direct);
            }
        }
    }

    #[test]
    fn size_cap() {
        let big = gen::spine(11, "x");
        let err = oracle_distance(&big, &t("x"), &CostModel::unit(), Model::Classic).unwrap_err();
        assert!(matches!(err, Error::SizeCap { cap: 10, .. }));
        let relaxed = Oracle { max_size: 11, ..Oracle::default() };
        assert!(relaxed.distance(&big, &t("x"), &CostModel::unit(), Model::Classic).is_ok());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (a, b) = (t("a(b(c,d),e(f))"), t("a(c(d),e(b,f),g)"));
        let model = CostModel::affine(Rational::from_integer(1), Rational::from_integer(1)).unwrap();
        for which in [Model::Classic, Model::General, Model::Subtree] {
            let seq = Oracle { execution: Execution::Sequential, ..Oracle::default() };
            let par = Oracle { execution: Execution::Parallel, ..Oracle::default() };
            let (x, y) = (seq.distance(&a, &b, &model, which).unwrap(), par.distance(&a, &b, &model, which).unwrap());
            assert_eq!(x.distance, y.distance);
            assert_eq!(x.witness, y.witness);
        }
    }
}
