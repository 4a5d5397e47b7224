//! Shared dynamic program for the two gap distances.
//!
//! Nodes are numbered in preorder, `1..=m` and `1..=n`; ordinal 0 is a
//! virtual anchor sitting above each root. For every anchor pair `(u, w)`
//! the program fills tables over the suffix forests `T1[i..r(u)]` and
//! `T2[j..r(w)]` with `i` in `u+1..=r(u)+1` (the last value is the empty
//! forest). A preorder suffix inside a subtree is closed under descendants,
//! so it is a forest whose leftmost root is `i`.
//!
//! With the leftmost roots `i` and `j` in hand, either `i` is a gap point,
//! `j` is a gap point, or `i` is matched to `j`; in the last case the
//! subtrees pair up and the rest of both forests is independent. A gap point
//! whose parent is the anchor opens a gap (`a + b`); any other gap point in
//! the forest has a parent that was itself a gap point, so it extends one
//! (`b`). That parent test is the only place the anchor enters, which is why
//! tables are per anchor pair.
//!
//! Under the complete-subtree rule a gap point takes its whole subtree with
//! it, so the forest advances from `i` to `r(i) + 1` for `a + b size(i)`.

use crate::cost::{sat_add, Cost, CostModel, Rational, Weights, INF};
use crate::error::Result;
use crate::mapping::{EditMapping, Model};
use crate::tree::LabeledTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GapRule {
    Connected,
    CompleteSubtree,
}

/// Work done by one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GapCounters {
    /// Recurrence evaluations with both subforests nonempty.
    pub cells: u64,
    /// Table entries with at least one empty subforest.
    pub boundary_cells: u64,
    /// Anchor pairs whose tables were filled.
    pub anchor_pairs: u64,
}

#[derive(Debug, Clone)]
pub struct GapOutcome {
    pub distance: Rational,
    pub mapping: EditMapping,
    pub counters: GapCounters,
}

/// Preorder bookkeeping for one tree, with ordinal 0 as the virtual anchor.
#[derive(Debug, Clone)]
struct Side {
    parent: Vec<usize>,
    // r[i]: last ordinal of the subtree at i; r[0] = len.
    r: Vec<usize>,
}

impl Side {
    fn new(tree: &LabeledTree) -> Self {
        let n = tree.len();
        let mut parent = vec![0; n + 1];
        let mut r = vec![n; n + 1];
        for v in 0..n {
            parent[v + 1] = tree.parent(v).map_or(0, |p| p + 1);
            r[v + 1] = v + tree.subtree_size(v);
        }
        Side { parent, r }
    }

    fn len(&self) -> usize {
        self.r.len() - 1
    }
}

/// Tables for one anchor pair, addressed by the preorder ordinal where each
/// suffix forest starts (`r(anchor) + 1` for the empty forest).
#[derive(Debug, Clone, Default)]
pub struct GapDpTables {
    anchors: (usize, usize),
    width: usize,
    scale: i64,
    matched: Vec<i64>,
    gap_first: Vec<i64>,
    gap_second: Vec<i64>,
    best: Vec<i64>,
}

impl GapDpTables {
    fn slot(&self, i: usize, j: usize) -> usize {
        (i - self.anchors.0 - 1) * self.width + (j - self.anchors.1 - 1)
    }

    fn cost(&self, v: i64) -> Cost {
        if v >= INF {
            Cost::Infinite
        } else {
            Cost::Finite(Rational::new(v, self.scale))
        }
    }

    pub fn anchors(&self) -> (usize, usize) {
        self.anchors
    }

    /// Best cost of the two forests with the leftmost roots matched to each
    /// other (0 when both forests are empty).
    pub fn matched(&self, i: usize, j: usize) -> Cost {
        self.cost(self.matched[self.slot(i, j)])
    }

    /// Best cost with the leftmost root of the first forest a gap point.
    pub fn gap_first(&self, i: usize, j: usize) -> Cost {
        self.cost(self.gap_first[self.slot(i, j)])
    }

    /// Best cost with the leftmost root of the second forest a gap point.
    pub fn gap_second(&self, i: usize, j: usize) -> Cost {
        self.cost(self.gap_second[self.slot(i, j)])
    }

    /// Distance between the two suffix forests.
    pub fn best(&self, i: usize, j: usize) -> Cost {
        self.cost(self.best[self.slot(i, j)])
    }
}

pub(crate) struct GapDp {
    rule: GapRule,
    weights: Weights,
    t1: Side,
    t2: Side,
    // Distance between the child forests of i and j, (m + 1) x (n + 1).
    children_dist: Vec<i64>,
    scratch: GapDpTables,
    counters: GapCounters,
}

impl GapDp {
    pub fn new(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel, rule: GapRule) -> Result<Self> {
        let weights = model.weights(t1.labels(), t2.labels())?;
        let (m, n) = (t1.len(), t2.len());
        let scale = weights.scale;
        Ok(GapDp {
            rule,
            weights,
            t1: Side::new(t1),
            t2: Side::new(t2),
            children_dist: vec![INF; (m + 1) * (n + 1)],
            scratch: GapDpTables {
                anchors: (0, 0),
                width: 0,
                scale,
                matched: Vec::new(),
                gap_first: Vec::new(),
                gap_second: Vec::new(),
                best: Vec::new(),
            },
            counters: GapCounters::default(),
        })
    }

    #[inline]
    fn child_dist(&self, i: usize, j: usize) -> i64 {
        self.children_dist[i * (self.t2.len() + 1) + j]
    }

    /// Next forest start after `i` becomes a gap point, and the cost charged.
    #[inline]
    fn step(rule: GapRule, side: &Side, w: &Weights, anchor: usize, i: usize) -> (usize, i64) {
        match rule {
            GapRule::Connected => {
                let opens = side.parent[i] == anchor;
                (i + 1, if opens { w.open + w.extend } else { w.extend })
            }
            GapRule::CompleteSubtree => {
                // Skipping i + 1..=r(i) removes exactly the descendants of i.
                let size = side.r[i] - i + 1;
                debug_assert!(anchor < i && side.r[i] <= side.r[anchor]);
                (side.r[i] + 1, w.gap(size))
            }
        }
    }

    /// Fills the tables of anchor pair `(u, w)` into the scratch buffers.
    fn fill(&mut self, u: usize, w: usize) {
        let rows = self.t1.r[u] - u + 1;
        let width = self.t2.r[w] - w + 1;
        let mut t = std::mem::take(&mut self.scratch);
        t.anchors = (u, w);
        t.width = width;
        for table in [&mut t.matched, &mut t.gap_first, &mut t.gap_second, &mut t.best] {
            table.clear();
            table.resize(rows * width, INF);
        }
        let (end1, end2) = (self.t1.r[u] + 1, self.t2.r[w] + 1);
        for i in (u + 1..=end1).rev() {
            for j in (w + 1..=end2).rev() {
                let k = (i - u - 1) * width + (j - w - 1);
                if i == end1 && j == end2 {
                    t.matched[k] = 0;
                    t.best[k] = 0;
                    self.counters.boundary_cells += 1;
                    continue;
                }
                if i < end1 {
                    let (next, charge) = Self::step(self.rule, &self.t1, &self.weights, u, i);
                    t.gap_first[k] = sat_add(t.best[(next - u - 1) * width + (j - w - 1)], charge);
                }
                if j < end2 {
                    let (next, charge) = Self::step(self.rule, &self.t2, &self.weights, w, j);
                    t.gap_second[k] = sat_add(t.best[(i - u - 1) * width + (next - w - 1)], charge);
                }
                if i < end1 && j < end2 {
                    let rest = t.best[(self.t1.r[i] - u) * width + (self.t2.r[j] - w)];
                    let inner = sat_add(self.child_dist(i, j), self.weights.relabel(i - 1, j - 1));
                    t.matched[k] = sat_add(inner, rest);
                    self.counters.cells += 1;
                } else {
                    self.counters.boundary_cells += 1;
                }
                t.best[k] = t.matched[k].min(t.gap_first[k]).min(t.gap_second[k]);
            }
        }
        self.counters.anchor_pairs += 1;
        self.scratch = t;
    }

    fn tables(&mut self, u: usize, w: usize) -> GapDpTables {
        self.fill(u, w);
        self.scratch.clone()
    }

    /// Fills every anchor pair, deepest first, then the virtual root pair,
    /// and returns the scaled distance.
    pub fn run_distance(&mut self) -> i64 {
        let (m, n) = (self.t1.len(), self.t2.len());
        for u in (1..=m).rev() {
            for w in (1..=n).rev() {
                self.fill(u, w);
                self.children_dist[u * (n + 1) + w] = self.scratch.best[0];
            }
        }
        self.fill(0, 0);
        self.scratch.best[0]
    }

    /// As [`run_distance`](Self::run_distance), returning the top tables.
    pub fn run(&mut self) -> GapDpTables {
        self.run_distance();
        self.scratch.clone()
    }

    /// Optimal mapping, as preorder node-id pairs. Ties prefer a match, then
    /// a gap point in the first tree, then one in the second.
    pub fn traceback(&mut self, top: &GapDpTables) -> Vec<(usize, usize)> {
        let saved = self.counters;
        let mut pairs = Vec::new();
        let mut pending: Vec<Option<GapDpTables>> = vec![Some(top.clone())];
        let mut anchors = vec![(0usize, 0usize)];
        while let Some((u, w)) = anchors.pop() {
            let tables = match pending.pop().flatten() {
                Some(t) => t,
                None => self.tables(u, w),
            };
            let (end1, end2) = (self.t1.r[u] + 1, self.t2.r[w] + 1);
            let width = tables.width;
            let (mut i, mut j) = (u + 1, w + 1);
            while i < end1 || j < end2 {
                let k = (i - u - 1) * width + (j - w - 1);
                let best = tables.best[k];
                if i < end1 && j < end2 && tables.matched[k] == best {
                    pairs.push((i - 1, j - 1));
                    anchors.push((i, j));
                    pending.push(None);
                    i = self.t1.r[i] + 1;
                    j = self.t2.r[j] + 1;
                } else if i < end1 && tables.gap_first[k] == best {
                    i = Self::step(self.rule, &self.t1, &self.weights, u, i).0;
                } else {
                    debug_assert_eq!(tables.gap_second[k], best);
                    j = Self::step(self.rule, &self.t2, &self.weights, w, j).0;
                }
            }
        }
        self.counters = saved;
        pairs.sort_unstable();
        pairs
    }

    pub fn counters(&self) -> GapCounters {
        self.counters
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }
}

pub(crate) fn solve(
    t1: &LabeledTree,
    t2: &LabeledTree,
    model: &CostModel,
    rule: GapRule,
) -> Result<GapOutcome> {
    let mut dp = GapDp::new(t1, t2, model, rule)?;
    let top = dp.run();
    let counters = dp.counters();
    let distance = dp.weights().to_rational(top.best[0]);
    let pairs = dp.traceback(&top);
    let kind = match rule {
        GapRule::Connected => Model::General,
        GapRule::CompleteSubtree => Model::Subtree,
    };
    Ok(GapOutcome {
        distance,
        mapping: EditMapping::new(kind, pairs),
        counters,
    })
}

/// Distance only; skips the traceback.
pub(crate) fn distance_only(
    t1: &LabeledTree,
    t2: &LabeledTree,
    model: &CostModel,
    rule: GapRule,
) -> Result<(Rational, GapCounters)> {
    let mut dp = GapDp::new(t1, t2, model, rule)?;
    let best = dp.run_distance();
    Ok((dp.weights().to_rational(best), dp.counters()))
}
