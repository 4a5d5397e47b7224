//! Classic tree edit distance with the key-root forest program.
//!
//! Nodes are numbered in postorder. For every pair of key roots `(i1, j1)`,
//! taken in increasing order, a scratch `forestdist` table over
//! `l(i1)..=i1` x `l(j1)..=j1` is filled. Entries where both current nodes
//! sit on the leftmost paths of `i1` and `j1` are whole-subtree distances and
//! are stored in the permanent `treedist` table; other entries read
//! `treedist` for subtrees finished by earlier key-root pairs.

use crate::cost::{sat_add, CostModel, Rational, Weights};
use crate::error::Result;
use crate::mapping::{EditMapping, Model};
use crate::tree::{LabeledTree, Traversal};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassicCounters {
    /// `forestdist` entries written, including the empty-forest row and column.
    pub forest_cells: u64,
    /// Key-root pairs processed.
    pub tree_pairs: u64,
}

#[derive(Debug, Clone)]
pub struct ClassicOutcome {
    pub distance: Rational,
    pub mapping: EditMapping,
    pub counters: ClassicCounters,
}

/// Postorder arrays for one tree, 1-based.
#[derive(Debug, Clone)]
struct Post {
    l: Vec<usize>,
    key_roots: Vec<usize>,
    // Preorder node id of each ordinal.
    node: Vec<usize>,
}

impl Post {
    fn new(tree: &LabeledTree) -> Self {
        let idx = tree.index(Traversal::Postorder);
        let n = idx.len();
        let mut l = vec![0; n + 1];
        let mut node = vec![0; n + 1];
        for i in 1..=n {
            l[i] = idx.l(i);
            node[i] = idx.node_at(i);
        }
        Post {
            l,
            key_roots: idx.key_roots().to_vec(),
            node,
        }
    }

    fn len(&self) -> usize {
        self.l.len() - 1
    }
}

/// State of a completed run: the `treedist` table and the counters.
pub struct ClassicDp {
    p1: Post,
    p2: Post,
    weights: Weights,
    treedist: Vec<i64>,
    scratch: Vec<i64>,
    counters: ClassicCounters,
}

impl ClassicDp {
    pub fn run(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<Self> {
        let (p1, p2) = (Post::new(t1), Post::new(t2));
        let labels1: Vec<&str> = (1..=p1.len()).map(|i| t1.label(p1.node[i])).collect();
        let labels2: Vec<&str> = (1..=p2.len()).map(|j| t2.label(p2.node[j])).collect();
        let weights = model.weights(labels1, labels2)?;
        let (m, n) = (p1.len(), p2.len());
        let mut dp = ClassicDp {
            treedist: vec![0; (m + 1) * (n + 1)],
            scratch: vec![0; (m + 1) * (n + 1)],
            p1,
            p2,
            weights,
            counters: ClassicCounters::default(),
        };
        let kr1 = dp.p1.key_roots.clone();
        let kr2 = dp.p2.key_roots.clone();
        for &i1 in &kr1 {
            for &j1 in &kr2 {
                dp.forest_dist(i1, j1);
                dp.counters.tree_pairs += 1;
            }
        }
        Ok(dp)
    }

    #[inline]
    fn del(&self, i: usize) -> i64 {
        self.weights.delete[i - 1]
    }

    #[inline]
    fn ins(&self, j: usize) -> i64 {
        self.weights.insert[j - 1]
    }

    #[inline]
    fn td(&self, i: usize, j: usize) -> i64 {
        self.treedist[i * (self.p2.len() + 1) + j]
    }

    /// Fills `scratch` for the subtrees at `i1` and `j1`. Row `x` stands for
    /// the forest `l(i1)..=l(i1)+x-1`, row 0 for the empty forest.
    fn forest_dist(&mut self, i1: usize, j1: usize) {
        let (li, lj) = (self.p1.l[i1], self.p2.l[j1]);
        let rows = i1 - li + 2;
        let cols = j1 - lj + 2;
        let stride = self.p2.len() + 1;
        let at = |x: usize, y: usize| x * stride + y;
        self.scratch[at(0, 0)] = 0;
        for x in 1..rows {
            self.scratch[at(x, 0)] = self.scratch[at(x - 1, 0)] + self.del(li + x - 1);
        }
        for y in 1..cols {
            self.scratch[at(0, y)] = self.scratch[at(0, y - 1)] + self.ins(lj + y - 1);
        }
        for x in 1..rows {
            let i = li + x - 1;
            let del = self.del(i);
            let li_i = self.p1.l[i];
            for y in 1..cols {
                let j = lj + y - 1;
                let skip = (self.scratch[at(x - 1, y)] + del).min(self.scratch[at(x, y - 1)] + self.ins(j));
                let v = if li_i == li && self.p2.l[j] == lj {
                    let v = skip.min(self.scratch[at(x - 1, y - 1)] + self.weights.relabel(i - 1, j - 1));
                    self.treedist[i * stride + j] = v;
                    v
                } else {
                    skip.min(sat_add(self.scratch[at(li_i - li, self.p2.l[j] - lj)], self.td(i, j)))
                };
                self.scratch[at(x, y)] = v;
            }
        }
        self.counters.forest_cells += (rows * cols) as u64;
    }

    pub fn counters(&self) -> ClassicCounters {
        self.counters
    }

    pub fn distance(&self) -> Rational {
        self.weights.to_rational(self.td(self.p1.len(), self.p2.len()))
    }

    /// Stored distance between the subtrees at postorder ordinals `i` and `j`.
    pub fn treedist(&self, i: usize, j: usize) -> Rational {
        self.weights.to_rational(self.td(i, j))
    }

    /// Optimal mapping as preorder node-id pairs. Ties prefer a match, then
    /// a deletion from the first tree, then an insertion into the second.
    pub fn mapping(&mut self) -> EditMapping {
        let saved = self.counters;
        let stride = self.p2.len() + 1;
        let mut pairs = Vec::new();
        let mut todo = vec![(self.p1.len(), self.p2.len())];
        while let Some((i1, j1)) = todo.pop() {
            self.forest_dist(i1, j1);
            let (li, lj) = (self.p1.l[i1], self.p2.l[j1]);
            let at = |x: usize, y: usize| x * stride + y;
            let (mut x, mut y) = (i1 - li + 1, j1 - lj + 1);
            while x > 0 || y > 0 {
                if x == 0 {
                    y -= 1;
                    continue;
                }
                if y == 0 {
                    x -= 1;
                    continue;
                }
                let (i, j) = (li + x - 1, lj + y - 1);
                let here = self.scratch[at(x, y)];
                let whole = self.p1.l[i] == li && self.p2.l[j] == lj;
                if whole && here == self.scratch[at(x - 1, y - 1)] + self.weights.relabel(i - 1, j - 1) {
                    pairs.push((self.p1.node[i], self.p2.node[j]));
                    x -= 1;
                    y -= 1;
                } else if !whole
                    && here == sat_add(self.scratch[at(self.p1.l[i] - li, self.p2.l[j] - lj)], self.td(i, j))
                {
                    todo.push((i, j));
                    x = self.p1.l[i] - li;
                    y = self.p2.l[j] - lj;
                } else if here == self.scratch[at(x - 1, y)] + self.del(i) {
                    x -= 1;
                } else {
                    debug_assert_eq!(here, self.scratch[at(x, y - 1)] + self.ins(j));
                    y -= 1;
                }
            }
        }
        self.counters = saved;
        EditMapping::new(Model::Classic, pairs)
    }
}

/// Distance, an optimal mapping and counters.
pub fn tree_distance(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<ClassicOutcome> {
    let mut dp = ClassicDp::run(t1, t2, model)?;
    let counters = dp.counters();
    Ok(ClassicOutcome {
        distance: dp.distance(),
        mapping: dp.mapping(),
        counters,
    })
}

/// Distance only.
pub fn tree_distance_value(t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<Rational> {
    Ok(ClassicDp::run(t1, t2, model)?.distance())
}

/// `4 m n min(depth1, leaves1) min(depth2, leaves2)`.
pub fn cell_bound(t1: &LabeledTree, t2: &LabeledTree) -> u64 {
    let f = |t: &LabeledTree| t.depth().min(t.leaf_count()) as u64;
    4 * t1.len() as u64 * t2.len() as u64 * f(t1) * f(t2)
}

/// Checks the cell bound and that exactly `|KR1| |KR2|` key-root pairs ran.
pub fn verify_complexity(t1: &LabeledTree, t2: &LabeledTree, counters: &ClassicCounters) -> bool {
    let kr = |t: &LabeledTree| t.index(Traversal::Postorder).key_roots().len() as u64;
    counters.forest_cells <= cell_bound(t1, t2) && counters.tree_pairs == kr(t1) * kr(t2)
}
