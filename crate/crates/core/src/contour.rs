//! Contour trees of grid terrains and their comparison.
//!
//! A terrain is a grid of heights. Each grid cell is split by its NW-SE
//! diagonal, so vertex `(r, c)` touches its four axis neighbours plus
//! `(r - 1, c - 1)` and `(r + 1, c + 1)`. Ties in height are broken by
//! `(row, col)`, which makes the height function one-to-one.
//!
//! The contour tree is merged from a join tree (superlevel components,
//! swept from the top) and a split tree (sublevel components, swept from the
//! bottom). Regular vertices, with one neighbour above and one below, are
//! then contracted away.

use std::collections::VecDeque;
use std::path::Path;

use rand::Rng;

use crate::cost::{parse_rational, CostModel, Rational};
use crate::error::{Error, Result};
use crate::gap_subtree::{gap_distance_subtree, GapOutcome};
use crate::tree::LabeledTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terrain {
    rows: usize,
    cols: usize,
    heights: Vec<Rational>,
    // rank[v]: position of vertex v in the (height, row, col) order.
    rank: Vec<usize>,
}

impl Terrain {
    /// Row-major heights.
    pub fn new(rows: usize, cols: usize, heights: Vec<Rational>) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::Terrain(format!("terrain must be at least 2x2, got {rows}x{cols}")));
        }
        if heights.len() != rows * cols {
            return Err(Error::Terrain(format!(
                "{} heights for a {rows}x{cols} grid",
                heights.len()
            )));
        }
        let mut order: Vec<usize> = (0..heights.len()).collect();
        order.sort_by(|&a, &b| heights[a].cmp(&heights[b]).then(a.cmp(&b)));
        let mut rank = vec![0; heights.len()];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        Ok(Terrain {
            rows,
            cols,
            heights,
            rank,
        })
    }

    /// Integer heights, one inner vector per row.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Terrain(format!(
                "row {} has {} values, expected {cols}",
                r + 1,
                rows[r].len()
            )));
        }
        let heights = rows.iter().flatten().map(|&h| Rational::from_integer(h)).collect();
        Terrain::new(rows.len(), cols, heights)
    }

    /// Comma-separated rows of numbers (integers, `n/d` or decimals).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Terrain(e.to_string()))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let row = record
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    parse_rational(cell).map_err(|_| {
                        Error::Terrain(format!("row {} column {}: {cell:?} is not a number", r + 1, c + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Terrain(format!(
                        "row {} has {} values, expected {}",
                        rows.len() + 1,
                        row.len(),
                        first.len()
                    )));
                }
            }
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        Terrain::new(rows.len(), cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn height(&self, r: usize, c: usize) -> Rational {
        self.heights[r * self.cols + c]
    }

    fn len(&self) -> usize {
        self.heights.len()
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = ((v / self.cols) as isize, (v % self.cols) as isize);
        [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1)]
            .into_iter()
            .filter_map(move |(dr, dc)| {
                let (nr, nc) = (r + dr, c + dc);
                (nr >= 0 && nc >= 0 && (nr as usize) < self.rows && (nc as usize) < self.cols)
                    .then(|| nr as usize * self.cols + nc as usize)
            })
    }

    fn below(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// Reads a terrain from a CSV file.
pub fn load_terrain(path: impl AsRef<Path>) -> Result<Terrain> {
    Terrain::from_csv(&std::fs::read_to_string(path)?)
}

/// Number of local minima and local maxima, by direct inspection of each
/// vertex's neighbours.
pub fn count_local_extrema(t: &Terrain) -> (usize, usize) {
    let (mut minima, mut maxima) = (0, 0);
    for v in 0..t.len() {
        if t.neighbours(v).all(|u| t.below(v, u)) {
            minima += 1;
        }
        if t.neighbours(v).all(|u| t.below(u, v)) {
            maxima += 1;
        }
    }
    (minima, maxima)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Min,
    Max,
    /// Two or more contours meet here on the way up.
    NegativeSaddle,
    /// A contour breaks in two or more here on the way up.
    PositiveSaddle,
    /// Both at once (only on degenerate neighbourhoods).
    Saddle,
}

impl CriticalKind {
    pub fn name(self) -> &'static str {
        match self {
            CriticalKind::Min => "min",
            CriticalKind::Max => "max",
            CriticalKind::NegativeSaddle => "nsaddle",
            CriticalKind::PositiveSaddle => "psaddle",
            CriticalKind::Saddle => "saddle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourNode {
    pub row: usize,
    pub col: usize,
    pub height: Rational,
    pub kind: CriticalKind,
}

/// Contour tree rooted at the global minimum. `nodes` are in preorder of
/// that rooting with children ordered by the lowest vertex in their subtree;
/// `parent[k]` is the parent of node `k`.
#[derive(Debug, Clone)]
pub struct ContourTree {
    pub nodes: Vec<ContourNode>,
    pub parent: Vec<Option<usize>>,
}

impl ContourTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|p| (p, k)))
            .collect()
    }

    pub fn degree(&self, k: usize) -> usize {
        self.parent.iter().filter(|&&p| p == Some(k)).count() + usize::from(self.parent[k].is_some())
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.len()).filter(|&k| self.degree(k) == 1).count()
    }

    fn tree_with(&self, label: impl Fn(&ContourNode) -> String) -> LabeledTree {
        LabeledTree::from_parents(self.nodes.iter().map(label), &self.parent)
            .expect("contour tree is a rooted tree with valid labels")
    }

    /// Labels `<kind>_<bucket>`, e.g. `max_7`.
    pub fn typed_tree(&self, quantum: Rational) -> LabeledTree {
        self.tree_with(|n| format!("{}_{}", n.kind.name(), bucket(n.height, quantum)))
    }

    /// Labels `b<bucket>`: only the quantized height, used for comparison.
    pub fn bucket_tree(&self, quantum: Rational) -> LabeledTree {
        self.tree_with(|n| format!("b{}", bucket(n.height, quantum)))
    }
}

/// `floor(h / quantum)` spelled with label characters only (`neg3` for -3).
pub fn bucket(height: Rational, quantum: Rational) -> String {
    let b = (height / quantum).floor().to_integer();
    if b < 0 {
        format!("neg{}", -b)
    } else {
        b.to_string()
    }
}

/// Sweeps vertices in `order`, uniting each with its already-swept
/// neighbours. Returns, per vertex, the arcs back to the components it
/// joins (each represented by its most recently swept vertex) and the arc
/// forward to the vertex that later absorbed its component.
fn sweep(t: &Terrain, order: &[usize]) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let n = t.len();
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut seen = vec![false; n];
    // Most recently swept vertex of each component, stored at its root.
    let mut tip = vec![0; n];
    let mut before: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut after: Vec<Option<usize>> = vec![None; n];
    for &v in order {
        seen[v] = true;
        tip[v] = v;
        for u in t.neighbours(v) {
            if !seen[u] {
                continue;
            }
            let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
            if ru == rv {
                continue;
            }
            let w = tip[ru];
            before[v].push(w);
            after[w] = Some(v);
            uf[ru] = rv;
            tip[rv] = v;
        }
    }
    (before, after)
}

/// Unrooted contour tree over all grid vertices, as adjacency lists.
fn full_contour_tree(t: &Terrain) -> Vec<Vec<usize>> {
    let n = t.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| t.rank[v]);
    // Split tree from the bottom: down arcs to the components merging at v.
    let (mut st_down, mut st_up) = sweep(t, &order);
    order.reverse();
    // Join tree from the top: up arcs to the components merging at v.
    let (mut jt_up, mut jt_down) = sweep(t, &order);

    let is_leaf = |jt_up: &[Vec<usize>], st_down: &[Vec<usize>], v: usize| jt_up[v].len() + st_down[v].len() == 1;
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| is_leaf(&jt_up, &st_down, v)).collect();
    let mut queued = vec![false; n];
    for &v in &queue {
        queued[v] = true;
    }
    let mut removed = vec![false; n];
    let mut remaining = n;
    let mut adj = vec![Vec::new(); n];
    while remaining > 1 {
        let x = queue.pop_front().expect("a tree with two or more nodes has a leaf");
        queued[x] = false;
        if removed[x] || !is_leaf(&jt_up, &st_down, x) {
            continue;
        }
        let mut touched = Vec::with_capacity(3);
        if jt_up[x].is_empty() {
            // Upper leaf: its neighbour is the next vertex down in the join tree.
            let y = jt_down[x].expect("an upper leaf is not the global minimum");
            adj[x].push(y);
            adj[y].push(x);
            jt_up[y].retain(|&w| w != x);
            touched.push(y);
            // Splice x out of the split tree.
            let d = st_down[x][0];
            let u = st_up[x];
            st_up[d] = u;
            if let Some(u) = u {
                for w in st_down[u].iter_mut().filter(|w| **w == x) {
                    *w = d;
                }
                touched.push(u);
            }
            touched.push(d);
        } else {
            // Lower leaf: symmetric, with the split tree giving the neighbour.
            let y = st_up[x].expect("a lower leaf is not the global maximum");
            adj[x].push(y);
            adj[y].push(x);
            st_down[y].retain(|&w| w != x);
            touched.push(y);
            let u = jt_up[x][0];
            let d = jt_down[x];
            jt_down[u] = d;
            if let Some(d) = d {
                for w in jt_up[d].iter_mut().filter(|w| **w == x) {
                    *w = u;
                }
                touched.push(d);
            }
            touched.push(u);
        }
        removed[x] = true;
        remaining -= 1;
        for v in touched {
            if !removed[v] && !queued[v] && is_leaf(&jt_up, &st_down, v) {
                queued[v] = true;
                queue.push_back(v);
            }
        }
    }
    adj
}

/// Builds the contour tree and roots it at the global minimum.
pub fn build_contour_tree(t: &Terrain) -> ContourTree {
    let adj = full_contour_tree(t);
    let n = t.len();
    let up = |v: usize| adj[v].iter().filter(|&&u| t.below(v, u)).count();
    let down = |v: usize| adj[v].len() - up(v);

    // Contract regular vertices: walk each critical vertex's arcs to the next
    // critical vertex.
    let critical: Vec<bool> = (0..n).map(|v| !(up(v) == 1 && down(v) == 1)).collect();
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| critical[v]) {
        for &first in &adj[v] {
            let (mut prev, mut cur) = (v, first);
            while !critical[cur] {
                let next = *adj[cur].iter().find(|&&w| w != prev).expect("regular vertex has two arcs");
                prev = cur;
                cur = next;
            }
            links[v].push(cur);
        }
    }

    let root = (0..n).min_by_key(|&v| t.rank[v]).expect("terrain is nonempty");
    // Parent links and post-order from an explicit stack.
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::new();
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &links[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut lowest: Vec<usize> = (0..n).map(|v| t.rank[v]).collect();
    for &v in order.iter().rev() {
        if v != root {
            lowest[parent[v]] = lowest[parent[v]].min(lowest[v]);
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &order {
        if v != root {
            children[parent[v]].push(v);
        }
    }
    for kids in &mut children {
        kids.sort_by_key(|&w| lowest[w]);
    }

    let mut nodes = Vec::new();
    let mut parents = Vec::new();
    let mut stack = vec![(root, None)];
    while let Some((v, p)) = stack.pop() {
        let k = nodes.len();
        let (u, d) = (up(v), down(v));
        let kind = match (d, u) {
            (0, _) => CriticalKind::Min,
            (_, 0) => CriticalKind::Max,
            (d, u) if d >= 2 && u >= 2 => CriticalKind::Saddle,
            (d, _) if d >= 2 => CriticalKind::NegativeSaddle,
            _ => CriticalKind::PositiveSaddle,
        };
        nodes.push(ContourNode {
            row: v / t.cols,
            col: v % t.cols,
            height: t.heights[v],
            kind,
        });
        parents.push(p);
        for &w in children[v].iter().rev() {
            stack.push((w, Some(k)));
        }
    }
    ContourTree { nodes, parent: parents }
}

/// Complete-subtree gap distance between the contour trees of two terrains,
/// with nodes labeled by height bucket of width `quantum`.
pub fn compare_terrains(t1: &Terrain, t2: &Terrain, model: &CostModel, quantum: Rational) -> Result<GapOutcome> {
    let a = build_contour_tree(t1).bucket_tree(quantum);
    let b = build_contour_tree(t2).bucket_tree(quantum);
    gap_distance_subtree(&a, &b, model)
}

/// Terrain with independent uniform integer heights in `0..levels`.
pub fn random_terrain<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, levels: i64) -> Terrain {
    let heights = (0..rows * cols)
        .map(|_| Rational::from_integer(rng.random_range(0..levels)))
        .collect();
    Terrain::new(rows, cols, heights).expect("dimensions checked by caller")
}
