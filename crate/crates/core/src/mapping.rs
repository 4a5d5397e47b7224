//! Edit mappings between two trees, their validity conditions, gap
//! decompositions and prices.

use std::fmt;

use crate::cost::{Cost, CostModel, Rational};
use crate::error::Result;
use crate::tree::{LabeledTree, NodeId, Traversal};

/// Which distance a mapping is priced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Every unmatched node is deleted or inserted on its own.
    Classic,
    /// Unmatched nodes form gaps: maximal edge-connected components.
    General,
    /// Like `General`, but unmatched nodes must form complete subtrees.
    Subtree,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Classic => "classic",
            Model::General => "general",
            Model::Subtree => "subtree",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classic" => Ok(Model::Classic),
            "general" | "general_gap" => Ok(Model::General),
            "subtree" | "subtree_gap" => Ok(Model::Subtree),
            other => Err(format!("unknown model {other:?} (expected classic, general or subtree)")),
        }
    }
}

/// A set of matched node pairs `(node in T1, node in T2)`, sorted by the
/// first component. Node ids are preorder positions (see [`NodeId`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EditMapping {
    pub model: Model,
    pub pairs: Vec<(NodeId, NodeId)>,
}

/// First broken mapping condition found by [`EditMapping::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OutOfRange((NodeId, NodeId)),
    OneToOne((NodeId, NodeId), (NodeId, NodeId)),
    SiblingOrder((NodeId, NodeId), (NodeId, NodeId)),
    AncestorOrder((NodeId, NodeId), (NodeId, NodeId)),
    /// A node left unmatched has a matched descendant (subtree model only).
    NotCompleteSubtree { tree: u8, node: NodeId },
}

impl EditMapping {
    pub fn new(model: Model, mut pairs: Vec<(NodeId, NodeId)>) -> Self {
        pairs.sort_unstable();
        EditMapping { model, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nodes of `t1` (or `t2` when `second` is set) not touched by the mapping.
    pub fn unmatched(&self, tree: &LabeledTree, second: bool) -> Vec<NodeId> {
        let matched = self.matched_flags(tree.len(), second);
        (0..tree.len()).filter(|&v| !matched[v]).collect()
    }

    fn matched_flags(&self, n: usize, second: bool) -> Vec<bool> {
        let mut flags = vec![false; n];
        for &(u, v) in &self.pairs {
            flags[if second { v } else { u }] = true;
        }
        flags
    }

    /// Gap decomposition of the unmatched nodes of one tree. Classic
    /// mappings yield singletons; the gap models yield maximal edge-connected
    /// components, each listed in preorder starting at its topmost node.
    pub fn gaps(&self, tree: &LabeledTree, second: bool) -> Vec<Vec<NodeId>> {
        let matched = self.matched_flags(tree.len(), second);
        if self.model == Model::Classic {
            return (0..tree.len()).filter(|&v| !matched[v]).map(|v| vec![v]).collect();
        }
        let mut gaps: Vec<Vec<NodeId>> = Vec::new();
        let mut gap_of = vec![usize::MAX; tree.len()];
        for v in 0..tree.len() {
            if matched[v] {
                continue;
            }
            match tree.parent(v).filter(|&p| !matched[p]) {
                Some(p) => {
                    gap_of[v] = gap_of[p];
                    gaps[gap_of[p]].push(v);
                }
                None => {
                    gap_of[v] = gaps.len();
                    gaps.push(vec![v]);
                }
            }
        }
        gaps
    }

    /// True when every unmatched node of `tree` has only unmatched descendants.
    pub fn has_complete_subtree_gaps(&self, tree: &LabeledTree, second: bool) -> bool {
        self.first_incomplete_gap(tree, second).is_none()
    }

    fn first_incomplete_gap(&self, tree: &LabeledTree, second: bool) -> Option<NodeId> {
        let matched = self.matched_flags(tree.len(), second);
        (0..tree.len()).find(|&v| matched[v] && tree.parent(v).is_some_and(|p| !matched[p]))
            .map(|v| tree.parent(v).unwrap())
    }

    /// Checks the one-to-one, sibling-order and ancestor-order conditions for
    /// every pair of pairs, plus the complete-subtree condition for
    /// [`Model::Subtree`]. Relations are derived from postorder leftmost-leaf
    /// ranges, independently of how mappings are generated.
    pub fn check(&self, t1: &LabeledTree, t2: &LabeledTree) -> std::result::Result<(), Violation> {
        let post1 = t1.index(Traversal::Postorder);
        let post2 = t2.index(Traversal::Postorder);
        #[derive(PartialEq, Eq)]
        enum Rel {
            Same,
            Ancestor,
            Descendant,
            Left,
            Right,
        }
        let relation = |post: &crate::tree::IndexedTree<'_>, a: NodeId, b: NodeId| -> Rel {
            let (pa, pb) = (post.ordinal_of(a), post.ordinal_of(b));
            if pa == pb {
                Rel::Same
            } else if post.l(pa) <= pb && pb < pa {
                Rel::Ancestor
            } else if post.l(pb) <= pa && pa < pb {
                Rel::Descendant
            } else if pa < post.l(pb) {
                Rel::Left
            } else {
                Rel::Right
            }
        };
        for &pair in &self.pairs {
            if pair.0 >= t1.len() || pair.1 >= t2.len() {
                return Err(Violation::OutOfRange(pair));
            }
        }
        for (k, &p) in self.pairs.iter().enumerate() {
            for &q in &self.pairs[k + 1..] {
                let r1 = relation(&post1, p.0, q.0);
                let r2 = relation(&post2, p.1, q.1);
                if (r1 == Rel::Same) != (r2 == Rel::Same) || (r1 == Rel::Same && r2 == Rel::Same) {
                    return Err(Violation::OneToOne(p, q));
                }
                let anc = |r: &Rel| matches!(r, Rel::Ancestor | Rel::Descendant);
                if anc(&r1) != anc(&r2) || (anc(&r1) && r1 != r2) {
                    return Err(Violation::AncestorOrder(p, q));
                }
                if r1 != r2 {
                    return Err(Violation::SiblingOrder(p, q));
                }
            }
        }
        if self.model == Model::Subtree {
            for (tree, t, second) in [(1u8, t1, false), (2u8, t2, true)] {
                if let Some(node) = self.first_incomplete_gap(t, second) {
                    return Err(Violation::NotCompleteSubtree { tree, node });
                }
            }
        }
        Ok(())
    }

    /// Prices the mapping under its model.
    ///
    /// Classic: relabel cost of every pair plus `γ(v → λ)` / `γ(λ → v)` for
    /// unmatched nodes. Gap models: relabel cost of every pair plus `a + b |g|`
    /// for every gap `g` in either tree. A subtree-model mapping whose
    /// unmatched nodes are not complete subtrees is infeasible and costs `+∞`.
    pub fn price(&self, t1: &LabeledTree, t2: &LabeledTree, model: &CostModel) -> Result<Cost> {
        let mut total = Rational::from_integer(0);
        for &(u, v) in &self.pairs {
            total += model.relabel_cost(Some(t1.label(u)), Some(t2.label(v)))?;
        }
        match self.model {
            Model::Classic => {
                for u in self.unmatched(t1, false) {
                    total += model.relabel_cost(Some(t1.label(u)), None)?;
                }
                for v in self.unmatched(t2, true) {
                    total += model.relabel_cost(None, Some(t2.label(v)))?;
                }
            }
            Model::General | Model::Subtree => {
                if self.model == Model::Subtree
                    && !(self.has_complete_subtree_gaps(t1, false)
                        && self.has_complete_subtree_gaps(t2, true))
                {
                    return Ok(Cost::Infinite);
                }
                for g in self.gaps(t1, false).iter().chain(&self.gaps(t2, true)) {
                    total += model.gap_cost(g.len());
                }
            }
        }
        Ok(Cost::Finite(total))
    }
}
