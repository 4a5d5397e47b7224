//! Ordered labeled trees, the bracket text format, and traversal indices.
//!
//! A [`LabeledTree`] stores its nodes in an arena laid out in preorder, so a
//! [`NodeId`] is also the zero-based preorder rank of the node. Every
//! constructor normalizes to that layout; trees are immutable afterwards.
//!
//! [`IndexedTree`] is the 1-based traversal view the dynamic programs address
//! their tables with. Ordinal 0 stands for the empty forest.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Zero-based preorder position of a node inside its [`LabeledTree`].
pub type NodeId = usize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabeledTree {
    labels: Vec<String>,
    children: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
    size: Vec<usize>,
}

pub(crate) fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl LabeledTree {
    /// Single-node tree.
    ///
    /// # Panics
    /// If `label` is not a non-empty run of `[A-Za-z0-9_]`.
    pub fn leaf(label: impl Into<String>) -> Self {
        Self::node(label, Vec::new())
    }

    /// Tree whose root is `label` with the given subtrees as ordered children.
    ///
    /// # Panics
    /// If `label` is not a non-empty run of `[A-Za-z0-9_]`.
    pub fn node(label: impl Into<String>, subtrees: impl IntoIterator<Item = LabeledTree>) -> Self {
        let label = label.into();
        assert!(is_valid_label(&label), "invalid node label {label:?}");
        let mut labels = vec![label];
        let mut children = vec![Vec::new()];
        let mut parent = vec![None];
        for sub in subtrees {
            let offset = labels.len();
            children[0].push(offset);
            labels.extend(sub.labels);
            parent.extend(
                sub.parent
                    .into_iter()
                    .map(|p| Some(p.map_or(0, |p| p + offset))),
            );
            children.extend(
                sub.children
                    .into_iter()
                    .map(|c| c.into_iter().map(|x| x + offset).collect()),
            );
        }
        Self::assemble(labels, children, parent)
    }

    fn assemble(labels: Vec<String>, children: Vec<Vec<NodeId>>, parent: Vec<Option<NodeId>>) -> Self {
        let mut size = vec![1; labels.len()];
        for v in (0..labels.len()).rev() {
            if let Some(p) = parent[v] {
                size[p] += size[v];
            }
        }
        LabeledTree {
            labels,
            children,
            parent,
            size,
        }
    }

    /// Builds a tree from a parent array. Children keep the relative order of
    /// their indices in `parents`. The result is re-laid out in preorder, so
    /// node ids generally differ from the input indices.
    pub fn from_parents<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        parents: &[Option<usize>],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one node".into()));
        }
        if parents.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} labels but {} parent entries",
                n,
                parents.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|l| !is_valid_label(l)) {
            return Err(Error::InvalidTree(format!("invalid label {bad:?}")));
        }
        let mut kids = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::InvalidTree("more than one root".into()))
                }
                None => root = Some(v),
                Some(p) if p >= n => {
                    return Err(Error::InvalidTree(format!("parent {p} out of range")))
                }
                Some(p) => kids[p].push(v),
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".into()))?;

        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            if order.len() > n {
                break;
            }
            stack.extend(kids[v].iter().rev());
        }
        if order.len() != n {
            return Err(Error::InvalidTree(
                "parent array has a cycle or unreachable nodes".into(),
            ));
        }
        let mut new_id = vec![usize::MAX; n];
        for (id, &v) in order.iter().enumerate() {
            new_id[v] = id;
        }
        let mut out_labels = Vec::with_capacity(n);
        let mut out_children = Vec::with_capacity(n);
        let mut out_parent = Vec::with_capacity(n);
        for &v in &order {
            out_labels.push(labels[v].clone());
            out_children.push(kids[v].iter().map(|&c| new_id[c]).collect());
            out_parent.push(parents[v].map(|p| new_id[p]));
        }
        Ok(Self::assemble(out_labels, out_children, out_parent))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: the empty tree is not a value of this type.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        self.children.iter().filter(|c| c.is_empty()).count()
    }

    /// Number of nodes on the longest root-to-leaf path (a single node has depth 1).
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        let mut best = 0;
        for v in 0..self.len() {
            depth[v] = self.parent[v].map_or(1, |p| depth[p] + 1);
            best = best.max(depth[v]);
        }
        best
    }

    /// Number of nodes in the subtree rooted at `v`. Subtrees occupy the
    /// contiguous id range `v..v + subtree_size(v)`.
    pub fn subtree_size(&self, v: NodeId) -> usize {
        self.size[v]
    }

    /// `a` is a proper ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        a < b && b < a + self.subtree_size(a)
    }

    /// Copy of the subtree rooted at `v`.
    pub fn subtree(&self, v: NodeId) -> LabeledTree {
        let size = self.subtree_size(v);
        let range = v..v + size;
        LabeledTree {
            labels: self.labels[range.clone()].to_vec(),
            children: self.children[range.clone()]
                .iter()
                .map(|c| c.iter().map(|x| x - v).collect())
                .collect(),
            parent: self.parent[range.clone()]
                .iter()
                .enumerate()
                .map(|(k, p)| if k == 0 { None } else { p.map(|p| p - v) })
                .collect(),
            size: self.size[range].to_vec(),
        }
    }

    /// Same shape with new labels, given in node-id order.
    pub fn relabeled<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.len() {
            return Err(Error::InvalidTree(format!(
                "expected {} labels, got {}",
                self.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|l| !is_valid_label(l)) {
            return Err(Error::InvalidTree(format!("invalid label {bad:?}")));
        }
        Ok(LabeledTree {
            labels,
            children: self.children.clone(),
            parent: self.parent.clone(),
            size: self.size.clone(),
        })
    }

    /// Largest child count over all nodes.
    pub fn max_arity(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Fails with [`Error::NotBinary`] naming the first node (in preorder)
    /// that has more than two children.
    pub fn ensure_binary(&self) -> Result<()> {
        match (0..self.len()).find(|&v| self.children[v].len() > 2) {
            Some(v) => Err(Error::NotBinary {
                label: self.labels[v].clone(),
                children: self.children[v].len(),
            }),
            None => Ok(()),
        }
    }

    /// Preorder traversal of parents, i.e. the shape without labels.
    pub fn shape(&self) -> Vec<Option<NodeId>> {
        self.parent.clone()
    }

    /// Postorder sequence of node ids.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root(), 0usize)];
        while let Some((v, next)) = stack.pop() {
            if next < self.children[v].len() {
                stack.push((v, next + 1));
                stack.push((self.children[v][next], 0));
            } else {
                out.push(v);
            }
        }
        out
    }

    /// Canonical bracket serialization: no whitespace, `,` between siblings,
    /// parentheses only around the children of inner nodes.
    pub fn to_bracket(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root(), 0usize)];
        while let Some((v, next)) = stack.pop() {
            if next == 0 {
                out.push_str(&self.labels[v]);
            }
            let kids = &self.children[v];
            if kids.is_empty() {
                continue;
            }
            if next < kids.len() {
                out.push(if next == 0 { '(' } else { ',' });
                stack.push((v, next + 1));
                stack.push((kids[next], 0));
            } else {
                out.push(')');
            }
        }
        out
    }

    /// Parses `Tree := Label | Label '(' Tree (',' Tree)* ')'` with
    /// `Label := [A-Za-z0-9_]+`. Whitespace between tokens is ignored.
    pub fn parse_bracket(text: &str) -> Result<Self> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let err = |offset: usize, message: &str| Error::Parse {
            offset,
            message: message.to_string(),
        };

        let mut labels: Vec<String> = Vec::new();
        let mut parents: Vec<Option<usize>> = Vec::new();
        // Open nodes whose child lists are still being read.
        let mut open: Vec<usize> = Vec::new();

        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(err(pos, "empty input"));
        }
        loop {
            // Expect a label.
            skip_ws(&mut pos);
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            if start == pos {
                return Err(if pos == bytes.len() {
                    err(pos, "unexpected end of input, expected a label")
                } else {
                    err(pos, &format!("unexpected {:?}, expected a label", bytes[pos] as char))
                });
            }
            let id = labels.len();
            labels.push(text[start..pos].to_string());
            parents.push(open.last().copied());

            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'(' {
                pos += 1;
                open.push(id);
                continue;
            }
            // Close as many child lists as end here.
            loop {
                skip_ws(&mut pos);
                if open.is_empty() {
                    if pos != bytes.len() {
                        return Err(err(pos, "trailing input after tree"));
                    }
                    return LabeledTree::from_parents(labels, &parents);
                }
                match bytes.get(pos) {
                    Some(b',') => {
                        pos += 1;
                        break;
                    }
                    Some(b')') => {
                        pos += 1;
                        open.pop();
                    }
                    Some(&c) => {
                        return Err(err(pos, &format!("unexpected {:?}, expected ',' or ')'", c as char)))
                    }
                    None => return Err(err(pos, "unexpected end of input, expected ',' or ')'")),
                }
            }
        }
    }

    /// Preorder or postorder view with all derived indices.
    pub fn index(&self, order: Traversal) -> IndexedTree<'_> {
        IndexedTree::new(self, order)
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracket())
    }
}

impl fmt::Debug for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledTree({})", self.to_bracket())
    }
}

impl FromStr for LabeledTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LabeledTree::parse_bracket(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Traversal {
    Postorder,
    Preorder,
}

/// Traversal-order view of a tree. Ordinals run over `1..=len`; slot 0 of
/// every per-ordinal vector is unused.
///
/// `l` (leftmost leaf), key roots and collapsed depth exist only in the
/// postorder view; `r` (rightmost leaf) only in the preorder view. `parent`
/// and `size` exist in both.
#[derive(Debug, Clone)]
pub struct IndexedTree<'t> {
    tree: &'t LabeledTree,
    order: Traversal,
    ordinal_of: Vec<usize>,
    node_at: Vec<NodeId>,
    parent: Vec<Option<usize>>,
    size: Vec<usize>,
    leftmost: Vec<usize>,
    rightmost: Vec<usize>,
    key_roots: Vec<usize>,
    cdepth: Vec<usize>,
}

impl<'t> IndexedTree<'t> {
    fn new(tree: &'t LabeledTree, order: Traversal) -> Self {
        let n = tree.len();
        let sequence: Vec<NodeId> = match order {
            Traversal::Preorder => (0..n).collect(),
            Traversal::Postorder => tree.postorder(),
        };
        let mut node_at = vec![usize::MAX; n + 1];
        let mut ordinal_of = vec![0; n];
        for (k, &v) in sequence.iter().enumerate() {
            node_at[k + 1] = v;
            ordinal_of[v] = k + 1;
        }
        let mut parent = vec![None; n + 1];
        let mut size = vec![0; n + 1];
        for i in 1..=n {
            let v = node_at[i];
            parent[i] = tree.parent(v).map(|p| ordinal_of[p]);
            size[i] = tree.subtree_size(v);
        }

        let mut leftmost = Vec::new();
        let mut rightmost = Vec::new();
        let mut key_roots = Vec::new();
        let mut cdepth = Vec::new();
        match order {
            Traversal::Postorder => {
                leftmost = vec![0; n + 1];
                for i in 1..=n {
                    leftmost[i] = i + 1 - size[i];
                }
                // The root plus every node that has a left sibling.
                let mut is_key = vec![false; n + 1];
                for i in 1..=n {
                    let v = node_at[i];
                    is_key[i] = match tree.parent(v) {
                        None => true,
                        Some(p) => tree.children(p)[0] != v,
                    };
                }
                key_roots = (1..=n).filter(|&i| is_key[i]).collect();
                cdepth = vec![0; n + 1];
                // Parents come after children in postorder, so sweep downwards.
                for i in (1..=n).rev() {
                    let above = parent[i].map_or(0, |p| cdepth[p]);
                    cdepth[i] = above + usize::from(is_key[i]);
                }
            }
            Traversal::Preorder => {
                rightmost = vec![0; n + 1];
                for i in 1..=n {
                    rightmost[i] = i + size[i] - 1;
                }
            }
        }

        IndexedTree {
            tree,
            order,
            ordinal_of,
            node_at,
            parent,
            size,
            leftmost,
            rightmost,
            key_roots,
            cdepth,
        }
    }

    pub fn tree(&self) -> &'t LabeledTree {
        self.tree
    }

    pub fn order(&self) -> Traversal {
        self.order
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ordinal_of(&self, v: NodeId) -> usize {
        self.ordinal_of[v]
    }

    pub fn node_at(&self, i: usize) -> NodeId {
        self.node_at[i]
    }

    pub fn label(&self, i: usize) -> &'t str {
        self.tree.label(self.node_at[i])
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn size(&self, i: usize) -> usize {
        self.size[i]
    }

    /// Leftmost leaf descendant of `i` (postorder view).
    pub fn l(&self, i: usize) -> usize {
        assert_eq!(self.order, Traversal::Postorder, "l() needs the postorder view");
        self.leftmost[i]
    }

    /// Rightmost leaf descendant of `i` (preorder view).
    pub fn r(&self, i: usize) -> usize {
        assert_eq!(self.order, Traversal::Preorder, "r() needs the preorder view");
        self.rightmost[i]
    }

    /// Key roots in ascending ordinal order (postorder view; empty otherwise).
    pub fn key_roots(&self) -> &[usize] {
        &self.key_roots
    }

    /// Collapsed depth of `i` (postorder view).
    pub fn cdepth(&self, i: usize) -> usize {
        assert_eq!(self.order, Traversal::Postorder, "cdepth() needs the postorder view");
        self.cdepth[i]
    }
}

/// Totals used to check the participating-node identity of the key-root
/// decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CdepthAudit {
    /// Sum of subtree sizes over all key roots.
    pub sum_sizes: usize,
    /// Sum of collapsed depths over all nodes.
    pub sum_cdepth: usize,
    pub max_cdepth: usize,
}

pub fn cdepth_audit(tree: &LabeledTree) -> CdepthAudit {
    let post = tree.index(Traversal::Postorder);
    let sum_sizes = post.key_roots().iter().map(|&k| post.size(k)).sum();
    let depths = (1..=post.len()).map(|i| post.cdepth(i));
    CdepthAudit {
        sum_sizes,
        sum_cdepth: depths.clone().sum(),
        max_cdepth: depths.max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> LabeledTree {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = t("a");
        assert_eq!(a.len(), 1);
        assert_eq!(a.label(0), "a");

        let abc = t("a(b,c)");
        assert_eq!(abc.children(0), &[1, 2]);
        assert_eq!(abc.label(1), "b");
        assert_eq!(abc.label(2), "c");

        let f = t("f(d(a,c),e)");
        assert_eq!(f.label(0), "f");
        let d = f.children(0)[0];
        let e = f.children(0)[1];
        assert_eq!(f.label(d), "d");
        assert_eq!(f.label(e), "e");
        let dk: Vec<_> = f.children(d).iter().map(|&c| f.label(c)).collect();
        assert_eq!(dk, ["a", "c"]);
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(t("  f ( d( a , c ) ,\n e ) ").to_bracket(), "f(d(a,c),e)");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        for (text, offset) in [("", 0), ("   ", 3), ("a(", 2), ("a(b", 3), ("a(b,)", 4), ("a)", 1), ("a(b c)", 4), ("(a)", 0)] {
            match LabeledTree::parse_bracket(text) {
                Err(Error::Parse { offset: o, .. }) => assert_eq!(o, offset, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn to_bracket_examples() {
        assert_eq!(LabeledTree::leaf("a").to_bracket(), "a");
        let abc = LabeledTree::node("a", [LabeledTree::leaf("b"), LabeledTree::leaf("c")]);
        assert_eq!(abc.to_bracket(), "a(b,c)");
        for s in ["a", "a(b,c)", "f(d(a,c),e)", "x(y(z(w)),v,u(t,s))"] {
            assert_eq!(t(s).to_bracket(), s);
        }
    }

    #[test]
    fn from_parents_normalizes_to_preorder() {
        // Input indices: 0 = c (child of 2), 1 = b (child of 2), 2 = a (root).
        let tree = LabeledTree::from_parents(["c", "b", "a"], &[Some(2), Some(2), None]).unwrap();
        assert_eq!(tree.to_bracket(), "a(c,b)");
        assert!(LabeledTree::from_parents(["a", "b"], &[Some(1), Some(0)]).is_err());
        assert!(LabeledTree::from_parents(["a", "b"], &[None, None]).is_err());
        assert!(LabeledTree::from_parents(Vec::<String>::new(), &[]).is_err());
    }

    #[test]
    fn postorder_index_of_a_b_c() {
        let tree = t("a(b,c)");
        let post = tree.index(Traversal::Postorder);
        let ords: Vec<_> = ["b", "c", "a"]
            .iter()
            .map(|l| post.ordinal_of((0..3).find(|&v| tree.label(v) == *l).unwrap()))
            .collect();
        assert_eq!(ords, [1, 2, 3]);
        assert_eq!((1..=3).map(|i| post.l(i)).collect::<Vec<_>>(), [1, 2, 1]);
        assert_eq!(post.key_roots(), &[2, 3]);
    }

    #[test]
    fn preorder_index_of_a_b_c() {
        let tree = t("a(b,c)");
        let pre = tree.index(Traversal::Preorder);
        assert_eq!(pre.label(1), "a");
        assert_eq!(pre.parent(2), Some(1));
        assert_eq!(pre.parent(3), Some(1));
        assert_eq!((1..=3).map(|i| pre.r(i)).collect::<Vec<_>>(), [3, 2, 3]);
    }

    #[test]
    fn key_roots_of_f_d_a_c_e() {
        // Postorder: a=1, c=2, d=3, e=4, f=5. Nodes with a left sibling: c, e.
        let tree = t("f(d(a,c),e)");
        let post = tree.index(Traversal::Postorder);
        let kr: Vec<_> = post.key_roots().iter().map(|&k| post.label(k)).collect();
        assert_eq!(kr, ["c", "e", "f"]);
        assert_eq!(post.key_roots().len(), tree.leaf_count());
    }

    #[test]
    fn cdepth_audit_examples() {
        let one = cdepth_audit(&t("a"));
        assert_eq!((one.sum_sizes, one.sum_cdepth, one.max_cdepth), (1, 1, 1));

        let abc = t("a(b,c)");
        let post = abc.index(Traversal::Postorder);
        assert_eq!((1..=3).map(|i| post.cdepth(i)).collect::<Vec<_>>(), [1, 2, 1]);
        let audit = cdepth_audit(&abc);
        assert_eq!((audit.sum_sizes, audit.sum_cdepth), (4, 4));

        let spine = t("a(b(c(d(e))))");
        let audit = cdepth_audit(&spine);
        assert_eq!((audit.sum_sizes, audit.sum_cdepth, audit.max_cdepth), (5, 5, 1));
    }

    #[test]
    fn subtree_and_ancestry() {
        let tree = t("f(d(a,c),e)");
        assert_eq!(tree.subtree(1).to_bracket(), "d(a,c)");
        assert_eq!(tree.subtree_size(1), 3);
        assert!(tree.is_ancestor(0, 3));
        assert!(tree.is_ancestor(1, 2));
        assert!(!tree.is_ancestor(1, 4));
        assert!(!tree.is_ancestor(2, 2));
        assert_eq!(tree.depth(), 3);
        assert_eq!(tree.leaf_count(), 3);
    }

    #[test]
    fn binary_check_names_node() {
        let err = t("a(b,c(d,e,f))").ensure_binary().unwrap_err();
        assert_eq!(err.to_string(), "NotBinary: node c has 3 children");
        assert!(t("a(b,c(d,e))").ensure_binary().is_ok());
    }

    #[test]
    fn deep_spine_does_not_overflow() {
        let mut text = String::new();
        for _ in 0..20_000 {
            text.push_str("a(");
        }
        text.push('b');
        for _ in 0..20_000 {
            text.push(')');
        }
        let tree = t(&text);
        assert_eq!(tree.len(), 20_001);
        assert_eq!(tree.to_bracket(), text);
    }
}
