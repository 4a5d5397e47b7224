//! Tree and terrain generators for tests, suites and benches.

use rand::Rng;

use crate::tree::LabeledTree;

/// Every ordered tree shape with `1..=max_size` nodes, optionally limited to
/// nodes with at most `max_arity` children. Shapes are labeled `x`, listed by
/// size and then in a fixed recursive order.
pub fn shapes(max_size: usize, max_arity: Option<usize>) -> Vec<LabeledTree> {
    // forests[n][k]: ordered forests of n nodes with at most k trees, where k
    // only matters up to max_arity.
    let cap = max_arity.unwrap_or(usize::MAX);
    let mut trees: Vec<Vec<LabeledTree>> = vec![Vec::new(); max_size + 1];
    for size in 1..=max_size {
        let forests = forests_of(size - 1, cap, &trees);
        trees[size] = forests
            .into_iter()
            .map(|kids| LabeledTree::node("x", kids))
            .collect();
    }
    trees.into_iter().flatten().collect()
}

/// Ordered forests of exactly `n` nodes with at most `cap` trees, built from
/// the already-known trees of each smaller size.
fn forests_of(n: usize, cap: usize, trees: &[Vec<LabeledTree>]) -> Vec<Vec<LabeledTree>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if cap == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for head in &trees[first] {
            for mut rest in forests_of(n - first, cap - 1, trees) {
                rest.insert(0, head.clone());
                out.push(rest);
            }
        }
    }
    out
}

/// All relabelings of `shape` over `alphabet`, in lexicographic order of the
/// preorder label sequence.
pub fn labelings(shape: &LabeledTree, alphabet: &[&str]) -> Vec<LabeledTree> {
    let n = shape.len();
    let k = alphabet.len();
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut labels = vec![""; n];
            for slot in labels.iter_mut().rev() {
                *slot = alphabet[code % k];
                code /= k;
            }
            shape.relabeled(labels).expect("alphabet labels are valid")
        })
        .collect()
}

/// Every labeled tree up to `max_size` nodes over `alphabet`.
pub fn labeled_trees(max_size: usize, alphabet: &[&str], max_arity: Option<usize>) -> Vec<LabeledTree> {
    shapes(max_size, max_arity)
        .iter()
        .flat_map(|s| labelings(s, alphabet))
        .collect()
}

/// Random tree of exactly `size` nodes: each new node picks a parent
/// uniformly among earlier nodes that still have room.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    alphabet: &[&str],
    max_arity: Option<usize>,
) -> LabeledTree {
    assert!(size > 0 && !alphabet.is_empty());
    let cap = max_arity.unwrap_or(usize::MAX);
    let mut parents = vec![None];
    let mut arity = vec![0usize];
    let mut open: Vec<usize> = if cap > 0 { vec![0] } else { Vec::new() };
    for v in 1..size {
        let slot = rng.random_range(0..open.len());
        let p = open[slot];
        parents.push(Some(p));
        arity[p] += 1;
        if arity[p] == cap {
            open.swap_remove(slot);
        }
        arity.push(0);
        open.push(v);
    }
    let labels: Vec<&str> = (0..size)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect();
    LabeledTree::from_parents(labels, &parents).expect("generated parents form a tree")
}

/// Path of `n` nodes where each node is the only child of the previous one.
pub fn spine(n: usize, label: &str) -> LabeledTree {
    let parents: Vec<Option<usize>> = (0..n).map(|v| v.checked_sub(1)).collect();
    LabeledTree::from_parents(vec![label; n], &parents).expect("spine is a tree")
}

/// Complete binary tree with `levels` levels (`2^levels - 1` nodes).
pub fn complete_binary(levels: u32, label: &str) -> LabeledTree {
    assert!(levels >= 1);
    let n = (1usize << levels) - 1;
    let parents: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some((v - 1) / 2) }).collect();
    LabeledTree::from_parents(vec![label; n], &parents).expect("heap layout is a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, SeedableRng};

    #[test]
    fn shape_counts() {
        let counts = |max_arity| {
            let all = shapes(6, max_arity);
            (1..=6).map(|n| all.iter().filter(|t| t.len() == n).count()).collect::<Vec<_>>()
        };
        // Catalan numbers and Motzkin-like counts for arity at most two.
        assert_eq!(counts(None), vec![1, 1, 2, 5, 14, 42]);
        assert_eq!(counts(Some(2)), vec![1, 1, 2, 4, 9, 21]);
        assert_eq!(counts(Some(1)), vec![1; 6]);
    }

    #[test]
    fn shapes_are_distinct() {
        let all = shapes(7, None);
        let mut seen: Vec<String> = all.iter().map(|t| t.to_bracket()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), all.len());
    }

    #[test]
    fn labeling_counts() {
        assert_eq!(labeled_trees(5, &["x", "y"], None).len(), 550);
        assert_eq!(labeled_trees(5, &["x", "y"], Some(2)).len(), 374);
        let l = labelings(&"x(x)".parse().unwrap(), &["x", "y"]);
        let text: Vec<String> = l.iter().map(|t| t.to_bracket()).collect();
        assert_eq!(text, ["x(x)", "x(y)", "y(x)", "y(y)"]);
    }

    #[test]
    fn random_trees_respect_arity() {
        let mut rng = StdRng::seed_from_u64(3);
        for size in 1..40 {
            let t = random_tree(&mut rng, size, &["a", "b"], Some(2));
            assert_eq!(t.len(), size);
            assert!(t.max_arity() <= 2);
        }
    }

    #[test]
    fn fixed_shapes() {
        assert_eq!(spine(3, "a").to_bracket(), "a(a(a))");
        let c = complete_binary(3, "a");
        assert_eq!(c.len(), 7);
        assert_eq!(c.depth(), 3);
        assert_eq!(c.leaf_count(), 4);
    }
}
