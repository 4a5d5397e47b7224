//! Random pairs beyond the exhaustive suites, each checked against the
//! enumeration oracle, plus properties that need no oracle.

use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};
use treedist::classic::tree_distance;
use treedist::gap_general::gap_distance_general;
use treedist::gap_subtree::gap_distance_subtree;
use treedist::oracle::oracle_distance;
use treedist::{gen, Cost, CostModel, LabeledTree, Model, Rational, RelabelTable};

fn tree(seed: u64, size: usize, arity: Option<usize>) -> LabeledTree {
    gen::random_tree(&mut StdRng::seed_from_u64(seed), size, &["a", "b", "c"], arity)
}

fn affine(a: i64, b: i64) -> CostModel {
    CostModel::affine(Rational::from_integer(a), Rational::from_integer(b)).unwrap()
}

fn weighted() -> CostModel {
    let table = RelabelTable::parse(
        "alphabet: a,b,c\na,b,1/2\na,c,1\nb,c,3/4\na,-,2/3\nb,-,1\nc,-,5/4\n",
    )
    .unwrap();
    CostModel::unit()
        .with_relabel(treedist::Relabel::Table(table))
        .with_gaps(Rational::new(1, 3), Rational::new(1, 2))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn classic_matches_oracle(s1 in any::<u64>(), s2 in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let (t1, t2) = (tree(s1, m, None), tree(s2, n, None));
        for model in [CostModel::unit(), weighted()] {
            let out = tree_distance(&t1, &t2, &model).unwrap();
            let oracle = oracle_distance(&t1, &t2, &model, Model::Classic).unwrap();
            prop_assert_eq!(Cost::Finite(out.distance), oracle.distance);
            prop_assert!(out.mapping.check(&t1, &t2).is_ok());
            prop_assert_eq!(out.mapping.price(&t1, &t2, &model).unwrap(), oracle.distance);
        }
    }

    #[test]
    fn general_matches_oracle(s1 in any::<u64>(), s2 in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let (t1, t2) = (tree(s1, m, Some(2)), tree(s2, n, Some(2)));
        for model in [affine(1, 1), affine(3, 1), weighted()] {
            let out = gap_distance_general(&t1, &t2, &model).unwrap();
            let oracle = oracle_distance(&t1, &t2, &model, Model::General).unwrap();
            prop_assert_eq!(Cost::Finite(out.distance), oracle.distance);
            prop_assert!(out.mapping.check(&t1, &t2).is_ok());
            prop_assert_eq!(out.mapping.price(&t1, &t2, &model).unwrap(), oracle.distance);
        }
    }

    #[test]
    fn subtree_matches_oracle(s1 in any::<u64>(), s2 in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let (t1, t2) = (tree(s1, m, None), tree(s2, n, None));
        for model in [affine(1, 1), affine(0, 2), weighted()] {
            let out = gap_distance_subtree(&t1, &t2, &model).unwrap();
            let oracle = oracle_distance(&t1, &t2, &model, Model::Subtree).unwrap();
            prop_assert_eq!(Cost::Finite(out.distance), oracle.distance);
            prop_assert!(out.mapping.check(&t1, &t2).is_ok());
            prop_assert_eq!(out.mapping.price(&t1, &t2, &model).unwrap(), oracle.distance);
        }
    }

    #[test]
    fn gap_distances_are_symmetric(s1 in any::<u64>(), s2 in any::<u64>(), m in 1usize..15, n in 1usize..15) {
        let (t1, t2) = (tree(s1, m, Some(2)), tree(s2, n, Some(2)));
        let model = affine(2, 1);
        prop_assert_eq!(
            gap_distance_general(&t1, &t2, &model).unwrap().distance,
            gap_distance_general(&t2, &t1, &model).unwrap().distance
        );
        prop_assert_eq!(
            gap_distance_subtree(&t1, &t2, &model).unwrap().distance,
            gap_distance_subtree(&t2, &t1, &model).unwrap().distance
        );
    }

    #[test]
    fn general_is_monotone_in_gap_open(s1 in any::<u64>(), s2 in any::<u64>(), m in 1usize..12, n in 1usize..12) {
        let (t1, t2) = (tree(s1, m, Some(2)), tree(s2, n, Some(2)));
        let mut last = Rational::from_integer(0);
        for a in 0..5 {
            let d = gap_distance_general(&t1, &t2, &affine(a, 1)).unwrap().distance;
            prop_assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn larger_mappings_stay_valid(s1 in any::<u64>(), s2 in any::<u64>(), m in 10usize..30, n in 10usize..30) {
        let (t1, t2) = (tree(s1, m, Some(2)), tree(s2, n, Some(2)));
        let model = affine(1, 2);
        let g = gap_distance_general(&t1, &t2, &model).unwrap();
        prop_assert!(g.mapping.check(&t1, &t2).is_ok());
        prop_assert_eq!(g.mapping.price(&t1, &t2, &model).unwrap(), Cost::Finite(g.distance));
        let s = gap_distance_subtree(&t1, &t2, &model).unwrap();
        prop_assert!(s.mapping.check(&t1, &t2).is_ok());
        prop_assert_eq!(s.mapping.price(&t1, &t2, &model).unwrap(), Cost::Finite(s.distance));
        prop_assert!(g.distance <= s.distance);
    }
}

#[test]
fn oracle_examples_from_hand_enumeration() {
    let t = |s: &str| s.parse::<LabeledTree>().unwrap();
    let unit = CostModel::unit();
    assert_eq!(oracle_distance(&t("a"), &t("b"), &unit, Model::Classic).unwrap().distance, Cost::from(1));
    // Empty mapping priced as two whole-tree gaps.
    let model = affine(2, 3);
    let empty = treedist::EditMapping::new(Model::General, vec![]);
    assert_eq!(empty.price(&t("a(b,c)"), &t("d(e)"), &model).unwrap(), Cost::from((2 + 9) + (2 + 6)));
}
