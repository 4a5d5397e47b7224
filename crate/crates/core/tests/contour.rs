use rand::{rngs::StdRng, SeedableRng};
use treedist::contour::*;
use treedist::oracle::oracle_distance;
use treedist::{Cost, CostModel, Model, Rational};

fn terrain(rows: &[&[i64]]) -> Terrain {
    Terrain::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn one() -> Rational {
    Rational::from_integer(1)
}

fn ramp() -> Terrain {
    terrain(&[&[0, 1, 2, 3], &[4, 5, 6, 7], &[8, 9, 10, 11]])
}

fn single_peak() -> Terrain {
    terrain(&[
        &[1, 2, 3, 4, 5],
        &[16, 20, 21, 22, 6],
        &[15, 23, 40, 24, 7],
        &[14, 25, 26, 27, 8],
        &[13, 12, 11, 10, 9],
    ])
}

fn two_peaks() -> Terrain {
    terrain(&[
        &[0, 1, 2, 3, 4],
        &[15, 30, 18, 28, 5],
        &[14, 31, 20, 29, 6],
        &[13, 32, 19, 27, 7],
        &[12, 11, 10, 9, 8],
    ])
}

// single_peak with (1, 3) raised above its neighbours.
fn single_peak_with_bump() -> Terrain {
    terrain(&[
        &[1, 2, 3, 4, 5],
        &[16, 20, 21, 25, 6],
        &[15, 23, 40, 24, 7],
        &[14, 22, 26, 27, 8],
        &[13, 12, 11, 10, 9],
    ])
}

#[test]
fn ramp_is_one_arc() {
    let ct = build_contour_tree(&ramp());
    assert_eq!(ct.len(), 2);
    assert_eq!(ct.edges().len(), 1);
    assert_eq!(ct.typed_tree(one()).to_bracket(), "min_0(max_11)");
}

#[test]
fn single_peak_is_one_arc() {
    let ct = build_contour_tree(&single_peak());
    assert_eq!(ct.typed_tree(one()).to_bracket(), "min_1(max_40)");
}

#[test]
fn two_peaks_meet_at_a_saddle() {
    let ct = build_contour_tree(&two_peaks());
    assert_eq!(ct.len(), 4);
    assert_eq!(ct.edges().len(), 3);
    assert_eq!(ct.leaf_count(), 3);
    // Going up, the single contour around the valley splits in two.
    assert_eq!(ct.typed_tree(one()).to_bracket(), "min_0(psaddle_20(max_29,max_32))");
    assert_eq!(ct.nodes[1].kind, CriticalKind::PositiveSaddle);
    assert_eq!((ct.nodes[1].row, ct.nodes[1].col), (2, 2));
}

#[test]
fn pits_give_negative_saddles() {
    let flipped = |t: &Terrain| {
        let rows: Vec<Vec<i64>> = (0..t.rows())
            .map(|r| (0..t.cols()).map(|c| -t.height(r, c).to_integer()).collect())
            .collect();
        Terrain::from_rows(&rows).unwrap()
    };
    let ct = build_contour_tree(&flipped(&two_peaks()));
    let kinds: Vec<_> = ct.nodes.iter().map(|n| n.kind).collect();
    assert!(kinds.contains(&CriticalKind::NegativeSaddle));
    assert_eq!(ct.typed_tree(one()).to_bracket(), "min_neg32(nsaddle_neg20(min_neg29,max_0))");
}

#[test]
fn comparing_a_terrain_with_itself() {
    let model = CostModel::affine(one(), one()).unwrap();
    for t in [ramp(), single_peak(), two_peaks()] {
        assert_eq!(compare_terrains(&t, &t, &model, one()).unwrap().distance, Rational::from_integer(0));
    }
}

#[test]
fn two_peaks_against_one_matches_oracle() {
    let model = CostModel::affine(one(), one()).unwrap();
    let (a, b) = (two_peaks(), single_peak());
    let got = compare_terrains(&a, &b, &model, one()).unwrap().distance;
    let ta = build_contour_tree(&a).bucket_tree(one());
    let tb = build_contour_tree(&b).bucket_tree(one());
    assert_eq!((ta.len(), tb.len()), (4, 2));
    let expected = oracle_distance(&ta, &tb, &model, Model::Subtree).unwrap().distance;
    assert_eq!(Cost::Finite(got), expected);
}

#[test]
fn a_bump_costs_two_small_gaps() {
    // The bump adds a maximum and the saddle that joins it to the main peak.
    // Rooted at the global minimum the new saddle sits above the old maximum,
    // so no complete subtree holds exactly the two new nodes. The cheapest
    // edit matches the old maximum to the saddle and drops the two maxima
    // below it as separate gaps: 2a + 2b once all heights share a bucket.
    let (plain, bumped) = (single_peak(), single_peak_with_bump());
    let coarse = Rational::from_integer(100);
    for (a, b) in [(1, 1), (2, 1), (1, 3)] {
        let model = CostModel::affine(Rational::from_integer(a), Rational::from_integer(b)).unwrap();
        let got = compare_terrains(&plain, &bumped, &model, coarse).unwrap().distance;
        assert_eq!(got, Rational::from_integer(2 * a + 2 * b));
        let ta = build_contour_tree(&plain).bucket_tree(coarse);
        let tb = build_contour_tree(&bumped).bucket_tree(coarse);
        assert_eq!(oracle_distance(&ta, &tb, &model, Model::Subtree).unwrap().distance, Cost::Finite(got));
    }
}

#[test]
fn random_six_by_six_terrains() {
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..100 {
        let t = random_terrain(&mut rng, 6, 6, 50);
        let ct = build_contour_tree(&t);
        assert_eq!(ct.edges().len(), ct.len() - 1);
        let (lo, hi) = count_local_extrema(&t);
        assert_eq!(ct.leaf_count(), lo + hi);
        for (k, node) in ct.nodes.iter().enumerate() {
            let leaf = ct.degree(k) == 1;
            assert_eq!(leaf, matches!(node.kind, CriticalKind::Min | CriticalKind::Max), "{node:?}");
            if !leaf {
                assert!(ct.degree(k) >= 3);
            }
        }
    }
}

#[test]
fn load_from_file() {
    let dir = std::env::temp_dir().join(format!("treedist-terrain-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.csv");
    std::fs::write(&path, "1,2\n3,4\n").unwrap();
    let t = load_terrain(&path).unwrap();
    assert_eq!((t.rows(), t.cols()), (2, 2));
    std::fs::write(&path, "1,2\n3\n").unwrap();
    assert!(load_terrain(&path).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(load_terrain(dir.join("missing.csv")).is_err());
}
