use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use umtk::ballean::{enumerate_balls, hasse_diagram, verify_ball_preserving};
use umtk::canon::{canon_code_labeled, canon_code_unlabeled, rooted_tree_iso_map, shape_iso_map, verify_tree_iso};
use umtk::classification::classify_space;
use umtk::generators::{integer_pool, random_semimetric, random_ultrametric, GenConfig, ShapeClass};
use umtk::tree::RepTree;
use umtk::{build_tree, decide_weak_similarity, space_from_tree, Rational, SemimetricSpace, Spectrum};

fn ultra(seed: u64, n: usize, hi: i64) -> SemimetricSpace {
    let config = GenConfig {
        pool: Some(integer_pool(1..=hi.max(n as i64))),
        ..GenConfig::new(seed, n)
    };
    random_ultrametric(&config).unwrap()
}

fn semi(seed: u64, n: usize) -> SemimetricSpace {
    random_semimetric(&GenConfig::new(seed, n)).unwrap()
}

fn shuffled(x: &SemimetricSpace, seed: u64) -> SemimetricSpace {
    let mut order = x.points().to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    x.reordered(&order).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tree_round_trip_is_exact(seed: u64, n in 1usize..=12, hi in 1i64..=6) {
        let x = ultra(seed, n, hi);
        let tree = build_tree(&x).unwrap();
        prop_assert_eq!(tree.leaf_count(), n);
        let back = space_from_tree(&tree).unwrap().reordered(x.points()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn json_round_trips(seed: u64, n in 1usize..=10) {
        let x = ultra(seed, n, 2 * n as i64);
        prop_assert_eq!(SemimetricSpace::from_json(&x.to_json()).unwrap(), x.clone());
        let tree = build_tree(&x).unwrap();
        prop_assert_eq!(RepTree::from_json(&tree.to_json()).unwrap(), tree);
        let s = semi(seed, n);
        prop_assert_eq!(SemimetricSpace::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn point_order_does_not_change_the_tree(seed: u64, n in 1usize..=10) {
        let x = ultra(seed, n, 4);
        let y = shuffled(&x, seed ^ 1);
        let (tx, ty) = (build_tree(&x).unwrap(), build_tree(&y).unwrap());
        prop_assert_eq!(canon_code_labeled(&tx), canon_code_labeled(&ty));
        let iso = rooted_tree_iso_map(&tx, &ty, true).unwrap();
        prop_assert!(verify_tree_iso(&tx, &ty, &iso, true));
        for (p, q) in iso.leaf_pairs(&tx, &ty) {
            prop_assert_eq!(p, q);
        }
    }

    #[test]
    fn canonical_codes_decide_isomorphism(a: u64, b: u64, n in 1usize..=6) {
        let (tx, ty) = (build_tree(&ultra(a, n, 1)).unwrap(), build_tree(&ultra(b, n, 1)).unwrap());
        let shape = shape_iso_map(&tx, &ty);
        prop_assert_eq!(canon_code_unlabeled(&tx) == canon_code_unlabeled(&ty), shape.is_some());
        if let Some(iso) = shape {
            prop_assert!(verify_tree_iso(&tx.map_labels(|_| ()), &ty.map_labels(|_| ()), &iso, false));
        }
        let labeled = rooted_tree_iso_map(&tx, &ty, true);
        prop_assert_eq!(canon_code_labeled(&tx) == canon_code_labeled(&ty), labeled.is_some());
        if let Some(iso) = labeled {
            prop_assert!(verify_tree_iso(&tx, &ty, &iso, true));
        }
    }

    #[test]
    fn rank_relabel_keeps_ranks(seed: u64, n in 1usize..=9, step in 1i64..=50) {
        let x = semi(seed, n);
        let target: Vec<Rational> = (0..x.spectrum().len() as i64).map(|k| Rational::new(k * step, 7)).collect();
        let y = x.rank_relabel(&Spectrum::new(target.clone()).unwrap()).unwrap();
        prop_assert_eq!(y.spectrum().values(), &target[..]);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(x.rank(i, j), y.rank(i, j));
            }
        }
        prop_assert_eq!(y.is_ultrametric(), x.is_ultrametric());
    }

    #[test]
    fn balls_match_their_center_and_radius(seed: u64, n in 1usize..=9, ultrametric: bool) {
        let x = if ultrametric { ultra(seed, n, 5) } else { semi(seed, n) };
        let ballean = enumerate_balls(&x);
        for i in 0..n {
            prop_assert!(ballean.balls().iter().any(|b| b.len() == 1 && b.contains(i)));
        }
        prop_assert!(ballean.balls().iter().any(|b| b.len() == n));
        for ball in ballean.balls() {
            let c = ball.center;
            prop_assert!(x.spectrum().rank_of(&ball.radius).is_some());
            let expected: Vec<usize> = (0..n).filter(|&i| x.dist(i, c) <= &ball.radius).collect();
            prop_assert_eq!(ball.indices(), expected);
        }
    }

    #[test]
    fn hasse_reachability_is_strict_inclusion(seed: u64, n in 1usize..=8, ultrametric: bool) {
        let x = if ultrametric { ultra(seed, n, 5) } else { semi(seed, n) };
        let h = hasse_diagram(&enumerate_balls(&x));
        let v = h.vertex_count();
        let mut reach = vec![vec![false; v]; v];
        for &(a, b) in h.arcs() {
            reach[a][b] = true;
        }
        for k in 0..v {
            for i in 0..v {
                for j in 0..v {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let balls = h.balls();
        for i in 0..v {
            for j in 0..v {
                let strict = i != j && balls[i].members().is_subset(balls[j].members());
                prop_assert_eq!(reach[i][j], strict);
            }
        }
        let bottoms: Vec<usize> = h.zero_indegree();
        prop_assert_eq!(bottoms.len(), n);
        prop_assert!(bottoms.iter().all(|&b| balls[b].len() == 1));
        if ultrametric {
            let root = h.reversed_tree_root();
            prop_assert!(root.is_some());
            prop_assert_eq!(balls[root.unwrap()].len(), n);
        }
    }

    #[test]
    fn weak_similarity_is_symmetric_and_preserves_balls(a: u64, b: u64, n in 1usize..=5) {
        let (x, y) = (semi(a, n), semi(b, n));
        let forward = decide_weak_similarity(&x, &y).unwrap();
        let backward = decide_weak_similarity(&y, &x).unwrap();
        prop_assert_eq!(forward.is_some(), backward.is_some());
        if let Some(w) = forward {
            prop_assert_eq!(verify_ball_preserving(&x, &y, &w.phi).unwrap(), None);
        }
    }

    #[test]
    fn generators_are_deterministic_and_respect_classes(seed: u64, n in 1usize..=12, class in 0usize..4, injective: bool) {
        let shape = [ShapeClass::R, ShapeClass::RTilde, ShapeClass::T, ShapeClass::Any][class];
        let config = GenConfig { shape, injective, ..GenConfig::new(seed, n) };
        let x = random_ultrametric(&config).unwrap();
        prop_assert_eq!(random_ultrametric(&config).unwrap(), x.clone());
        prop_assert!(x.is_ultrametric());
        prop_assert_eq!(x.len(), n);
        let report = classify_space(&x).unwrap();
        match shape {
            ShapeClass::R => prop_assert!(report.in_r && report.in_r_tilde && report.in_t),
            ShapeClass::RTilde => prop_assert!(report.in_r_tilde && report.in_t),
            ShapeClass::T => prop_assert!(report.in_t),
            ShapeClass::Any => {}
        }
        if injective {
            prop_assert!(report.in_d);
        }
    }
}
