mod common;

use lamina_core::chart::{CGrid, Chart, Cone, Coords};
use lamina_core::json::{coords_tree_to_json, matrix_tree_to_json, tree_from_json, AnyTree};
use lamina_core::laminate::validate;
use lamina_core::lamsearch::{search, SearchConfig};
use lamina_core::matrix::{det2, rank_one_test};
use lamina_core::measure::DiscreteMeasure;
use lamina_core::point::Point;
use lamina_core::scalar::{rat, Scalar};
use lamina_core::separator::{monomials, LineCurvature, PolyFunc};
use num_rational::BigRational;
use proptest::prelude::*;

use common::*;

fn coords() -> impl Strategy<Value = Coords<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Coords::new(x, y, z))
}

fn measure(max: usize) -> impl Strategy<Value = DiscreteMeasure<f64, Coords<f64>>> {
    prop::collection::vec((coords(), 0.05..1.0f64), 1..max).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        DiscreteMeasure::from_pairs(atoms.into_iter().map(|(p, w)| (p, w / total))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transport_is_a_metric(a in measure(5), b in measure(5), c in measure(5)) {
        let ab = a.distance(&b).unwrap();
        let ba = b.distance(&a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(a.distance(&a).unwrap() <= 1e-12);
        prop_assert!(ab <= a.distance(&c).unwrap() + c.distance(&b).unwrap() + 1e-9);
    }

    #[test]
    fn distance_to_a_dirac_is_the_mean_offset(a in measure(6), p in coords()) {
        let direct: f64 = a.atoms().iter().map(|x| x.weight * x.point.minus(&p).norm_inf()).sum();
        let d = a.distance(&DiscreteMeasure::dirac(p)).unwrap();
        prop_assert!((d - direct).abs() <= 1e-9);
    }

    #[test]
    fn flattening_keeps_mass_and_barycenter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_matrix_tree(&mut r, 4);
        let flat = tree.flatten().unwrap();
        let mass = flat.atoms().iter().fold(BigRational::from_i64(0), |s, a| s + a.weight.clone());
        prop_assert_eq!(mass, rat(1, 1));
        prop_assert_eq!(flat.barycenter(), tree.root().point.clone());
    }

    #[test]
    fn split_differences_are_rank_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_matrix_tree(&mut r, 3);
        let mut ok = true;
        tree.root().visit(&mut String::new(), &mut |_, n| {
            if let (Some(l), Some(rt)) = (n.left(), n.right()) {
                let d = rt.point.minus(&l.point);
                ok &= rank_one_test(&d, 0.0) && det2(&d).unwrap() == rat(0, 1);
                ok &= rank_one_test(&d.to_f64(), 1e-9);
            }
        });
        prop_assert!(ok);
    }

    #[test]
    fn tree_json_round_trips_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_matrix_tree(&mut r, 3);
        match tree_from_json::<BigRational>(&matrix_tree_to_json(&tree)).unwrap() {
            AnyTree::Matrix(back) => prop_assert_eq!(back, tree),
            AnyTree::Coords(_) => prop_assert!(false, "kind changed"),
        }
    }

    #[test]
    fn chart_round_trip(x in -5i64..5, y in -5i64..5, z in -5i64..5, t in 1i64..49) {
        let chart = Chart::tau(rat(t, 100)).unwrap();
        let c = Coords::new(rat(x, 3), rat(y, 2), rat(z, 5));
        let m = chart.coords_to_matrix(&c);
        prop_assert_eq!(chart.matrix_to_coords(&m, 0.0).unwrap(), c);
    }

    #[test]
    fn pullback_agrees_with_evaluation(seed in any::<u64>(), t in 1i64..49) {
        let mut r = rng(seed);
        let chart = Chart::tau(rat(t, 100)).unwrap();
        let terms: Vec<(Vec<u32>, BigRational)> = monomials(4, 0, 3)
            .into_iter()
            .map(|e| (e, small_rat(&mut r, 3, 2)))
            .collect();
        let f = PolyFunc::from_terms(4, terms).unwrap();
        let g = f.pullback(&chart).unwrap();
        let c = Coords::new(small_rat(&mut r, 4, 3), small_rat(&mut r, 4, 3), small_rat(&mut r, 4, 3));
        let m = chart.coords_to_matrix(&c);
        let entries: Vec<BigRational> = m.to_rows().concat();
        prop_assert_eq!(g.eval(&c.0), f.eval(&entries));
    }

    #[test]
    fn line_minimum_is_below_every_sample(seed in any::<u64>()) {
        let mut r = rng(seed);
        let terms: Vec<(Vec<u32>, f64)> = monomials(3, 2, 4)
            .into_iter()
            .map(|e| (e, small_rat(&mut r, 8, 8).to_f64()))
            .collect();
        let f = PolyFunc::from_terms(3, terms).unwrap();
        let d = [0.48, -0.6, 0.64];
        let p = [0.1, 0.2, -0.3];
        let curv = LineCurvature::new(&f, &d);
        let (lo, hi) = (-1.3, 0.9);
        let (min, at) = curv.min_on(&p, lo, hi);
        let second = f.directional(&d).directional(&d);
        let g = |t: f64| second.eval(&[p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]]);
        prop_assert!((g(at) - min).abs() <= 1e-9);
        for k in 0..=200 {
            let t = lo + (hi - lo) * k as f64 / 200.0;
            prop_assert!(min <= g(t) + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn search_is_deterministic_and_its_defect_is_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cone = Cone::Quadric(0.1);
        let tree = random_dictionary_tree(&mut r, &cone);
        // perturb one leaf so the search has to approximate
        let mut target: Vec<(Coords<f64>, f64)> =
            tree.flatten().unwrap().atoms().iter().map(|a| (a.point.clone(), a.weight)).collect();
        target[0].0 = target[0].0.plus(&Coords::new(0.01, -0.02, 0.015));
        let shift = target[0].1;
        let bary = Coords::new(0.01 * shift, -0.02 * shift, 0.015 * shift);
        let target = DiscreteMeasure::from_pairs(target.into_iter().map(|(p, w)| (p.minus(&bary), w))).unwrap();
        let cfg = SearchConfig { max_depth: 3, node_budget: 500, ..SearchConfig::default() };
        let a = search(&target, None, &cone, &cfg).unwrap();
        let b = search(&target, None, &cone, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let recomputed = a.tree.flatten().unwrap().distance(&target).unwrap();
        prop_assert!((recomputed - a.defect).abs() <= 1e-9, "{} vs {}", recomputed, a.defect);
        prop_assert!(validate(&a.tree, Some(&cone), None, 1e-9).unwrap().valid);
        prop_assert!(a.tree.depth() <= 3);
    }

    #[test]
    fn search_recovers_flattened_trees(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cone = [Cone::Quadric(0.05), Cone::Lambda0, Cone::Axes][(seed % 3) as usize].clone();
        let tree = random_dictionary_tree(&mut r, &cone);
        let target = tree.flatten().unwrap();
        let cfg = SearchConfig { max_depth: 3, ..SearchConfig::default() };
        let res = search(&target, None, &cone, &cfg).unwrap();
        prop_assert!(res.defect <= 1e-9);
        let json = coords_tree_to_json(&res.tree);
        prop_assert!(matches!(tree_from_json::<f64>(&json).unwrap(), AnyTree::Coords(_)));
    }
}

#[test]
fn sampled_quadric_directions_lie_on_the_cone() {
    for tau in [0.01, 0.1, 0.3] {
        let cone = Cone::Quadric(tau);
        for d in cone.sample_directions(&CGrid::default()) {
            let q = (1.0 + 2.0 * tau) * d.0[0] * d.0[1] + tau * d.0[0] * d.0[2] + tau * d.0[1] * d.0[2];
            assert!(q.abs() <= 1e-12 * d.norm_sq(), "{d} at {tau}");
            let m = Chart::tau(tau).unwrap().coords_to_matrix(&d);
            assert!(rank_one_test(&m, 1e-9));
        }
    }
}

#[test]
fn oracle_scores_the_uniform_cube_at_zero() {
    assert!(grid_tree_oracle(&cube_measure([2; 8]), 3) <= 1e-12);
    assert!((grid_tree_oracle(&cube_measure([1, 3, 1, 3, 1, 3, 1, 3]), 3) - 0.5).abs() <= 1e-12);
    // a depth-2 tree cannot reach all eight vertices
    assert!(grid_tree_oracle(&cube_measure([2; 8]), 2) > 0.1);
}
