//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use lamina_core::chart::{CGrid, Cone, Coords};
use lamina_core::laminate::{LaminateTree, SplitNode};
use lamina_core::matrix::Matrix;
use lamina_core::measure::DiscreteMeasure;
use lamina_core::point::Point;
use lamina_core::scalar::{rat, Scalar};
use lamina_core::separator::PolyFunc;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn small_rat(r: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    rat(r.gen_range(-max_num..=max_num), r.gen_range(1..=max_den))
}

fn positive_rat(r: &mut ChaCha8Rng) -> BigRational {
    rat(r.gen_range(1..=12), r.gen_range(1..=6))
}

/// A random rank-one matrix `a ⊗ n` with small nonzero integer factors.
fn rank_one(r: &mut ChaCha8Rng) -> Matrix<BigRational> {
    let mut v = || loop {
        let p: [i64; 2] = [r.gen_range(-3..=3), r.gen_range(-3..=3)];
        if p != [0, 0] {
            return p;
        }
    };
    let (a, n) = (v(), v());
    Matrix::new(
        2,
        2,
        vec![rat(a[0] * n[0], 1), rat(a[0] * n[1], 1), rat(a[1] * n[0], 1), rat(a[1] * n[1], 1)],
    )
    .unwrap()
}

fn grow_matrix(r: &mut ChaCha8Rng, p: Matrix<BigRational>, w: BigRational, depth: usize) -> SplitNode<BigRational, Matrix<BigRational>> {
    if depth == 0 || r.gen_bool(0.25) {
        return SplitNode::leaf(p, w);
    }
    let dir = rank_one(r);
    let (tr, tl) = (positive_rat(r), positive_rat(r));
    let node = SplitNode::split(p, w, &dir, tr, tl).unwrap();
    let [left, right] = *node.children.clone().unwrap();
    SplitNode::with_children(
        node.point,
        node.weight,
        grow_matrix(r, left.point, left.weight, depth - 1),
        grow_matrix(r, right.point, right.weight, depth - 1),
    )
}

/// A valid laminate of 2×2 rational matrices with depth at most `max_depth`.
pub fn random_matrix_tree(r: &mut ChaCha8Rng, max_depth: usize) -> LaminateTree<BigRational, Matrix<BigRational>> {
    let root = Matrix::new(2, 2, (0..4).map(|_| small_rat(r, 5, 4)).collect()).unwrap();
    LaminateTree::new(grow_matrix(r, root, rat(1, 1), max_depth)).unwrap()
}

fn grow_coords(
    r: &mut ChaCha8Rng,
    dirs: &[Coords<f64>],
    p: Coords<f64>,
    w: f64,
    depth: usize,
) -> SplitNode<f64, Coords<f64>> {
    if depth == 0 || (depth < 3 && r.gen_bool(0.2)) {
        return SplitNode::leaf(p, w);
    }
    let d = &dirs[r.gen_range(0..dirs.len())];
    let tr: f64 = r.gen_range(0.25..1.5);
    let tl: f64 = r.gen_range(0.25..1.5);
    let right = p.plus(&d.scaled(&tr));
    let left = p.minus(&d.scaled(&tl));
    let fr = tl / (tr + tl);
    SplitNode::with_children(
        p,
        w,
        grow_coords(r, dirs, left, w * (1.0 - fr), depth - 1),
        grow_coords(r, dirs, right, w * fr, depth - 1),
    )
}

/// A random tree of depth at most 3 over the sampled directions of `cone`,
/// rooted at a random point. The root always splits.
pub fn random_dictionary_tree(r: &mut ChaCha8Rng, cone: &Cone<f64>) -> LaminateTree<f64, Coords<f64>> {
    let dirs = cone.sample_directions(&CGrid::default());
    let root = Coords::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    LaminateTree::new(grow_coords(r, &dirs, root, 1.0, 3)).unwrap()
}

/// The quadratic form whose zero set is the cone (`xy` for Λ₀, 0 for the axes).
pub fn cone_form(cone: &Cone<f64>) -> PolyFunc<f64> {
    let t = |e: [u32; 3], c: f64| (e.to_vec(), c);
    match cone {
        Cone::Quadric(tau) => {
            PolyFunc::from_terms(3, [t([1, 1, 0], 1.0 + 2.0 * tau), t([1, 0, 1], *tau), t([0, 1, 1], *tau)]).unwrap()
        }
        Cone::Lambda0 => PolyFunc::from_terms(3, [t([1, 1, 0], 1.0)]).unwrap(),
        _ => PolyFunc::zero(3),
    }
}

/// `Σ (lₖ·x)² + β (l₀·x)⁴ + γ Q(x)` with `Q` affine along the cone.
pub fn random_cone_convex(r: &mut ChaCha8Rng, cone: &Cone<f64>) -> PolyFunc<f64> {
    let mut lin = || -> PolyFunc<f64> {
        let terms: Vec<(Vec<u32>, f64)> = (0..3)
            .map(|k| {
                let mut e = vec![0; 3];
                e[k] = 1;
                (e, (r.gen_range(-8..=8) as f64) / 8.0)
            })
            .collect();
        PolyFunc::from_terms(3, terms).unwrap()
    };
    let ls: Vec<PolyFunc<f64>> = (0..3).map(|_| lin()).collect();
    let mut f = PolyFunc::zero(3);
    for l in &ls {
        f = f.plus(&l.times(l));
    }
    let beta = r.gen_range(0..=8) as f64 / 8.0;
    let sq = ls[0].times(&ls[0]);
    f = f.plus(&sq.times(&sq).scaled(&beta));
    let gamma = r.gen_range(-16..=16) as f64 / 8.0;
    f.plus(&cone_form(cone).scaled(&gamma))
}

/// Every tree of depth at most `depth` that splits a point with a zero
/// coordinate along that axis into `±1` (weights ½), on the grid `{-1,0,1}³`
/// starting at the origin, scored by transport distance to `target`.
/// Returns the smallest distance.
pub fn grid_tree_oracle(target: &DiscreteMeasure<f64, Coords<f64>>, depth: usize) -> f64 {
    // a tree is determined by its leaf multiset; enumerate leaf measures
    fn expand(point: [i8; 3], depth: usize) -> Vec<Vec<([i8; 3], f64)>> {
        let mut out = vec![vec![(point, 1.0)]];
        if depth == 0 {
            return out;
        }
        for axis in 0..3 {
            if point[axis] != 0 {
                continue;
            }
            let mut lo = point;
            let mut hi = point;
            lo[axis] = -1;
            hi[axis] = 1;
            for a in expand(lo, depth - 1) {
                for b in expand(hi, depth - 1) {
                    let mut leaves: Vec<([i8; 3], f64)> = a.iter().map(|(p, w)| (*p, w * 0.5)).collect();
                    leaves.extend(b.iter().map(|(p, w)| (*p, w * 0.5)));
                    out.push(leaves);
                }
            }
        }
        out
    }
    let mut best = f64::INFINITY;
    for leaves in expand([0, 0, 0], depth) {
        let mu = DiscreteMeasure::from_pairs(
            leaves
                .iter()
                .map(|(p, w)| (Coords::new(p[0] as f64, p[1] as f64, p[2] as f64), *w)),
        )
        .unwrap();
        best = best.min(mu.distance(target).unwrap());
    }
    best
}

pub fn cube_measure(weights16: [i64; 8]) -> DiscreteMeasure<f64, Coords<f64>> {
    DiscreteMeasure::from_pairs(
        lamina_core::scenarios::VERTEX_COORDS
            .iter()
            .zip(weights16)
            .map(|(v, w)| (Coords::new(v[0] as f64, v[1] as f64, v[2] as f64), w as f64 / 16.0)),
    )
    .unwrap()
}

pub fn exact_poly(f: &PolyFunc<f64>) -> PolyFunc<BigRational> {
    f.to_exact()
}

pub fn to_exact_coords(c: &Coords<f64>) -> Coords<BigRational> {
    Coords(c.0.map(|v| <BigRational as Scalar>::from_f64(v)))
}
