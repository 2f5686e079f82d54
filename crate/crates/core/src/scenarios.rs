//! Ready-made measures, charts and lamination chains, each able to check itself.

use serde::Serialize;

use crate::chart::{Chart, Cone, Coords};
use crate::error::{Error, Result};
use crate::laminate::{validate, LaminateTree, SplitNode};
use crate::matrix::{rank_one_factor, rank_verdict, Matrix, RankVerdict, RANK_TOL};
use crate::measure::DiscreteMeasure;
use crate::point::Point;
use crate::scalar::{format_scalar, Scalar};

/// Cube-vertex coordinates of X₁…X₈ (shared by the 2×2 and 3×2 constructions).
pub const VERTEX_COORDS: [[i64; 3]; 8] = [
    [1, 1, -1],
    [1, 1, 1],
    [-1, 1, 1],
    [-1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
    [-1, -1, -1],
    [-1, -1, 1],
];

/// Weight numerators over 16: even-indexed matrices carry 3/16, odd ones 1/16.
pub const VERTEX_WEIGHTS_16: [i64; 8] = [1, 3, 1, 3, 1, 3, 1, 3];

/// The twelve rank-one connected pairs `(i, j)` (1-based), i.e. cube edges.
pub const EDGE_PAIRS: [(usize, usize); 12] = [
    (1, 2),
    (1, 4),
    (1, 6),
    (2, 3),
    (2, 5),
    (3, 4),
    (3, 8),
    (4, 7),
    (5, 6),
    (5, 8),
    (6, 7),
    (7, 8),
];

pub const SCENARIO_NAMES: [&str; 5] = ["nu-tau", "nu-bar-tau", "three-by-two", "nu0-tree", "mu-tau-tree"];

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedDifference<S> {
    pub pair: (usize, usize),
    pub difference: Matrix<S>,
    pub normal: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioBundle<S> {
    pub name: String,
    pub chart: Option<Chart<S>>,
    pub cone: Cone<S>,
    /// Atoms as matrices X₁…X₈ (absent for purely coordinate scenarios).
    pub measure: Option<DiscreteMeasure<S, Matrix<S>>>,
    /// The measure in chart coordinates.
    pub coords_measure: DiscreteMeasure<S, Coords<S>>,
    pub expected_differences: Vec<ExpectedDifference<S>>,
    pub tree: Option<LaminateTree<S, Coords<S>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn q<S: Scalar>(p: i64, d: i64) -> S {
    S::from_ratio(p, d)
}

fn vertex<S: Scalar>(i: usize) -> Coords<S> {
    let [x, y, z] = VERTEX_COORDS[i];
    Coords::ints(x, y, z)
}

fn check_tau<S: Scalar>(tau: &S) -> Result<()> {
    if *tau < S::zero() || *tau >= q(1, 2) {
        return Err(Error::OutOfRange(format!("tau = {tau} outside [0, 1/2)")));
    }
    Ok(())
}

/// X₁…X₈ for the 2×2 family, entry by entry.
pub fn nu_tau_matrices<S: Scalar>(tau: &S) -> Vec<Matrix<S>> {
    let t = |k: i64| S::from_i64(k) * tau.clone();
    let one = S::one;
    let m = |a: S, b: S, c: S, d: S| Matrix::new(2, 2, vec![a, b, c, d]).unwrap();
    vec![
        m(one() - t(1), t(1), t(1), one() - t(1)),
        m(one() + t(1), t(3), t(3), one() + t(1)),
        m(-one() + t(1), t(3), -t(1), one() + t(1)),
        m(-one() - t(1), t(1), -t(3), one() - t(1)),
        m(one() + t(1), -t(1), t(3), -one() + t(1)),
        m(one() - t(1), -t(3), t(1), -one() - t(1)),
        m(-one() - t(1), -t(3), -t(3), -one() - t(1)),
        m(-one() + t(1), -t(1), -t(1), -one() + t(1)),
    ]
}

fn nu_tau_differences<S: Scalar>(tau: &S) -> Vec<ExpectedDifference<S>> {
    let t = |k: i64| S::from_i64(k) * tau.clone();
    let m = |a: S, b: S, c: S, d: S| Matrix::new(2, 2, vec![a, b, c, d]).unwrap();
    let diag = |s: i64| m(t(2 * s), t(2 * s), t(2 * s), t(2 * s));
    let first = || m(S::from_i64(2), S::zero(), t(4), S::zero());
    let second = || m(S::zero(), t(4), S::zero(), S::from_i64(2));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    EDGE_PAIRS
        .iter()
        .map(|&pair| {
            let (difference, normal) = match pair {
                (1, 2) | (7, 8) => (diag(-1), [h, h]),
                (3, 4) | (5, 6) => (diag(1), [h, h]),
                (1, 4) | (2, 3) | (5, 8) | (6, 7) => (first(), [1.0, 0.0]),
                _ => (second(), [0.0, 1.0]),
            };
            ExpectedDifference {
                pair,
                difference,
                normal,
            }
        })
        .collect()
}

fn vertex_measure<S: Scalar>(weights16: [i64; 8]) -> DiscreteMeasure<S, Coords<S>> {
    DiscreteMeasure::from_pairs((0..8).map(|i| (vertex(i), q(weights16[i], 16)))).unwrap()
}

fn matrix_measure<S: Scalar>(mats: &[Matrix<S>], weights16: [i64; 8]) -> DiscreteMeasure<S, Matrix<S>> {
    DiscreteMeasure::from_pairs(mats.iter().cloned().zip(weights16.map(|w| q(w, 16)))).unwrap()
}

/// The eight-atom measure with weights 3/16 on X₂, X₄, X₆, X₈ and 1/16 on the rest.
pub fn build_nu_tau<S: Scalar>(tau: S) -> Result<ScenarioBundle<S>> {
    check_tau(&tau)?;
    let mats = nu_tau_matrices(&tau);
    Ok(ScenarioBundle {
        name: "nu-tau".into(),
        chart: Some(Chart::tau(tau.clone())?),
        cone: Cone::Quadric(tau.clone()),
        measure: Some(matrix_measure(&mats, VERTEX_WEIGHTS_16)),
        coords_measure: vertex_measure(VERTEX_WEIGHTS_16),
        expected_differences: nu_tau_differences(&tau),
        tree: None,
    })
}

/// Same support as [`build_nu_tau`] with uniform weights 1/8.
pub fn build_nu_bar_tau<S: Scalar>(tau: S) -> Result<ScenarioBundle<S>> {
    let mut b = build_nu_tau(tau)?;
    let mats: Vec<Matrix<S>> = b.measure.as_ref().unwrap().atoms().iter().map(|a| a.point.clone()).collect();
    b.name = "nu-bar-tau".into();
    b.measure = Some(matrix_measure(&mats, [2; 8]));
    b.coords_measure = vertex_measure([2; 8]);
    b.tree = Some(build_symmetric_cube_tree());
    Ok(b)
}

pub fn three_by_two_matrices<S: Scalar>() -> Vec<Matrix<S>> {
    let rows = |r: [[i64; 2]; 3]| {
        Matrix::new(3, 2, r.iter().flatten().map(|&v| S::from_i64(v)).collect()).unwrap()
    };
    vec![
        rows([[1, 0], [0, 1], [-1, -1]]),
        rows([[1, 0], [0, 1], [1, 1]]),
        rows([[-1, 0], [0, 1], [1, 1]]),
        rows([[-1, 0], [0, 1], [-1, -1]]),
        rows([[1, 0], [0, -1], [1, 1]]),
        rows([[1, 0], [0, -1], [-1, -1]]),
        rows([[-1, 0], [0, -1], [-1, -1]]),
        rows([[-1, 0], [0, -1], [1, 1]]),
    ]
}

/// The 3×2 measure on X₁…X₈ with the same 3/16–1/16 weights, axis cone.
pub fn build_3x2<S: Scalar>() -> ScenarioBundle<S> {
    let mats = three_by_two_matrices::<S>();
    let rows = |r: [[i64; 2]; 3]| {
        Matrix::new(3, 2, r.iter().flatten().map(|&v| S::from_i64(v)).collect()).unwrap()
    };
    let z_class = rows([[0, 0], [0, 0], [-2, -2]]);
    let x_class = rows([[2, 0], [0, 0], [0, 0]]);
    let y_class = rows([[0, 0], [0, 2], [0, 0]]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected_differences = EDGE_PAIRS
        .iter()
        .map(|&pair| {
            let (difference, normal) = match pair {
                (1, 2) | (7, 8) => (z_class.clone(), [h, h]),
                (3, 4) | (5, 6) => (z_class.scaled(&S::from_i64(-1)), [h, h]),
                (1, 4) | (2, 3) | (6, 7) => (x_class.clone(), [1.0, 0.0]),
                (5, 8) => (x_class.clone(), [1.0, 0.0]),
                _ => (y_class.clone(), [0.0, 1.0]),
            };
            ExpectedDifference {
                pair,
                difference,
                normal,
            }
        })
        .collect();
    ScenarioBundle {
        name: "three-by-two".into(),
        chart: Some(Chart::three_by_two()),
        cone: Cone::Axes,
        measure: Some(matrix_measure(&mats, VERTEX_WEIGHTS_16)),
        coords_measure: vertex_measure(VERTEX_WEIGHTS_16),
        expected_differences,
        tree: None,
    }
}

/// Node `point = ¼·right + ¾·left` style helper: splits `node` (weight `w`)
/// into `right` with relative weight `frac` and `left` with `1 − frac`.
fn node<S: Scalar>(
    point: Coords<S>,
    w: S,
    right: (Coords<S>, S),
    left: (Coords<S>, S),
    sub: Option<[SplitNode<S, Coords<S>>; 2]>,
) -> SplitNode<S, Coords<S>> {
    let (l, r) = match sub {
        Some([l, r]) => (l, r),
        None => (SplitNode::leaf(left.0, left.1), SplitNode::leaf(right.0, right.1)),
    };
    SplitNode::with_children(point, w, l, r)
}

fn c<S: Scalar>(x: S, y: S, z: S) -> Coords<S> {
    Coords::new(x, y, z)
}

/// Quarter split of a face point: `p = ¼·(p with z = zr) + ¾·(p with z = −zr)`.
fn quarter<S: Scalar>(p: Coords<S>, w: S, zr: i64) -> SplitNode<S, Coords<S>> {
    let [x, y, _] = p.0.clone();
    let up = c(x.clone(), y.clone(), S::from_i64(zr));
    let down = c(x, y, S::from_i64(-zr));
    let wq = w.clone() * q(1, 4);
    let w3 = w.clone() * q(3, 4);
    node(p, w, (up, wq), (down, w3), None)
}

/// The depth-3 chain for ν₀ under Λ₀: root along (0,2,0), then (2,0,∓1),
/// then (0,0,±2) with quarter/three-quarter splits.
pub fn build_nu0_tree<S: Scalar>() -> LaminateTree<S, Coords<S>> {
    let h = || q::<S>(1, 2);
    let quarter_w = || q::<S>(1, 4);
    let lower = node(
        c(S::zero(), -S::one(), S::zero()),
        h(),
        (c(S::one(), -S::one(), -h()), quarter_w()),
        (c(-S::one(), -S::one(), h()), quarter_w()),
        Some([
            quarter(c(-S::one(), -S::one(), h()), quarter_w(), -1),
            quarter(c(S::one(), -S::one(), -h()), quarter_w(), 1),
        ]),
    );
    let upper = node(
        c(S::zero(), S::one(), S::zero()),
        h(),
        (c(S::one(), S::one(), h()), quarter_w()),
        (c(-S::one(), S::one(), -h()), quarter_w()),
        Some([
            quarter(c(-S::one(), S::one(), -h()), quarter_w(), 1),
            quarter(c(S::one(), S::one(), h()), quarter_w(), -1),
        ]),
    );
    let root = SplitNode::with_children(Coords::ints(0, 0, 0), S::one(), lower, upper);
    LaminateTree::new(root).unwrap()
}

/// Split of `p` along the x axis into `x = ±1` with the heavier part where
/// `xyz = +1`.
fn x_split<S: Scalar>(p: Coords<S>, w: S) -> SplitNode<S, Coords<S>> {
    let [x, y, z] = p.0.clone();
    let right = c(S::one(), y.clone(), z.clone());
    let left = c(-S::one(), y, z);
    // p.x = θ·1 + (1−θ)·(−1)
    let theta = (x + S::one()) / S::from_i64(2);
    let wr = w.clone() * theta.clone();
    let wl = w.clone() * (S::one() - theta);
    node(p, w, (right, wr), (left, wl), None)
}

/// The alternative ν₀ chain: directions (1,0,∓2) instead of (2,0,∓1), then the
/// x axis instead of the z axis.
pub fn build_nu0_tree_variant<S: Scalar>() -> LaminateTree<S, Coords<S>> {
    let h = || q::<S>(1, 2);
    let quarter_w = || q::<S>(1, 4);
    let lower = node(
        c(S::zero(), -S::one(), S::zero()),
        h(),
        (c(h(), -S::one(), -S::one()), quarter_w()),
        (c(-h(), -S::one(), S::one()), quarter_w()),
        Some([
            x_split(c(-h(), -S::one(), S::one()), quarter_w()),
            x_split(c(h(), -S::one(), -S::one()), quarter_w()),
        ]),
    );
    let upper = node(
        c(S::zero(), S::one(), S::zero()),
        h(),
        (c(h(), S::one(), S::one()), quarter_w()),
        (c(-h(), S::one(), -S::one()), quarter_w()),
        Some([
            x_split(c(-h(), S::one(), -S::one()), quarter_w()),
            x_split(c(h(), S::one(), S::one()), quarter_w()),
        ]),
    );
    let root = SplitNode::with_children(Coords::ints(0, 0, 0), S::one(), lower, upper);
    LaminateTree::new(root).unwrap()
}

/// Halving along x, then y, then z: the uniform measure on the cube vertices.
pub fn build_symmetric_cube_tree<S: Scalar>() -> LaminateTree<S, Coords<S>> {
    fn grow<S: Scalar>(p: Coords<S>, w: S, axis: usize) -> SplitNode<S, Coords<S>> {
        if axis == 3 {
            return SplitNode::leaf(p, w);
        }
        let mut right = p.clone();
        right.0[axis] = S::one();
        let mut left = p.clone();
        left.0[axis] = -S::one();
        let half = w.clone() / S::from_i64(2);
        SplitNode::with_children(
            p,
            w,
            grow(left, half.clone(), axis + 1),
            grow(right, half, axis + 1),
        )
    }
    LaminateTree::new(grow(Coords::ints(0, 0, 0), S::one(), 0)).unwrap()
}

/// Root split weights `(a₁(τ), a₂(τ))` of the perturbed chain.
pub fn mu_tau_weights<S: Scalar>(tau: &S) -> (S, S) {
    let t = tau.clone();
    let n = |a: i64, b: i64| S::from_i64(a) + S::from_i64(b) * t.clone();
    let den = S::from_i64(8) + S::from_i64(36) * t.clone() + S::from_i64(38) * t.clone() * t.clone();
    (
        n(2, 6) * n(2, 3) / den.clone(),
        n(2, 4) * n(2, 5) / den,
    )
}

/// The chain of Λ_τ-splits whose leaves perturb ν₀ by `2τ/(2+3τ)` and
/// `2τ/(2+5τ)` in the second coordinate.
pub fn build_mu_tau_tree<S: Scalar>(tau: S) -> Result<LaminateTree<S, Coords<S>>> {
    check_tau(&tau)?;
    let one = S::one;
    let h = || q::<S>(1, 2);
    let p = tau.clone() / (S::from_i64(2) + S::from_i64(3) * tau.clone());
    let r = tau.clone() / (S::from_i64(2) + S::from_i64(5) * tau.clone());
    let (a1, a2) = mu_tau_weights(&tau);
    let two = S::from_i64(2);
    let y_low = -one() - two.clone() * p.clone();
    let y_high = one() + two * r.clone();

    let lower_pt = c(S::zero(), -one() - p, S::zero());
    let lower_right = c(one(), -one(), -h());
    let lower_left = c(-one(), y_low, h());
    let lower = SplitNode::with_children(
        lower_pt,
        a1.clone(),
        quarter(lower_left, a1.clone() / S::from_i64(2), -1),
        quarter(lower_right, a1.clone() / S::from_i64(2), 1),
    );

    let upper_pt = c(S::zero(), one() + r, S::zero());
    let upper_right = c(one(), one(), h());
    let upper_left = c(-one(), y_high, -h());
    let upper = SplitNode::with_children(
        upper_pt,
        a2.clone(),
        quarter(upper_left, a2.clone() / S::from_i64(2), 1),
        quarter(upper_right, a2.clone() / S::from_i64(2), -1),
    );
    let root = SplitNode::with_children(Coords::ints(0, 0, 0), a1 + a2, lower, upper);
    LaminateTree::new(root)
}

/// ν₀ in coordinates: the vertex measure with 3/16 where `xyz = +1`.
pub fn nu0_measure<S: Scalar>() -> DiscreteMeasure<S, Coords<S>> {
    vertex_measure(VERTEX_WEIGHTS_16)
}

pub fn build_nu0_bundle<S: Scalar>() -> ScenarioBundle<S> {
    ScenarioBundle {
        name: "nu0-tree".into(),
        chart: None,
        cone: Cone::Lambda0,
        measure: None,
        coords_measure: nu0_measure(),
        expected_differences: vec![],
        tree: Some(build_nu0_tree()),
    }
}

pub fn build_mu_tau_bundle<S: Scalar>(tau: S) -> Result<ScenarioBundle<S>> {
    let tree = build_mu_tau_tree(tau.clone())?;
    Ok(ScenarioBundle {
        name: "mu-tau-tree".into(),
        chart: Some(Chart::tau(tau.clone())?),
        cone: Cone::Quadric(tau),
        measure: None,
        coords_measure: tree.flatten()?,
        expected_differences: vec![],
        tree: Some(tree),
    })
}

/// Looks a scenario up by its CLI name. `tau` is ignored by τ-free scenarios.
pub fn build_scenario<S: Scalar>(name: &str, tau: Option<S>) -> Result<ScenarioBundle<S>> {
    let need_tau = || tau.clone().ok_or_else(|| Error::OutOfRange(format!("scenario {name} needs tau")));
    match name {
        "nu-tau" => build_nu_tau(need_tau()?),
        "nu-bar-tau" => build_nu_bar_tau(need_tau()?),
        "three-by-two" => Ok(build_3x2()),
        "nu0-tree" => Ok(build_nu0_bundle()),
        "mu-tau-tree" => build_mu_tau_bundle(need_tau()?),
        _ => Err(Error::Parse(format!("unknown scenario {name:?}"))),
    }
}

impl<S: Scalar> ScenarioBundle<S> {
    /// Runs every self-check. `cone` overrides the bundle's own cone for
    /// tree validation; `tol` is 0 for exact fields.
    pub fn verify(&self, cone: Option<&Cone<S>>, tol: f64) -> Vec<Check> {
        let mut checks = Vec::new();
        let cone = cone.unwrap_or(&self.cone);
        let zero_ok = |x: &S| if S::EXACT { x.is_zero() } else { x.within(tol) };

        if let Some(mu) = &self.measure {
            let atoms = mu.atoms();
            for d in &self.expected_differences {
                let (i, j) = d.pair;
                let actual = atoms[i - 1].point.minus(&atoms[j - 1].point);
                let mismatch = actual.minus(&d.difference).norm_inf();
                let verdict = rank_verdict(&actual, if S::EXACT { 0.0 } else { tol.max(RANK_TOL) });
                let normal = rank_one_factor(&actual, tol.max(RANK_TOL)).map(|f| f.normal);
                let normal_ok = normal
                    .as_ref()
                    .map(|n| (n[0] - d.normal[0]).abs() <= 1e-12 && (n[1] - d.normal[1]).abs() <= 1e-12)
                    .unwrap_or(false);
                let passed = zero_ok(&mismatch) && verdict == RankVerdict::RankOne && normal_ok;
                checks.push(Check::new(
                    format!("difference X{i}-X{j} rank-one"),
                    passed,
                    format!("verdict {verdict:?}, normal {normal:?}, expected {:?}", d.normal),
                ));
            }
            let bary = mu.barycenter().norm_inf();
            checks.push(Check::new(
                "barycenter zero",
                zero_ok(&bary),
                format!("|barycenter| = {}", format_scalar(&bary)),
            ));
            if mu.atoms()[0].point.rows() == 2 {
                let moment = mu.integrate(|m| m.det2().unwrap());
                checks.push(Check::new(
                    "determinant moment zero",
                    zero_ok(&moment),
                    format!("<det, mu> = {}", format_scalar(&moment)),
                ));
            }
            if let Some(chart) = &self.chart {
                let coords_ok = atoms.iter().enumerate().all(|(k, a)| {
                    chart
                        .matrix_to_coords(&a.point, tol)
                        .map(|cd| zero_ok(&cd.minus(&vertex::<S>(k)).norm_inf()))
                        .unwrap_or(false)
                });
                checks.push(Check::new(
                    "atom coordinates are the cube vertices",
                    coords_ok,
                    chart_label(chart),
                ));
                let weights_ok = atoms
                    .iter()
                    .zip(self.coords_measure.atoms())
                    .all(|(a, b)| zero_ok(&(a.weight.clone() - b.weight.clone())));
                checks.push(Check::new("matrix and coordinate weights agree", weights_ok, ""));
            }
        }

        if let Some(tree) = &self.tree {
            match validate(tree, Some(cone), self.chart.as_ref(), tol) {
                Ok(rep) => {
                    let bad: Vec<String> = rep.failures().map(|n| format!("{:?}", n.path)).collect();
                    checks.push(Check::new(
                        format!("tree validates under {}", cone.label()),
                        rep.valid,
                        if bad.is_empty() { "all splits ok".into() } else { format!("failing splits {}", bad.join(",")) },
                    ));
                }
                Err(e) => checks.push(Check::new("tree validates", false, e.to_string())),
            }
            match tree.flatten() {
                Ok(flat) => {
                    let same = flat.len() == self.coords_measure.len()
                        && self.coords_measure.atoms().iter().all(|a| {
                            zero_ok(&(flat.weight_at(&a.point) - a.weight.clone()))
                        });
                    checks.push(Check::new("tree flattens to the scenario measure", same, format!("{} atoms", flat.len())));
                    let bary = flat.barycenter().norm_inf();
                    checks.push(Check::new("flattened barycenter zero", zero_ok(&bary), format_scalar(&bary)));
                }
                Err(e) => checks.push(Check::new("tree flattens", false, e.to_string())),
            }
            if self.name == "mu-tau-tree" {
                if let Some(tau) = self.chart.as_ref().and_then(|c| c.tau_value()) {
                    let (a1, a2) = mu_tau_weights(tau);
                    let sum = a1.clone() + a2.clone() - S::one();
                    checks.push(Check::new(
                        "a1 + a2 = 1",
                        zero_ok(&sum),
                        format!("a1 = {}, a2 = {}", format_scalar(&a1), format_scalar(&a2)),
                    ));
                    let chart = self.chart.as_ref().unwrap();
                    let dist = tree.flatten().and_then(|flat| {
                        let near = flat.map(|p| chart.coords_to_matrix(p))?;
                        let target = nu0_measure::<S>().map(|p| chart.coords_to_matrix(p))?;
                        near.distance(&target)
                    });
                    let bound = 2.0 * tau.to_f64();
                    checks.push(match dist {
                        Ok(d) => Check::new("distance to nu0 at most 2 tau", d <= bound + 1e-12, format!("{d:.6e} <= {bound:.6e}")),
                        Err(e) => Check::new("distance to nu0 at most 2 tau", false, e.to_string()),
                    });
                }
            }
        }
        checks
    }
}

fn chart_label<S: Scalar>(chart: &Chart<S>) -> String {
    match chart.tau_value() {
        Some(t) => format!("chart tau:{}", format_scalar(t)),
        None => "chart 3x2".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    #[test]
    fn nu_tau_at_one_tenth() {
        let b = build_nu_tau(rat(1, 10)).unwrap();
        let mu = b.measure.as_ref().unwrap();
        let x3 = &mu.atoms()[2];
        assert_eq!(
            x3.point.to_rows(),
            vec![vec![rat(-9, 10), rat(3, 10)], vec![rat(-1, 10), rat(11, 10)]]
        );
        assert_eq!(x3.weight, rat(1, 16));
        let d58 = b.expected_differences.iter().find(|d| d.pair == (5, 8)).unwrap();
        assert_eq!(d58.difference.to_rows(), vec![vec![rat(2, 1), rat(0, 1)], vec![rat(2, 5), rat(0, 1)]]);
        assert_eq!(d58.normal, [1.0, 0.0]);
        assert!(b.verify(None, 0.0).iter().all(|c| c.passed));
    }

    #[test]
    fn nu_tau_at_zero_and_range() {
        let b = build_nu_tau(Q::from_i64(0)).unwrap();
        let mu = b.measure.unwrap();
        for a in mu.atoms() {
            assert!(a.point.get(0, 1).is_zero() && a.point.get(1, 0).is_zero());
        }
        assert!(mu.barycenter().is_zero());
        assert!(build_nu_tau(rat(1, 2)).is_err());
        assert!(build_nu_tau(rat(-1, 100)).is_err());
    }

    #[test]
    fn nu_bar_is_uniform() {
        let tau = rat(1, 20);
        let b = build_nu_bar_tau(tau.clone()).unwrap();
        let bar = b.measure.as_ref().unwrap();
        assert!(bar.atoms().iter().all(|a| a.weight == rat(1, 8)));
        assert!(bar.barycenter().is_zero());
        let nu = build_nu_tau(tau).unwrap().measure.unwrap();
        assert!(bar.distance(&nu).unwrap() > 0.0);
        assert!(b.verify(None, 0.0).iter().all(|c| c.passed));
    }

    #[test]
    fn three_by_two_examples() {
        let b = build_3x2::<Q>();
        let mu = b.measure.as_ref().unwrap();
        assert_eq!(
            mu.atoms()[0].point,
            Matrix::from_rows(vec![
                vec![rat(1, 1), rat(0, 1)],
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(-1, 1), rat(-1, 1)]
            ])
            .unwrap()
        );
        let x = |i: usize| mu.atoms()[i - 1].point.clone();
        assert_eq!(x(2).minus(&x(3)), x(1).minus(&x(4)));
        assert_eq!(x(3).minus(&x(4)), x(2).minus(&x(1)));
        assert_eq!(x(7).minus(&x(8)), x(1).minus(&x(2)));
        let f = rank_one_factor(&x(1).minus(&x(2)), RANK_TOL).unwrap();
        assert!(f.normal.iter().all(|v| (v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15));
        let chart = b.chart.as_ref().unwrap();
        assert_eq!(chart.matrix_to_coords(&x(7), 0.0).unwrap(), Coords::ints(-1, -1, -1));
        assert!(b.verify(None, 0.0).iter().all(|c| c.passed), "{:?}", b.verify(None, 0.0));
    }

    #[test]
    fn nu0_chain() {
        let tree = build_nu0_tree::<Q>();
        let root = tree.root();
        let d = root.right().unwrap().point.minus(&root.left().unwrap().point);
        assert_eq!(d, Coords::ints(0, 2, 0));
        let flat = tree.flatten().unwrap();
        assert_eq!(flat.weight_at(&Coords::ints(1, -1, -1)), rat(3, 16));
        assert!(flat.barycenter().is_zero());
        assert!(build_nu0_bundle::<Q>().verify(None, 0.0).iter().all(|c| c.passed));
        let variant = build_nu0_tree_variant::<Q>();
        assert!(validate(&variant, Some(&Cone::Lambda0), None, 0.0).unwrap().valid);
        assert_eq!(variant.flatten().unwrap().distance(&nu0_measure()).unwrap(), 0.0);
    }

    #[test]
    fn mu_tau_weights_exact() {
        let (a1, a2) = mu_tau_weights(&rat(1, 10));
        assert_eq!(a1, rat(299, 599));
        assert_eq!(a2, rat(300, 599));
        let (a1, a2) = mu_tau_weights(&rat(0, 1));
        assert_eq!((a1, a2), (rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn mu_tau_chain() {
        let tau = rat(1, 10);
        let tree = build_mu_tau_tree(tau.clone()).unwrap();
        let flat = tree.flatten().unwrap();
        let (a1, a2) = mu_tau_weights(&tau);
        assert_eq!(flat.weight_at(&Coords::ints(1, -1, -1)), &a1 * rat(3, 8));
        assert_eq!(flat.weight_at(&Coords::ints(1, -1, 1)), &a1 * rat(1, 8));
        assert_eq!(flat.weight_at(&Coords::ints(1, 1, 1)), &a2 * rat(3, 8));
        assert_eq!(flat.weight_at(&Coords::ints(1, 1, -1)), &a2 * rat(1, 8));
        assert!(build_mu_tau_bundle(tau).unwrap().verify(None, 0.0).iter().all(|c| c.passed));
        assert!(build_mu_tau_tree(rat(1, 2)).is_err());
    }

    #[test]
    fn nu0_chain_fails_quadric_cone() {
        let b = build_nu0_bundle::<Q>();
        let checks = b.verify(Some(&Cone::Quadric(rat(1, 10))), 0.0);
        assert!(!checks[0].passed);
    }
}
