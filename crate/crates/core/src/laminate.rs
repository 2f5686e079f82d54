//! Binary lamination trees: structural validation, flattening, Jensen gaps.

use serde::Serialize;

use crate::chart::{Chart, Cone, Coords};
use crate::error::{Error, Result};
use crate::matrix::{rank_verdict, Matrix, RankVerdict};
use crate::measure::{Atom, DiscreteMeasure};
use crate::point::Point;
use crate::scalar::Scalar;

/// Points that can be checked for rank-one differences and cone membership,
/// possibly through a chart.
pub trait ChartPoint<S: Scalar>: Point<S> {
    fn as_matrix(&self, chart: Option<&Chart<S>>) -> Option<Matrix<S>>;
    fn as_coords(&self, chart: Option<&Chart<S>>, tol: f64) -> Option<Result<Coords<S>>>;
}

impl<S: Scalar> ChartPoint<S> for Matrix<S> {
    fn as_matrix(&self, _: Option<&Chart<S>>) -> Option<Matrix<S>> {
        Some(self.clone())
    }

    fn as_coords(&self, chart: Option<&Chart<S>>, tol: f64) -> Option<Result<Coords<S>>> {
        chart.map(|c| c.matrix_to_coords(self, tol))
    }
}

impl<S: Scalar> ChartPoint<S> for Coords<S> {
    fn as_matrix(&self, chart: Option<&Chart<S>>) -> Option<Matrix<S>> {
        chart.map(|c| c.coords_to_matrix(self))
    }

    fn as_coords(&self, _: Option<&Chart<S>>, _: f64) -> Option<Result<Coords<S>>> {
        Some(Ok(self.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitNode<S, P> {
    pub point: P,
    /// Absolute weight λ.
    pub weight: S,
    /// `[left, right]`; the split direction is `right − left`.
    pub children: Option<Box<[SplitNode<S, P>; 2]>>,
}

impl<S: Scalar, P: Point<S>> SplitNode<S, P> {
    pub fn leaf(point: P, weight: S) -> Self {
        Self {
            point,
            weight,
            children: None,
        }
    }

    pub fn with_children(point: P, weight: S, left: Self, right: Self) -> Self {
        Self {
            point,
            weight,
            children: Some(Box::new([left, right])),
        }
    }

    /// Splits `point` along `dir` into `right = point + t_right·dir` and
    /// `left = point − t_left·dir`, with weights forced by the barycenter.
    pub fn split(point: P, weight: S, dir: &P, t_right: S, t_left: S) -> Result<Self> {
        if t_right <= S::zero() || t_left <= S::zero() {
            return Err(Error::MalformedTree("split offsets must be positive".into()));
        }
        let span = t_right.clone() + t_left.clone();
        let right_w = weight.clone() * t_left.clone() / span.clone();
        let left_w = weight.clone() * t_right.clone() / span;
        let right = point.plus(&dir.scaled(&t_right));
        let left = point.minus(&dir.scaled(&t_left));
        Ok(Self::with_children(
            point,
            weight,
            Self::leaf(left, left_w),
            Self::leaf(right, right_w),
        ))
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn left(&self) -> Option<&Self> {
        self.children.as_ref().map(|c| &c[0])
    }

    pub fn right(&self) -> Option<&Self> {
        self.children.as_ref().map(|c| &c[1])
    }

    /// `λ_right / (λ_left + λ_right)`.
    pub fn relative_weight(&self) -> Option<S> {
        let [l, r] = self.children.as_deref()?;
        let total = l.weight.clone() + r.weight.clone();
        if total.is_zero() {
            return None;
        }
        Some(r.weight.clone() / total)
    }

    pub fn depth(&self) -> usize {
        match &self.children {
            None => 0,
            Some(c) => 1 + c[0].depth().max(c[1].depth()),
        }
    }

    /// Pre-order traversal with paths (`""` for the root, then `L`/`R` steps).
    pub fn visit<'a>(&'a self, path: &mut String, f: &mut impl FnMut(&str, &'a Self)) {
        f(path, self);
        if let Some(c) = &self.children {
            for (tag, child) in ["L", "R"].iter().zip(c.iter()) {
                path.push_str(tag);
                child.visit(path, f);
                path.pop();
            }
        }
    }

    pub fn leaves(&self) -> Vec<&Self> {
        let mut out = Vec::new();
        self.visit(&mut String::new(), &mut |_, n| {
            if n.is_leaf() {
                out.push(n);
            }
        });
        out
    }

    pub fn map_points<Q: Point<S>>(&self, f: &impl Fn(&P) -> Q) -> SplitNode<S, Q> {
        SplitNode {
            point: f(&self.point),
            weight: self.weight.clone(),
            children: self
                .children
                .as_ref()
                .map(|c| Box::new([c[0].map_points(f), c[1].map_points(f)])),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaminateTree<S, P> {
    root: SplitNode<S, P>,
}

impl<S: Scalar, P: Point<S>> LaminateTree<S, P> {
    /// The root must carry unit weight.
    pub fn new(root: SplitNode<S, P>) -> Result<Self> {
        let off = root.weight.clone() - S::one();
        let ok = if S::EXACT { off.is_zero() } else { off.within(1e-12) };
        if !ok {
            return Err(Error::MalformedTree(format!(
                "root weight {} is not 1",
                root.weight
            )));
        }
        Ok(Self { root })
    }

    pub fn trivial(point: P) -> Self {
        Self {
            root: SplitNode::leaf(point, S::one()),
        }
    }

    pub fn root(&self) -> &SplitNode<S, P> {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Leaf measure; zero-weight leaves are dropped and coincident leaves merged.
    pub fn flatten(&self) -> Result<DiscreteMeasure<S, P>> {
        let mut atoms = Vec::new();
        for leaf in self.root.leaves() {
            if leaf.weight < S::zero() {
                return Err(Error::MalformedTree("negative leaf weight".into()));
            }
            if !leaf.weight.is_zero() {
                atoms.push(Atom {
                    point: leaf.point.clone(),
                    weight: leaf.weight.clone(),
                });
            }
        }
        DiscreteMeasure::new(atoms)
    }

    /// `f(root) − Σ λ_leaf f(leaf)`; nonpositive for laminates and rank-one convex `f`.
    pub fn jensen_gap(&self, f: impl Fn(&P) -> S) -> S {
        let integral = self
            .root
            .leaves()
            .into_iter()
            .fold(S::zero(), |acc, l| acc + l.weight.clone() * f(&l.point));
        f(&self.root.point) - integral
    }

    pub fn map_points<Q: Point<S>>(&self, f: impl Fn(&P) -> Q) -> LaminateTree<S, Q> {
        LaminateTree {
            root: self.root.map_points(&f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeReport {
    pub path: String,
    pub depth: usize,
    pub weight_residual: f64,
    pub barycenter_residual: f64,
    pub rank: Option<RankVerdict>,
    pub in_cone: Option<bool>,
    pub relative_weight: Option<f64>,
    pub zero_weight_child: bool,
    pub note: Option<String>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub depth: usize,
    pub leaves: usize,
    /// Split nodes in pre-order.
    pub nodes: Vec<NodeReport>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| !n.ok)
    }
}

/// Checks weight conservation, barycenter conservation, the rank-one
/// condition on every split difference (when a matrix is available) and cone
/// membership of its coordinates (when a cone is given).
///
/// Residuals are compared against `tol` (use 0 for exact fields).
pub fn validate<S: Scalar, P: ChartPoint<S>>(
    tree: &LaminateTree<S, P>,
    cone: Option<&Cone<S>>,
    chart: Option<&Chart<S>>,
    tol: f64,
) -> Result<ValidationReport> {
    let mut nodes = Vec::new();
    let mut leaves = 0;
    let mut failure: Option<Error> = None;
    tree.root.visit(&mut String::new(), &mut |path, node| {
        let Some([left, right]) = node.children.as_deref() else {
            leaves += 1;
            return;
        };
        if failure.is_some() {
            return;
        }
        if !left.point.same_shape(&node.point) || !right.point.same_shape(&node.point) {
            failure = Some(Error::MalformedTree(format!("shape mismatch at {path:?}")));
            return;
        }
        nodes.push(check_split(path, node, left, right, cone, chart, tol));
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let root_ok = tree.root.weight.clone() - S::one();
    let valid = nodes.iter().all(|n| n.ok) && root_ok.within(tol);
    Ok(ValidationReport {
        valid,
        depth: tree.depth(),
        leaves,
        nodes,
    })
}

fn check_split<S: Scalar, P: ChartPoint<S>>(
    path: &str,
    node: &SplitNode<S, P>,
    left: &SplitNode<S, P>,
    right: &SplitNode<S, P>,
    cone: Option<&Cone<S>>,
    chart: Option<&Chart<S>>,
    tol: f64,
) -> NodeReport {
    let weight_res = node.weight.clone() - left.weight.clone() - right.weight.clone();
    let bary_res = node
        .point
        .scaled(&node.weight)
        .minus(&left.point.scaled(&left.weight))
        .minus(&right.point.scaled(&right.weight))
        .norm_inf();
    let diff = right.point.minus(&left.point);
    let rank_tol = if S::EXACT { 0.0 } else { tol.max(crate::matrix::RANK_TOL) };
    let rank = diff.as_matrix(chart).map(|m| rank_verdict(&m, rank_tol));
    let mut note = None;
    let in_cone = match cone {
        None => None,
        Some(cone) => match diff.as_coords(chart, tol.max(1e-10)) {
            None => {
                note = Some("cone given but no chart to read coordinates".to_string());
                Some(false)
            }
            Some(Err(e)) => {
                note = Some(e.to_string());
                Some(false)
            }
            Some(Ok(c)) if c.is_zero() => Some(false),
            Some(Ok(c)) => Some(cone.contains(&c, tol).unwrap_or(false)),
        },
    };
    if rank.is_none() && in_cone.is_none() {
        note = Some("no rank-one criterion: provide a chart or a cone".to_string());
    }
    let zero_weight_child = left.weight.is_zero() || right.weight.is_zero();
    let negative = left.weight < S::zero() || right.weight < S::zero();
    let ok = weight_res.within(tol)
        && bary_res.within(tol)
        && !negative
        && rank.map_or(true, |r| r == RankVerdict::RankOne)
        && in_cone.unwrap_or(true)
        && (rank.is_some() || in_cone.is_some());
    NodeReport {
        path: path.to_string(),
        depth: path.len(),
        weight_residual: weight_res.to_f64().abs(),
        barycenter_residual: bary_res.to_f64(),
        rank,
        in_cone,
        relative_weight: node.relative_weight().map(|w| w.to_f64()),
        zero_weight_child,
        note,
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    fn c(x: i64, y: i64, z: i64) -> Coords<Q> {
        Coords::ints(x, y, z)
    }

    #[test]
    fn split_builder_conserves_mass_and_barycenter() {
        let node = SplitNode::split(c(0, 0, 0), rat(1, 1), &c(1, 0, 0), rat(1, 1), rat(3, 1)).unwrap();
        assert_eq!(node.right().unwrap().weight, rat(3, 4));
        assert_eq!(node.left().unwrap().point, c(-3, 0, 0));
        assert_eq!(node.relative_weight(), Some(rat(3, 4)));
        let tree = LaminateTree::new(node).unwrap();
        let rep = validate(&tree, Some(&Cone::Axes), None, 0.0).unwrap();
        assert!(rep.valid);
        assert_eq!(tree.flatten().unwrap().barycenter(), c(0, 0, 0));
    }

    #[test]
    fn trivial_tree_flattens_to_dirac() {
        let tree = LaminateTree::trivial(c(0, 0, 0));
        let mu = tree.flatten().unwrap();
        assert_eq!(mu.len(), 1);
        assert_eq!(mu.atoms()[0].weight, rat(1, 1));
        let rep = validate(&tree, None, None, 0.0).unwrap();
        assert!(rep.valid && rep.nodes.is_empty());
    }

    #[test]
    fn bad_splits_are_reported() {
        // right − left = (1,1,0) is not an axis
        let node = SplitNode::with_children(
            c(0, 0, 0),
            rat(1, 1),
            SplitNode::leaf(c(-1, -1, 0), rat(1, 2)),
            SplitNode::leaf(c(1, 1, 0), rat(1, 2)),
        );
        let tree = LaminateTree::new(node).unwrap();
        let rep = validate(&tree, Some(&Cone::Axes), None, 0.0).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.nodes[0].in_cone, Some(false));

        // barycenter violated
        let node = SplitNode::with_children(
            c(0, 0, 0),
            rat(1, 1),
            SplitNode::leaf(c(-1, 0, 0), rat(1, 4)),
            SplitNode::leaf(c(1, 0, 0), rat(3, 4)),
        );
        let rep = validate(&LaminateTree::new(node).unwrap(), Some(&Cone::Axes), None, 0.0).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.nodes[0].barycenter_residual, 0.5);

        // coordinates without a cone carry no rank-one criterion
        let node = SplitNode::split(c(0, 0, 0), rat(1, 1), &c(1, 0, 0), rat(1, 1), rat(1, 1)).unwrap();
        let rep = validate(&LaminateTree::new(node).unwrap(), None, None, 0.0).unwrap();
        assert!(!rep.valid);
    }

    #[test]
    fn zero_weight_children_are_flagged() {
        let node = SplitNode::with_children(
            c(0, 0, 0),
            rat(1, 1),
            SplitNode::leaf(c(-1, 0, 0), rat(0, 1)),
            SplitNode::leaf(c(0, 0, 0), rat(1, 1)),
        );
        let tree = LaminateTree::new(node).unwrap();
        let rep = validate(&tree, Some(&Cone::Axes), None, 0.0).unwrap();
        assert!(rep.valid);
        assert!(rep.nodes[0].zero_weight_child);
        assert_eq!(tree.flatten().unwrap().len(), 1);
    }

    #[test]
    fn matrix_trees_use_rank_test() {
        let z = Matrix::<Q>::zeros(2, 2).unwrap();
        let dir = Matrix::new(2, 2, vec![rat(1, 1), rat(2, 1), rat(2, 1), rat(4, 1)]).unwrap();
        let tree = LaminateTree::new(SplitNode::split(z.clone(), rat(1, 1), &dir, rat(1, 3), rat(2, 3)).unwrap()).unwrap();
        assert!(validate(&tree, None, None, 0.0).unwrap().valid);
        let gap = tree.jensen_gap(|m| m.det2().unwrap());
        assert_eq!(gap, rat(0, 1));
        let id = Matrix::<Q>::identity2();
        let tree = LaminateTree::new(SplitNode::split(z, rat(1, 1), &id, rat(1, 1), rat(1, 1)).unwrap()).unwrap();
        let rep = validate(&tree, None, None, 0.0).unwrap();
        assert_eq!(rep.nodes[0].rank, Some(RankVerdict::RankTwo));
        assert!(!rep.valid);
    }

    #[test]
    fn root_weight_must_be_one() {
        assert!(LaminateTree::new(SplitNode::leaf(c(0, 0, 0), rat(1, 2))).is_err());
    }
}
