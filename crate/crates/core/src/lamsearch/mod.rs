//! Bounded search for lamination trees reproducing a target measure.
//!
//! A search runs in two phases. The merge phase enumerates every tree whose
//! nodes carry whole target atoms (subsets of the support merged pairwise along
//! cone directions); a full-support merge is an exact reconstruction. When that
//! fails, a depth-first branch and bound grows trees top-down from the
//! barycenter, splitting along dictionary directions up to the hull boundary
//! or onto merge points, and scores complete trees by transport distance.

mod bnb;
mod exact;
mod polytope;
mod sweep;

use serde::Serialize;

use crate::chart::{CGrid, Chart, Cone, Coords};
use crate::error::{Error, Result};
use crate::laminate::{LaminateTree, SplitNode};
use crate::measure::DiscreteMeasure;
use crate::point::Point;

pub use exact::MergeTable;
pub use polytope::{weight_polytope, PolytopeOptions, WeightPolytope};
pub use sweep::{proper_directions, sweep, sweep_csv, ProperDirection, SweepRow};

/// Accepts only directions whose chart normal is within `max_angle` radians of
/// one of `targets` (normals compared up to sign).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFilter {
    pub targets: Vec<[f64; 2]>,
    pub max_angle: f64,
}

impl NormalFilter {
    /// Normals (1,0), (0,1), (1,1)/√2 with the given angular radius.
    pub fn three_classes(max_angle: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            targets: vec![[1.0, 0.0], [0.0, 1.0], [h, h]],
            max_angle,
        }
    }

    pub fn admits(&self, normal: [f64; 2]) -> bool {
        self.targets.iter().any(|t| {
            let c = (t[0] * normal[0] + t[1] * normal[1]).abs().min(1.0);
            c.acos() <= self.max_angle + 1e-12
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub max_depth: usize,
    /// Sampling of the quadric and Λ₀ cones.
    pub grid: CGrid,
    /// Relative split weights must lie in `[w_min, w_max]`.
    pub w_min: f64,
    pub w_max: f64,
    pub tol: f64,
    /// Kept for reproducibility records; the search itself is deterministic.
    pub seed: u64,
    /// Maximum number of node expansions in the branch and bound.
    pub node_budget: usize,
    pub normal_filter: Option<NormalFilter>,
    /// Run the weight-flow LP when no exact tree is found.
    pub certify: bool,
    pub polytope: PolytopeOptions,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_depth: 8,
            grid: CGrid::default(),
            w_min: 1e-3,
            w_max: 1.0 - 1e-3,
            tol: 1e-9,
            seed: 0,
            node_budget: 20_000,
            normal_filter: None,
            certify: true,
            polytope: PolytopeOptions::default(),
        }
    }
}

impl SearchConfig {
    /// The proper-direction setting: normals within 0.2 rad of the three
    /// classes and relative weights in `[0.05, 0.95]`.
    pub fn restricted(max_depth: usize) -> Self {
        Self {
            max_depth,
            w_min: 0.05,
            w_max: 0.95,
            normal_filter: Some(NormalFilter::three_classes(0.2)),
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if !(0.0 < self.w_min && self.w_min < self.w_max && self.w_max < 1.0) {
            return Err(Error::OutOfRange(format!(
                "weight bounds [{}, {}] must satisfy 0 < w_min < w_max < 1",
                self.w_min, self.w_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Exact,
    Approximate,
    InfeasibleAtDepth,
}

impl SearchStatus {
    pub fn label(self) -> &'static str {
        match self {
            SearchStatus::Exact => "exact",
            SearchStatus::Approximate => "approximate",
            SearchStatus::InfeasibleAtDepth => "infeasible-at-depth",
        }
    }
}

/// One split of a result tree, in pre-order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitInfo {
    pub path: String,
    /// `right − left`, canonical up to the orientation stored in the tree.
    pub direction: [f64; 3],
    pub relative_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub tree: LaminateTree<f64, Coords<f64>>,
    pub defect: f64,
    pub nodes: usize,
    pub status: SearchStatus,
    /// Outcome of the weight-flow LP, when it was run: `Some(false)` certifies
    /// that no grid laminate of this depth reaches the target.
    pub polytope_feasible: Option<bool>,
}

impl SearchResult {
    pub fn splits(&self) -> Vec<SplitInfo> {
        split_infos(&self.tree)
    }
}

pub fn split_infos(tree: &LaminateTree<f64, Coords<f64>>) -> Vec<SplitInfo> {
    let mut out = Vec::new();
    tree.root().visit(&mut String::new(), &mut |path, node| {
        if let (Some(l), Some(r), Some(w)) = (node.left(), node.right(), node.relative_weight()) {
            out.push(SplitInfo {
                path: path.to_string(),
                direction: r.point.minus(&l.point).0,
                relative_weight: w,
            });
        }
    });
    out
}

/// Admissible split directions: cone membership, an optional normal filter,
/// and a finite sample used for free (non-anchored) splits.
#[derive(Clone, Debug)]
pub struct Dictionary {
    cone: Cone<f64>,
    chart: Option<Chart<f64>>,
    filter: Option<NormalFilter>,
    directions: Vec<Coords<f64>>,
    tol: f64,
}

impl Dictionary {
    pub fn new(
        cone: &Cone<f64>,
        chart: Option<&Chart<f64>>,
        grid: &CGrid,
        filter: Option<NormalFilter>,
        tol: f64,
    ) -> Result<Self> {
        let mut dict = Self {
            cone: cone.clone(),
            chart: chart.cloned(),
            filter,
            directions: vec![],
            tol,
        };
        if dict.filter.is_some() && dict.chart.is_none() {
            return Err(Error::OutOfRange("a normal filter needs a chart".into()));
        }
        let sample = cone.sample_directions(grid);
        dict.directions = sample.into_iter().filter(|d| dict.admits(d)).collect();
        if dict.directions.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        Ok(dict)
    }

    pub fn directions(&self) -> &[Coords<f64>] {
        &self.directions
    }

    pub fn cone(&self) -> &Cone<f64> {
        &self.cone
    }

    pub fn admits(&self, d: &Coords<f64>) -> bool {
        if d.norm_inf() <= 1e-14 {
            return false;
        }
        let scaled = d.scaled(&(1.0 / d.norm_inf()));
        if !self.cone.contains(&scaled, self.tol).unwrap_or(false) {
            return false;
        }
        match (&self.filter, &self.chart) {
            (Some(f), Some(chart)) => chart.normal_of(&scaled).map(|n| f.admits(n)).unwrap_or(false),
            _ => true,
        }
    }
}

/// Searches for a tree of depth at most `cfg.max_depth` whose flattening is
/// as close as possible (in transport distance) to `target`.
pub fn search(
    target: &DiscreteMeasure<f64, Coords<f64>>,
    chart: Option<&Chart<f64>>,
    cone: &Cone<f64>,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.check()?;
    let dict = Dictionary::new(cone, chart, &cfg.grid, cfg.normal_filter.clone(), cfg.tol.max(1e-12))?;
    let atoms: Vec<Coords<f64>> = target.atoms().iter().map(|a| a.point.clone()).collect();
    let weights: Vec<f64> = target.atoms().iter().map(|a| a.weight).collect();

    let table = MergeTable::build(&atoms, &weights, &dict, cfg)?;
    let mut nodes = table.masks_examined();
    if let Some(tree) = table.full_tree() {
        let defect = tree.flatten()?.distance(target)?;
        if defect <= cfg.tol {
            return Ok(SearchResult {
                tree,
                defect,
                nodes,
                status: SearchStatus::Exact,
                polytope_feasible: None,
            });
        }
    }

    let outcome = bnb::BranchAndBound::new(&atoms, &weights, &dict, &table, cfg).run()?;
    nodes += outcome.expansions;
    let tree = outcome.tree;
    let defect = tree.flatten()?.distance(target)?;
    if defect <= cfg.tol {
        return Ok(SearchResult {
            tree,
            defect,
            nodes,
            status: SearchStatus::Exact,
            polytope_feasible: None,
        });
    }
    let polytope_feasible = if cfg.certify {
        weight_polytope(&atoms, &dict, cfg.max_depth, &cfg.polytope)
            .and_then(|wp| wp.feasible(&weights))
            .ok()
    } else {
        None
    };
    let status = match polytope_feasible {
        Some(false) => SearchStatus::InfeasibleAtDepth,
        _ => SearchStatus::Approximate,
    };
    Ok(SearchResult {
        tree,
        defect,
        nodes,
        status,
        polytope_feasible,
    })
}

pub(crate) fn tree_from_root(root: SplitNode<f64, Coords<f64>>) -> Result<LaminateTree<f64, Coords<f64>>> {
    let mut root = root;
    // absorb rounding so the root carries exactly unit mass
    root.weight = 1.0;
    LaminateTree::new(root)
}
