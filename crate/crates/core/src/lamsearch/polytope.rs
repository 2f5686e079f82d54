use std::collections::{BTreeMap, HashMap};

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::chart::{canonical_direction, Coords};
use crate::error::{Error, Result};
use crate::hull::Hull;
use crate::point::{dist_inf, Point};

use super::Dictionary;

#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeOptions {
    /// How many times midpoints are inserted between consecutive grid values.
    pub refinements: usize,
    /// Refinement stops once an axis would exceed this many values.
    pub max_axis_values: usize,
    /// Explosion guard on LP columns.
    pub max_variables: usize,
}

impl Default for PolytopeOptions {
    fn default() -> Self {
        Self {
            refinements: 2,
            max_axis_values: 9,
            max_variables: 400_000,
        }
    }
}

#[derive(Clone, Debug)]
struct Move {
    left: usize,
    right: usize,
    frac_right: f64,
}

/// Leaf-weight vectors reachable by depth-bounded lamination on a grid.
///
/// Mass starts at the barycenter; at every level each grid node may keep its
/// mass or send any part of it through two-point splits along admissible
/// directions to other grid nodes. After `depth` levels the mass must sit on
/// the support. Mixed splits make this a relaxation of grid trees of that
/// depth, so an infeasible weight vector has no such tree.
#[derive(Clone, Debug)]
pub struct WeightPolytope {
    support: Vec<Coords<f64>>,
    nodes: Vec<Coords<f64>>,
    node_index: HashMap<[i64; 3], usize>,
    moves: Vec<Vec<Move>>,
    depth: usize,
    dict: Dictionary,
    opts: PolytopeOptions,
}

fn key(p: &Coords<f64>) -> [i64; 3] {
    p.0.map(|v| (v * 1e9).round() as i64)
}

fn axis_values(support: &[Coords<f64>], axis: usize, opts: &PolytopeOptions) -> Vec<f64> {
    let mut v: Vec<f64> = support.iter().map(|p| p.0[axis]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    for _ in 0..opts.refinements {
        if 2 * v.len() - 1 > opts.max_axis_values {
            break;
        }
        let mut refined = Vec::with_capacity(2 * v.len());
        for w in v.windows(2) {
            refined.push(w[0]);
            refined.push(0.5 * (w[0] + w[1]));
        }
        refined.push(*v.last().unwrap());
        v = refined;
    }
    v
}

/// Builds the grid and the admissible splits between grid nodes.
pub fn weight_polytope(
    support: &[Coords<f64>],
    dict: &Dictionary,
    depth: usize,
    opts: &PolytopeOptions,
) -> Result<WeightPolytope> {
    if support.is_empty() || support.len() > 16 {
        return Err(Error::Explosion(format!("support of {} points (1..=16 supported)", support.len())));
    }
    let hull = Hull::new(support);
    let axes: Vec<Vec<f64>> = (0..3).map(|k| axis_values(support, k, opts)).collect();
    let mut wp = WeightPolytope {
        support: support.to_vec(),
        nodes: vec![],
        node_index: HashMap::new(),
        moves: vec![],
        depth,
        dict: dict.clone(),
        opts: opts.clone(),
    };
    for &x in &axes[0] {
        for &y in &axes[1] {
            for &z in &axes[2] {
                let p = Coords::new(x, y, z);
                if hull.contains(&p) {
                    wp.push_node(p);
                }
            }
        }
    }
    for p in support {
        wp.push_node(p.clone());
    }
    let n = wp.nodes.len();
    wp.moves = (0..n).map(|i| wp.moves_from(i)).collect();
    let columns: usize = wp.moves.iter().map(|m| m.len() + 1).sum::<usize>() * depth.max(1);
    if columns > opts.max_variables {
        return Err(Error::Explosion(format!(
            "{columns} flow variables exceed the cap {}",
            opts.max_variables
        )));
    }
    Ok(wp)
}

impl WeightPolytope {
    fn push_node(&mut self, p: Coords<f64>) -> usize {
        let k = key(&p);
        if let Some(&i) = self.node_index.get(&k) {
            return i;
        }
        self.nodes.push(p);
        self.node_index.insert(k, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn moves_from(&self, i: usize) -> Vec<Move> {
        let p = &self.nodes[i];
        let mut lines: BTreeMap<[i64; 3], Vec<(f64, usize)>> = BTreeMap::new();
        for (j, q) in self.nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let u = q.minus(p);
            if !self.dict.admits(&u) {
                continue;
            }
            let c = canonical_direction(&u);
            let t = u.dot(&c) / c.dot(&c);
            lines.entry(key(&c)).or_default().push((t, j));
        }
        let mut out = Vec::new();
        for marks in lines.values() {
            for &(tr, r) in marks.iter().filter(|(t, _)| *t > 0.0) {
                for &(tl, l) in marks.iter().filter(|(t, _)| *t < 0.0) {
                    out.push(Move {
                        left: l,
                        right: r,
                        frac_right: -tl / (tr - tl),
                    });
                }
            }
        }
        out
    }

    pub fn grid_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn split_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn root_for(&self, root: Option<&Coords<f64>>, weights: &[f64]) -> Result<(WeightPolytope, usize)> {
        if weights.len() != self.support.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} support points",
                weights.len(),
                self.support.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure("weights must be nonnegative and sum to 1".into()));
        }
        let root = match root {
            Some(r) => r.clone(),
            None => {
                let mut b = Coords::new(0.0, 0.0, 0.0);
                for (p, w) in self.support.iter().zip(weights) {
                    b = b.plus(&p.scaled(w));
                }
                b
            }
        };
        let mut wp = self.clone();
        let before = wp.nodes.len();
        let r = wp.push_node(root);
        if r == before {
            // a new node: splits out of it, and into it from existing nodes
            wp.moves.push(wp.moves_from(r));
            for i in 0..before {
                wp.moves[i] = wp.moves_from(i);
            }
        }
        Ok((wp, r))
    }

    /// Nodes reachable from `root` after each level.
    fn reach(&self, root: usize) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![root]];
        let mut seen = vec![false; self.nodes.len()];
        seen[root] = true;
        for _ in 0..self.depth {
            let mut next = levels.last().unwrap().clone();
            for &p in levels.last().unwrap() {
                for m in &self.moves[p] {
                    for q in [m.left, m.right] {
                        if !seen[q] {
                            seen[q] = true;
                            next.push(q);
                        }
                    }
                }
            }
            next.sort_unstable();
            levels.push(next);
        }
        levels
    }

    /// Builds the flow LP; returns the problem and, for every node reachable at
    /// the last level, the expression for its final mass.
    fn flow(&self, root: usize, problem: &mut Problem) -> Vec<(usize, Vec<(Variable, f64)>)> {
        let levels = self.reach(root);
        let mut inflow: HashMap<usize, Vec<(Variable, f64)>> = HashMap::new();
        for k in 0..self.depth {
            let mut next: HashMap<usize, Vec<(Variable, f64)>> = HashMap::new();
            for &p in &levels[k] {
                let mut out: Vec<(Variable, f64)> = Vec::new();
                let stay = problem.add_var(0.0, (0.0, f64::INFINITY));
                out.push((stay, 1.0));
                next.entry(p).or_default().push((stay, 1.0));
                for m in &self.moves[p] {
                    let v = problem.add_var(0.0, (0.0, f64::INFINITY));
                    out.push((v, 1.0));
                    next.entry(m.right).or_default().push((v, m.frac_right));
                    next.entry(m.left).or_default().push((v, 1.0 - m.frac_right));
                }
                if k == 0 {
                    problem.add_constraint(out, ComparisonOp::Eq, 1.0);
                } else {
                    let mut e = out;
                    if let Some(inc) = inflow.get(&p) {
                        e.extend(inc.iter().map(|&(v, c)| (v, -c)));
                    }
                    problem.add_constraint(e, ComparisonOp::Eq, 0.0);
                }
            }
            inflow = next;
        }
        if self.depth == 0 {
            let v = problem.add_var(0.0, (1.0, 1.0));
            return vec![(root, vec![(v, 1.0)])];
        }
        let mut finals: Vec<(usize, Vec<(Variable, f64)>)> = inflow.into_iter().collect();
        finals.sort_by_key(|(p, _)| *p);
        finals
    }

    fn support_nodes(&self) -> Vec<usize> {
        self.support.iter().map(|p| self.node_index[&key(p)]).collect()
    }

    /// Whether `weights` (aligned with the support) is reachable from its own barycenter.
    pub fn feasible(&self, weights: &[f64]) -> Result<bool> {
        self.feasible_from(None, weights)
    }

    /// Whether `weights` is reachable from `root`.
    pub fn feasible_at(&self, root: &Coords<f64>, weights: &[f64]) -> Result<bool> {
        self.feasible_from(Some(root), weights)
    }

    fn feasible_from(&self, root: Option<&Coords<f64>>, weights: &[f64]) -> Result<bool> {
        let (wp, root) = self.root_for(root, weights)?;
        let mut target: HashMap<usize, f64> = HashMap::new();
        for (i, w) in wp.support_nodes().into_iter().zip(weights) {
            *target.entry(i).or_default() += w;
        }
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let finals = wp.flow(root, &mut problem);
        let reached: HashMap<usize, Vec<(Variable, f64)>> = finals.into_iter().collect();
        for (i, w) in &target {
            if *w > 1e-15 && !reached.contains_key(i) {
                return Ok(false);
            }
        }
        let mut keys: Vec<&usize> = reached.keys().collect();
        keys.sort_unstable();
        for p in keys {
            let w = target.get(p).copied().unwrap_or(0.0);
            problem.add_constraint(reached[p].clone(), ComparisonOp::Eq, w);
        }
        match problem.solve() {
            Ok(_) => Ok(true),
            Err(minilp::Error::Infeasible) => Ok(false),
            Err(e) => Err(Error::Lp(e.to_string())),
        }
    }

    /// Smallest transport distance between a reachable final distribution and
    /// `weights` on the support.
    pub fn min_defect(&self, weights: &[f64]) -> Result<f64> {
        self.min_defect_from(None, weights)
    }

    pub fn min_defect_at(&self, root: &Coords<f64>, weights: &[f64]) -> Result<f64> {
        self.min_defect_from(Some(root), weights)
    }

    fn min_defect_from(&self, root: Option<&Coords<f64>>, weights: &[f64]) -> Result<f64> {
        let (wp, root) = self.root_for(root, weights)?;
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let finals = wp.flow(root, &mut problem);
        let mut columns: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); wp.support.len()];
        for (p, expr) in finals {
            let mut e = expr.iter().map(|&(v, c)| (v, -c)).collect::<Vec<_>>();
            for (j, a) in wp.support.iter().enumerate() {
                let g = problem.add_var(dist_inf(&wp.nodes[p], a), (0.0, f64::INFINITY));
                e.push((g, 1.0));
                columns[j].push((g, 1.0));
            }
            problem.add_constraint(e, ComparisonOp::Eq, 0.0);
        }
        for (col, w) in columns.into_iter().zip(weights) {
            problem.add_constraint(col, ComparisonOp::Eq, *w);
        }
        let sol = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        Ok(sol.objective().max(0.0))
    }

    pub fn options(&self) -> &PolytopeOptions {
        &self.opts
    }
}
