use std::cmp::Ordering;
use std::collections::HashMap;

use crate::chart::{canonical_direction, lex_cmp, Coords};
use crate::error::Result;
use crate::hull::Hull;
use crate::laminate::{LaminateTree, SplitNode};
use crate::point::{dist_inf, Point};
use crate::transport::transport_cost;

use super::{Dictionary, MergeTable, SearchConfig};

const T_EPS: f64 = 1e-9;

pub(super) struct Outcome {
    pub tree: LaminateTree<f64, Coords<f64>>,
    pub expansions: usize,
}

/// A point where some subset of the atoms can be merged exactly.
struct Anchor {
    point: Coords<f64>,
    /// `(depth, mask)` sorted ascending.
    masks: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
enum Kind {
    Open,
    Leaf,
    Graft(usize),
    Split(usize, usize),
}

#[derive(Clone, Debug)]
struct Node {
    point: Coords<f64>,
    weight: f64,
    depth: usize,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Choice {
    Leaf,
    Graft(usize),
    Split {
        dir: Coords<f64>,
        left: Coords<f64>,
        right: Coords<f64>,
        frac_right: f64,
    },
}

impl Choice {
    fn rank(&self) -> u8 {
        match self {
            Choice::Graft(_) => 0,
            Choice::Split { .. } => 1,
            Choice::Leaf => 2,
        }
    }
}

fn key(p: &Coords<f64>) -> [i64; 3] {
    p.0.map(|v| (v * 1e8).round() as i64)
}

pub(super) struct BranchAndBound<'a> {
    atoms: &'a [Coords<f64>],
    weights: &'a [f64],
    dict: &'a Dictionary,
    table: &'a MergeTable,
    cfg: &'a SearchConfig,
    hull: Hull,
    anchors: Vec<Anchor>,
    anchor_index: HashMap<[i64; 3], usize>,
    gap: Vec<f64>,

    arena: Vec<Node>,
    open: Vec<usize>,
    delivered: Vec<f64>,
    free_cost: f64,
    expansions: usize,
    best: f64,
    best_tree: Option<SplitNode<f64, Coords<f64>>>,
    /// Deviations from the heuristic order still allowed in the current pass.
    slack: usize,
    truncated: bool,
}

impl<'a> BranchAndBound<'a> {
    pub fn new(
        atoms: &'a [Coords<f64>],
        weights: &'a [f64],
        dict: &'a Dictionary,
        table: &'a MergeTable,
        cfg: &'a SearchConfig,
    ) -> Self {
        let mut anchors: Vec<Anchor> = Vec::new();
        let mut anchor_index = HashMap::new();
        for mask in table.reachable() {
            let p = table.barycenter_of(mask).clone();
            let depth = table.depth_of(mask).unwrap_or(0);
            let idx = *anchor_index.entry(key(&p)).or_insert_with(|| {
                anchors.push(Anchor { point: p, masks: vec![] });
                anchors.len() - 1
            });
            anchors[idx].masks.push((depth, mask));
        }
        for a in anchors.iter_mut() {
            a.masks.sort();
        }
        let gap = (0..atoms.len())
            .map(|j| {
                (0..atoms.len())
                    .filter(|&k| k != j)
                    .map(|k| dist_inf(&atoms[j], &atoms[k]))
                    .fold(f64::INFINITY, f64::min)
            })
            .map(|g| if g.is_finite() { g } else { 0.0 })
            .collect();
        Self {
            atoms,
            weights,
            dict,
            table,
            cfg,
            hull: Hull::new(atoms),
            anchors,
            anchor_index,
            gap,
            arena: vec![],
            open: vec![],
            delivered: vec![0.0; atoms.len()],
            free_cost: 0.0,
            expansions: 0,
            best: f64::INFINITY,
            best_tree: None,
            slack: 0,
            truncated: false,
        }
    }

    pub fn run(mut self) -> Result<Outcome> {
        let total: f64 = self.weights.iter().sum();
        let mut root = Coords::new(0.0, 0.0, 0.0);
        for (a, w) in self.atoms.iter().zip(self.weights) {
            root = root.plus(&a.scaled(&(w / total)));
        }
        self.arena.push(Node {
            point: root,
            weight: 1.0,
            depth: 0,
            kind: Kind::Open,
        });
        self.open.push(0);
        // limited-discrepancy passes: a pass may deviate from the heuristic
        // order at no more than `slack` nodes; the last pass is unrestricted
        let mut slack = 0;
        loop {
            self.slack = slack;
            self.truncated = false;
            self.dfs()?;
            if self.stop() || !self.truncated {
                break;
            }
            slack = if slack >= 64 { usize::MAX } else { slack + 1 };
        }
        let root = self.best_tree.expect("depth-first search always completes one tree");
        Ok(Outcome {
            tree: super::tree_from_root(root)?,
            expansions: self.expansions,
        })
    }

    fn nearest(&self, p: &Coords<f64>) -> f64 {
        self.atoms.iter().map(|a| dist_inf(a, p)).fold(f64::INFINITY, f64::min)
    }

    fn anchor_at(&self, p: &Coords<f64>) -> Option<usize> {
        self.anchor_index.get(&key(p)).copied()
    }

    fn lower_bound(&self) -> f64 {
        let excess: f64 = self
            .delivered
            .iter()
            .zip(self.weights)
            .zip(&self.gap)
            .map(|((d, w), g)| (d - w).max(0.0) * g)
            .sum();
        self.free_cost + excess
    }

    fn stop(&self) -> bool {
        self.best <= self.cfg.tol || (self.expansions >= self.cfg.node_budget && self.best_tree.is_some())
    }

    fn dfs(&mut self) -> Result<()> {
        if self.stop() {
            return Ok(());
        }
        let Some(id) = self.open.pop() else {
            return self.evaluate();
        };
        self.expansions += 1;
        let choices = self.choices(id);
        for (rank, choice) in choices.iter().enumerate() {
            if self.stop() {
                break;
            }
            let cost = rank.min(1);
            if cost > self.slack {
                self.truncated = true;
                break;
            }
            let undo = self.apply(id, choice);
            if self.lower_bound() < self.best - 1e-12 {
                self.slack -= cost;
                self.dfs()?;
                self.slack += cost;
            }
            self.revert(id, undo);
        }
        self.open.push(id);
        Ok(())
    }

    /// Point cost used to order choices: zero at anchors that fit in the
    /// remaining depth, otherwise the distance to the nearest atom.
    fn point_cost(&self, p: &Coords<f64>, remaining: usize) -> f64 {
        match self.anchor_at(p) {
            Some(a) if self.anchors[a].masks[0].0 <= remaining => 0.0,
            _ => self.nearest(p),
        }
    }

    fn choices(&self, id: usize) -> Vec<Choice> {
        let node = &self.arena[id];
        let (p, w) = (&node.point, node.weight);
        let remaining = self.cfg.max_depth.saturating_sub(node.depth);
        let mut scored: Vec<(f64, Choice)> = Vec::new();

        match self.anchor_at(p) {
            Some(a) => {
                for &(d, mask) in &self.anchors[a].masks {
                    if d <= remaining {
                        let wm = self.table.weight_of(mask);
                        let excess: f64 = (0..self.atoms.len())
                            .filter(|j| mask >> j & 1 == 1)
                            .map(|j| {
                                let add = w * self.weights[j] / wm;
                                let over = (self.delivered[j] + add - self.weights[j]).max(0.0)
                                    - (self.delivered[j] - self.weights[j]).max(0.0);
                                over * self.gap[j]
                            })
                            .sum();
                        scored.push((excess, Choice::Graft(mask)));
                    }
                }
                if scored.is_empty() {
                    scored.push((w * self.nearest(p), Choice::Leaf));
                }
            }
            None => scored.push((w * self.nearest(p), Choice::Leaf)),
        }

        if remaining >= 1 {
            let mut lines: Vec<(Coords<f64>, Vec<(f64, Option<usize>)>)> = Vec::new();
            let mut line_index: HashMap<[i64; 3], usize> = HashMap::new();
            for (ai, a) in self.anchors.iter().enumerate() {
                let u = a.point.minus(p);
                if u.norm_inf() <= 1e-12 || !self.dict.admits(&u) {
                    continue;
                }
                let c = canonical_direction(&u);
                let t = u.dot(&c) / c.dot(&c);
                let idx = *line_index.entry(key(&c)).or_insert_with(|| {
                    lines.push((c.clone(), vec![]));
                    lines.len() - 1
                });
                lines[idx].1.push((t, Some(ai)));
            }
            for d in self.dict.directions() {
                line_index.entry(key(d)).or_insert_with(|| {
                    lines.push((d.clone(), vec![]));
                    lines.len() - 1
                });
            }
            for (c, marks) in &lines {
                let Some((lo, hi)) = self.hull.line_range(p, c) else {
                    continue;
                };
                if hi <= T_EPS || lo >= -T_EPS {
                    continue;
                }
                let mut pos: Vec<(f64, Option<usize>)> =
                    marks.iter().filter(|(t, _)| *t > T_EPS && *t <= hi + T_EPS).cloned().collect();
                let mut neg: Vec<(f64, Option<usize>)> = marks
                    .iter()
                    .filter(|(t, _)| *t < -T_EPS && *t >= lo - T_EPS)
                    .map(|(t, a)| (-t, *a))
                    .collect();
                if !pos.iter().any(|(t, _)| (t - hi).abs() <= T_EPS) {
                    pos.push((hi, None));
                }
                if !neg.iter().any(|(t, _)| (t + lo).abs() <= T_EPS) {
                    neg.push((-lo, None));
                }
                for (tr, ar) in &pos {
                    for (tl, al) in &neg {
                        let frac_right = tl / (tr + tl);
                        if frac_right < self.cfg.w_min || frac_right > self.cfg.w_max {
                            continue;
                        }
                        let right = match ar {
                            Some(a) => self.anchors[*a].point.clone(),
                            None => p.plus(&c.scaled(tr)),
                        };
                        let left = match al {
                            Some(a) => self.anchors[*a].point.clone(),
                            None => p.minus(&c.scaled(tl)),
                        };
                        let h = w * frac_right * self.point_cost(&right, remaining - 1)
                            + w * (1.0 - frac_right) * self.point_cost(&left, remaining - 1);
                        scored.push((
                            h,
                            Choice::Split {
                                dir: c.clone(),
                                left,
                                right,
                                frac_right,
                            },
                        ));
                    }
                }
            }
        }

        scored.sort_by(|(ha, a), (hb, b)| {
            ha.total_cmp(hb)
                .then(a.rank().cmp(&b.rank()))
                .then_with(|| match (a, b) {
                    (Choice::Graft(x), Choice::Graft(y)) => x.cmp(y),
                    (
                        Choice::Split { dir: da, frac_right: fa, .. },
                        Choice::Split { dir: db, frac_right: fb, .. },
                    ) => lex_cmp(da, db).then(fa.total_cmp(fb)),
                    _ => Ordering::Equal,
                })
        });
        scored.into_iter().map(|(_, c)| c).collect()
    }

    fn apply(&mut self, id: usize, choice: &Choice) -> usize {
        let arena_len = self.arena.len();
        let (w, depth) = (self.arena[id].weight, self.arena[id].depth);
        match choice {
            Choice::Leaf => {
                self.free_cost += w * self.nearest(&self.arena[id].point);
                self.arena[id].kind = Kind::Leaf;
            }
            Choice::Graft(mask) => {
                let wm = self.table.weight_of(*mask);
                for j in 0..self.atoms.len() {
                    if mask >> j & 1 == 1 {
                        self.delivered[j] += w * self.weights[j] / wm;
                    }
                }
                self.arena[id].kind = Kind::Graft(*mask);
            }
            Choice::Split {
                left,
                right,
                frac_right,
                ..
            } => {
                let l = self.arena.len();
                self.arena.push(Node {
                    point: left.clone(),
                    weight: w * (1.0 - frac_right),
                    depth: depth + 1,
                    kind: Kind::Open,
                });
                self.arena.push(Node {
                    point: right.clone(),
                    weight: w * frac_right,
                    depth: depth + 1,
                    kind: Kind::Open,
                });
                self.arena[id].kind = Kind::Split(l, l + 1);
                self.open.push(l);
                self.open.push(l + 1);
            }
        }
        arena_len
    }

    fn revert(&mut self, id: usize, arena_len: usize) {
        let node = &self.arena[id];
        let w = node.weight;
        match node.kind.clone() {
            Kind::Leaf => {
                self.free_cost -= w * self.nearest(&self.arena[id].point);
            }
            Kind::Graft(mask) => {
                let wm = self.table.weight_of(mask);
                for j in 0..self.atoms.len() {
                    if mask >> j & 1 == 1 {
                        self.delivered[j] -= w * self.weights[j] / wm;
                    }
                }
            }
            Kind::Split(l, r) => {
                // children were fully resolved and re-opened by the recursion
                self.open.retain(|&k| k != l && k != r);
            }
            Kind::Open => {}
        }
        self.arena[id].kind = Kind::Open;
        self.arena.truncate(arena_len);
    }

    fn evaluate(&mut self) -> Result<()> {
        let mut supply: Vec<f64> = Vec::new();
        let mut points: Vec<Coords<f64>> = Vec::new();
        for (j, &d) in self.delivered.iter().enumerate() {
            if d > 1e-15 {
                supply.push(d);
                points.push(self.atoms[j].clone());
            }
        }
        for node in &self.arena {
            if matches!(node.kind, Kind::Leaf) && node.weight > 0.0 {
                supply.push(node.weight);
                points.push(node.point.clone());
            }
        }
        let total: f64 = supply.iter().sum();
        for s in supply.iter_mut() {
            *s /= total;
        }
        let cost = transport_cost(&supply, self.weights, |i, j| dist_inf(&points[i], &self.atoms[j]))?;
        if cost < self.best - 1e-15 {
            self.best = cost;
            self.best_tree = Some(self.build(0));
        }
        Ok(())
    }

    fn build(&self, id: usize) -> SplitNode<f64, Coords<f64>> {
        let node = &self.arena[id];
        match node.kind {
            Kind::Leaf | Kind::Open => SplitNode::leaf(node.point.clone(), node.weight),
            Kind::Graft(mask) => {
                let mut sub = self.table.subtree(mask, node.weight);
                sub.point = node.point.clone();
                sub
            }
            Kind::Split(l, r) => SplitNode::with_children(node.point.clone(), node.weight, self.build(l), self.build(r)),
        }
    }
}
