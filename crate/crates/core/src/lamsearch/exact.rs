use crate::chart::{canonical_direction, Coords};
use crate::error::{Error, Result};
use crate::laminate::{LaminateTree, SplitNode};
use crate::point::Point;

use super::{Dictionary, SearchConfig};

/// Largest support handled by the subset enumeration.
pub const MAX_ATOMS: usize = 16;
const UNREACHABLE: u8 = u8::MAX;

/// For every subset of the target atoms: whether its barycenter is the root of
/// a tree (of bounded depth) whose leaves are exactly those atoms with their
/// full weights.
#[derive(Clone, Debug)]
pub struct MergeTable {
    n: usize,
    weight: Vec<f64>,
    bary: Vec<Coords<f64>>,
    depth: Vec<u8>,
    /// Left part of the chosen split (the right part is the complement in the mask).
    split: Vec<u32>,
    examined: usize,
}

impl MergeTable {
    pub fn build(atoms: &[Coords<f64>], weights: &[f64], dict: &Dictionary, cfg: &SearchConfig) -> Result<Self> {
        let n = atoms.len();
        if n > MAX_ATOMS {
            return Err(Error::Explosion(format!("{n} atoms exceed the subset enumeration limit {MAX_ATOMS}")));
        }
        let size = 1usize << n;
        let mut weight = vec![0.0; size];
        let mut moment = vec![[0.0f64; 3]; size];
        for m in 1..size {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            weight[m] = weight[rest] + weights[low];
            for k in 0..3 {
                moment[m][k] = moment[rest][k] + weights[low] * atoms[low].0[k];
            }
        }
        let bary: Vec<Coords<f64>> = (0..size)
            .map(|m| {
                if m == 0 {
                    Coords::new(0.0, 0.0, 0.0)
                } else if m.count_ones() == 1 {
                    atoms[m.trailing_zeros() as usize].clone()
                } else {
                    let w = weight[m];
                    Coords::new(moment[m][0] / w, moment[m][1] / w, moment[m][2] / w)
                }
            })
            .collect();

        let mut depth = vec![UNREACHABLE; size];
        let mut split = vec![0u32; size];
        for i in 0..n {
            depth[1 << i] = 0;
        }
        let max_depth = cfg.max_depth.min(UNREACHABLE as usize - 1) as u8;
        let mut order: Vec<usize> = (1..size).filter(|m| m.count_ones() >= 2).collect();
        order.sort_by_key(|m| (m.count_ones(), *m));
        let mut examined = n;
        for &m in &order {
            examined += 1;
            let low = m & m.wrapping_neg();
            let mut best: Option<(u8, u32)> = None;
            // proper submasks containing the lowest atom
            let mut a = (m - 1) & m;
            while a > 0 {
                if a & low != 0 {
                    let b = m ^ a;
                    let (da, db) = (depth[a], depth[b]);
                    if da != UNREACHABLE && db != UNREACHABLE {
                        let d = da.max(db) + 1;
                        if d <= max_depth && best.map_or(true, |(bd, _)| d < bd) {
                            let frac = weight[b] / weight[m];
                            let in_bounds = frac >= cfg.w_min && frac <= cfg.w_max;
                            if in_bounds && dict.admits(&bary[b].minus(&bary[a])) {
                                best = Some((d, a as u32));
                            }
                        }
                    }
                }
                a = (a - 1) & m;
            }
            if let Some((d, a)) = best {
                depth[m] = d;
                split[m] = a;
            }
        }
        Ok(Self {
            n,
            weight,
            bary,
            depth,
            split,
            examined,
        })
    }

    pub fn masks_examined(&self) -> usize {
        self.examined
    }

    pub fn full_mask(&self) -> usize {
        (1usize << self.n) - 1
    }

    pub fn is_reachable(&self, mask: usize) -> bool {
        self.depth[mask] != UNREACHABLE
    }

    pub fn depth_of(&self, mask: usize) -> Option<usize> {
        self.is_reachable(mask).then(|| self.depth[mask] as usize)
    }

    pub fn weight_of(&self, mask: usize) -> f64 {
        self.weight[mask]
    }

    pub fn barycenter_of(&self, mask: usize) -> &Coords<f64> {
        &self.bary[mask]
    }

    /// Reachable subsets, ordered by size and then by mask.
    pub fn reachable(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (1..self.weight.len()).filter(|&m| self.is_reachable(m)).collect();
        v.sort_by_key(|m| (m.count_ones(), *m));
        v
    }

    /// The subtree for `mask` with every weight multiplied by `scale / weight(mask)`.
    pub fn subtree(&self, mask: usize, scale: f64) -> SplitNode<f64, Coords<f64>> {
        let factor = scale / self.weight[mask];
        self.grow(mask, factor)
    }

    fn grow(&self, mask: usize, factor: f64) -> SplitNode<f64, Coords<f64>> {
        let point = self.bary[mask].clone();
        let w = self.weight[mask] * factor;
        if mask.count_ones() == 1 {
            return SplitNode::leaf(point, w);
        }
        let a = self.split[mask] as usize;
        let b = mask ^ a;
        let d = self.bary[b].minus(&self.bary[a]);
        let c = canonical_direction(&d);
        let aligned = c.0.iter().zip(&d.0).map(|(x, y)| x * y).sum::<f64>() >= 0.0;
        let (l, r) = if aligned { (a, b) } else { (b, a) };
        SplitNode::with_children(point, w, self.grow(l, factor), self.grow(r, factor))
    }

    pub fn full_tree(&self) -> Option<LaminateTree<f64, Coords<f64>>> {
        let full = self.full_mask();
        if !self.is_reachable(full) {
            return None;
        }
        super::tree_from_root(self.subtree(full, 1.0)).ok()
    }
}
