use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{CGrid, Cone, Coords};
use crate::error::{Error, Result};

use super::poly::PolyFunc;

/// Axis-aligned box in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Region {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        if (0..3).any(|k| !(lo[k] < hi[k]) || !lo[k].is_finite() || !hi[k].is_finite()) {
            return Err(Error::OutOfRange(format!("empty or unbounded box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-h, h]³`.
    pub fn cube(h: f64) -> Self {
        Self {
            lo: [-h; 3],
            hi: [h; 3],
        }
    }

    /// Bounding box of `points`, each half-width inflated by `inflate` (relative)
    /// and raised to at least `min_half_width`.
    pub fn around(points: &[Coords<f64>], inflate: f64, min_half_width: f64) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p.0[k]);
                hi[k] = hi[k].max(p.0[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 3];
            hi = [0.0; 3];
        }
        for k in 0..3 {
            let mid = 0.5 * (lo[k] + hi[k]);
            let half = (0.5 * (hi[k] - lo[k]) * (1.0 + inflate)).max(min_half_width);
            lo[k] = mid - half;
            hi[k] = mid + half;
        }
        Self { lo, hi }
    }

    /// Maps the unit cube onto the box.
    pub fn point(&self, u: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|k| self.lo[k] + u[k] * (self.hi[k] - self.lo[k]))
    }

    /// Parameter interval of `p + t·d` inside the box.
    pub fn chord(&self, p: &[f64; 3], d: &[f64; 3]) -> Option<(f64, f64)> {
        let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..3 {
            if d[k].abs() < 1e-300 {
                if p[k] < self.lo[k] || p[k] > self.hi[k] {
                    return None;
                }
                continue;
            }
            let (t1, t2) = ((self.lo[k] - p[k]) / d[k], (self.hi[k] - p[k]) / d[k]);
            a = a.max(t1.min(t2));
            b = b.min(t1.max(t2));
        }
        (a <= b).then_some((a, b))
    }

    pub fn corners_and_center(&self) -> Vec<[f64; 3]> {
        let mut v: Vec<[f64; 3]> = (0..8)
            .map(|m| self.point([(m & 1) as f64, ((m >> 1) & 1) as f64, ((m >> 2) & 1) as f64]))
            .collect();
        v.push(self.point([0.5; 3]));
        v
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The `i`-th point of the three-dimensional Halton sequence.
pub fn halton3(i: u64) -> [f64; 3] {
    [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)]
}

/// Unit (Euclidean) sample directions of a cone.
pub fn unit_directions(cone: &Cone<f64>, grid: &CGrid) -> Vec<[f64; 3]> {
    cone.sample_directions(grid)
        .into_iter()
        .map(|d| {
            let n = d.norm_sq().sqrt();
            d.0.map(|v| v / n)
        })
        .collect()
}

/// Lines `halton(offset + i) × directions` through the box.
#[derive(Clone, Debug)]
pub struct LineSet {
    pub region: Region,
    pub directions: Vec<[f64; 3]>,
    pub bases: usize,
    pub offset: u64,
}

impl LineSet {
    /// About `samples` lines (rounded up to whole base points).
    pub fn new(region: Region, directions: Vec<[f64; 3]>, samples: usize, offset: u64) -> Self {
        let bases = if directions.is_empty() {
            0
        } else {
            samples.div_ceil(directions.len()).max(1)
        };
        Self {
            region,
            directions,
            bases,
            offset,
        }
    }

    pub fn len(&self) -> usize {
        self.bases * self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn base(&self, b: usize) -> [f64; 3] {
        self.region.point(halton3(self.offset + b as u64))
    }
}

/// `t ↦ D²_d f(p + t·d) = a + b·t + c·t²` for a fixed `d`, with
/// `a = h(p)`, `b = D_d h(p)` and `c = ½ D²_d h` where `h = D²_d f`.
#[derive(Clone, Debug)]
pub struct LineCurvature {
    h: Vec<([i32; 3], f64)>,
    k: Vec<([i32; 3], f64)>,
    c: f64,
}

fn compile(p: &PolyFunc<f64>) -> Vec<([i32; 3], f64)> {
    p.terms().map(|(e, c)| ([e[0] as i32, e[1] as i32, e[2] as i32], *c)).collect()
}

fn eval_compiled(terms: &[([i32; 3], f64)], x: &[f64; 3]) -> f64 {
    terms
        .iter()
        .map(|(e, c)| c * x[0].powi(e[0]) * x[1].powi(e[1]) * x[2].powi(e[2]))
        .sum()
}

impl LineCurvature {
    /// Requires a polynomial of degree at most 4 in three variables.
    pub fn new(f: &PolyFunc<f64>, d: &[f64; 3]) -> Self {
        debug_assert!(f.nvars() == 3 && f.degree() <= 4);
        let h = f.directional(d).directional(d);
        let k = h.directional(d);
        let c = 0.5 * k.directional(d).eval(&[0.0; 3]);
        Self {
            h: compile(&h),
            k: compile(&k),
            c,
        }
    }

    /// Minimum of the second derivative over `[lo, hi]` and where it is attained.
    pub fn min_on(&self, p: &[f64; 3], lo: f64, hi: f64) -> (f64, f64) {
        let a = eval_compiled(&self.h, p);
        let b = eval_compiled(&self.k, p);
        let g = |t: f64| a + t * (b + t * self.c);
        let mut best = (g(lo), lo);
        let at_hi = g(hi);
        if at_hi < best.0 {
            best = (at_hi, hi);
        }
        if self.c > 0.0 {
            let t = -b / (2.0 * self.c);
            if t > lo && t < hi {
                let v = g(t);
                if v < best.0 {
                    best = (v, t);
                }
            }
        }
        best
    }
}

/// A line and the point on it where convexity fails most.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub amount: f64,
    pub point: [f64; 3],
    pub direction: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    /// Largest negative part of a second derivative (0 if none).
    pub worst: f64,
    pub lines: usize,
    /// The most violated lines, worst first.
    pub top: Vec<Violation>,
}

/// Exact per-line minimum of the second derivative over every line in `set`.
/// Ties are broken by line index, so the result does not depend on threading.
pub fn scan(f: &PolyFunc<f64>, set: &LineSet, keep: usize) -> Scan {
    let curv: Vec<LineCurvature> = set.directions.iter().map(|d| LineCurvature::new(f, d)).collect();
    let nd = set.directions.len();
    let mut bad: Vec<(f64, usize, f64)> = (0..set.bases)
        .into_par_iter()
        .flat_map_iter(|b| {
            let p = set.base(b);
            let curv = &curv;
            let set = &set;
            (0..nd).filter_map(move |j| {
                let d = &set.directions[j];
                let (lo, hi) = set.region.chord(&p, d)?;
                let (v, t) = curv[j].min_on(&p, lo, hi);
                (v < 0.0).then_some((-v, b * nd + j, t))
            })
        })
        .collect();
    bad.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let worst = bad.first().map_or(0.0, |b| b.0);
    let top = bad
        .iter()
        .take(keep)
        .map(|&(amount, idx, t)| {
            let (b, j) = (idx / nd, idx % nd);
            let p = set.base(b);
            let d = set.directions[j];
            Violation {
                amount,
                point: [0, 1, 2].map(|k| p[k] + t * d[k]),
                direction: d,
            }
        })
        .collect();
    Scan {
        worst,
        lines: set.len(),
        top,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(cone: Cone<f64>, region: Region, n: usize) -> LineSet {
        LineSet::new(region, unit_directions(&cone, &CGrid::default()), n, 1)
    }

    #[test]
    fn convex_and_axis_affine_functions_pass() {
        let sq = PolyFunc::from_terms(3, [(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0), (vec![0, 0, 2], 1.0)]).unwrap();
        assert_eq!(scan(&sq, &lines(Cone::Quadric(0.1), Region::cube(1.0), 20_000), 4).worst, 0.0);
        let xyz = PolyFunc::monomial(&[1, 1, 1], -1.0);
        assert_eq!(scan(&xyz, &lines(Cone::Axes, Region::cube(1.0), 20_000), 4).worst, 0.0);
    }

    #[test]
    fn xyz_fails_along_lambda0() {
        let xyz = PolyFunc::monomial(&[1, 1, 1], -1.0);
        let s = scan(&xyz, &lines(Cone::Lambda0, Region::cube(1.0), 20_000), 4);
        assert!(s.worst > 0.1);
        // along (c, 0, 1) the second derivative is −2c·y, along (0, c, 1) it is −2c·x
        let v = &s.top[0];
        let (d, p) = (v.direction, v.point);
        assert!(d[1] == 0.0 && d[0] * d[2] * p[1] > 0.0 || d[0] == 0.0 && d[1] * d[2] * p[0] > 0.0, "{v:?}");
    }

    #[test]
    fn chord_and_minimum() {
        let r = Region::cube(1.0);
        assert_eq!(r.chord(&[0.0; 3], &[1.0, 0.0, 0.0]), Some((-1.0, 1.0)));
        assert_eq!(r.chord(&[0.5, 0.0, 0.0], &[0.5, 0.5, 0.0]), Some((-2.0, 1.0)));
        // second derivative of x⁴ along x at p: 12(p + t)²; minimum 0 at t = −p
        let f = PolyFunc::monomial(&[4, 0, 0], 1.0);
        let c = LineCurvature::new(&f, &[1.0, 0.0, 0.0]);
        let (v, t) = c.min_on(&[0.25, 0.0, 0.0], -1.25, 0.75);
        assert!(v.abs() < 1e-15 && (t + 0.25).abs() < 1e-15);
    }

    #[test]
    fn halton_is_in_the_unit_cube() {
        assert_eq!(halton3(1), [0.5, 1.0 / 3.0, 0.2]);
        for i in 0..1000 {
            assert!(halton3(i).iter().all(|u| (0.0..1.0).contains(u)));
        }
    }
}
