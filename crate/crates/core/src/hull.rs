//! Convex hulls of small point sets in three dimensions, stored as halfspaces.

use crate::chart::Coords;

const EPS: f64 = 1e-9;

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = norm(&a);
    [a[0] / n, a[1] / n, a[2] / n]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hull {
    /// Affine dimension of the point set (0..=3).
    pub dim: usize,
    /// `n · x = b` constraints cutting out the affine span.
    pub equalities: Vec<([f64; 3], f64)>,
    /// `n · x ≤ b` facets within the span, with unit normals.
    pub facets: Vec<([f64; 3], f64)>,
    scale: f64,
}

impl Hull {
    pub fn new(points: &[Coords<f64>]) -> Self {
        let pts: Vec<[f64; 3]> = points.iter().map(|p| p.0).collect();
        let scale = pts
            .iter()
            .flat_map(|p| p.iter().map(|v| v.abs()))
            .fold(1.0f64, f64::max);
        let tol = EPS * scale;
        let Some(origin) = pts.first().copied() else {
            return Self {
                dim: 0,
                equalities: vec![],
                facets: vec![],
                scale,
            };
        };

        // Orthonormal basis of the span of differences.
        let mut basis: Vec<[f64; 3]> = Vec::new();
        for p in &pts {
            let mut v = sub(p, &origin);
            for b in &basis {
                let c = dot(&v, b);
                v = [v[0] - c * b[0], v[1] - c * b[1], v[2] - c * b[2]];
            }
            if norm(&v) > tol && basis.len() < 3 {
                basis.push(unit(v));
            }
        }
        let dim = basis.len();

        let mut equalities = Vec::new();
        let mut complement: Vec<[f64; 3]> = Vec::new();
        for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let mut v = e;
            for b in basis.iter().chain(complement.iter()) {
                let c = dot(&v, b);
                v = [v[0] - c * b[0], v[1] - c * b[1], v[2] - c * b[2]];
            }
            if norm(&v) > 1e-6 && basis.len() + complement.len() < 3 {
                complement.push(unit(v));
            }
        }
        for n in &complement {
            equalities.push((*n, dot(n, &origin)));
        }

        let mut candidates: Vec<[f64; 3]> = Vec::new();
        match dim {
            3 => {
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        for k in j + 1..pts.len() {
                            let n = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                            if norm(&n) > tol * tol {
                                candidates.push(unit(n));
                            }
                        }
                    }
                }
            }
            2 => {
                let plane = complement[0];
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        let n = cross(&plane, &sub(&pts[j], &pts[i]));
                        if norm(&n) > tol * tol {
                            candidates.push(unit(n));
                        }
                    }
                }
            }
            1 => candidates.push(basis[0]),
            _ => {}
        }

        let mut facets: Vec<([f64; 3], f64)> = Vec::new();
        for n in candidates {
            for s in [1.0, -1.0] {
                let n = [s * n[0], s * n[1], s * n[2]];
                let b = pts.iter().map(|p| dot(&n, p)).fold(f64::NEG_INFINITY, f64::max);
                let touching = pts.iter().filter(|p| dot(&n, p) >= b - tol).count();
                let is_facet = match dim {
                    3 => touching >= 3,
                    2 => touching >= 2,
                    _ => true,
                };
                let dup = facets
                    .iter()
                    .any(|(m, c)| (dot(m, &n) - 1.0).abs() < 1e-9 && (c - b).abs() <= tol);
                if is_facet && !dup {
                    facets.push((n, b));
                }
            }
        }
        Self {
            dim,
            equalities,
            facets,
            scale,
        }
    }

    pub fn contains(&self, p: &Coords<f64>) -> bool {
        let tol = EPS * self.scale;
        self.equalities.iter().all(|(n, b)| (dot(n, &p.0) - b).abs() <= tol)
            && self.facets.iter().all(|(n, b)| dot(n, &p.0) <= b + tol)
    }

    /// The parameter interval `[t_lo, t_hi]` for which `p + t·d` stays in the
    /// hull, assuming `p` is inside. `None` if the line leaves the affine span.
    pub fn line_range(&self, p: &Coords<f64>, d: &Coords<f64>) -> Option<(f64, f64)> {
        let tol = EPS * self.scale;
        let dn = norm(&d.0);
        if self.equalities.iter().any(|(n, _)| dot(n, &d.0).abs() > EPS * dn) {
            return None;
        }
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (n, b) in &self.facets {
            let rate = dot(n, &d.0);
            let slack = (b - dot(n, &p.0)).max(0.0);
            if rate > EPS * dn {
                hi = hi.min(slack / rate);
            } else if rate < -EPS * dn {
                lo = lo.max(-slack / -rate);
            } else if slack < -tol {
                return None;
            }
        }
        Some((lo, hi))
    }

    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.scale
    }
}
