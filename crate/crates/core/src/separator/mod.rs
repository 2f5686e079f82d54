//! Cone-convex polynomial separators.
//!
//! A separator is a polynomial `f` in chart coordinates, convex along every
//! cone direction, with `f(0) > ⟨f, ν⟩`. Its existence shows that the
//! barycenter-zero measure `ν` is not a laminate for that cone. The search is an
//! LP over coefficients with `|c|∞ ≤ 1`; convexity along lines is imposed
//! lazily, adding the most violated lines found by an exact per-line scan.
//! A final dense scan over independent lines decides the status.

mod lines;
mod poly;

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Solution, Variable};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chart::{CGrid, Cone, Coords};
use crate::error::{Error, Result};
use crate::json::{float_to_json, scalar_to_json};
use crate::measure::DiscreteMeasure;
use crate::point::Point;
use crate::scalar::Scalar;

pub use lines::{halton3, scan, unit_directions, LineCurvature, LineSet, Region, Scan, Violation};
pub use poly::{monomials, PolyFunc};

#[derive(Clone, Debug, PartialEq)]
pub struct SeparatorConfig {
    /// Directions used for LP constraints and the per-round scan.
    pub grid: CGrid,
    /// Directions used for the final dense check.
    pub dense_grid: CGrid,
    /// Lines scanned per constraint-generation round.
    pub scan_lines: usize,
    /// Lines in the dense check.
    pub dense_lines: usize,
    pub per_round: usize,
    pub max_rounds: usize,
    /// Relative inflation of the support's bounding box.
    pub inflate: f64,
    pub min_half_width: f64,
    /// Tolerances are `rel_tol · |c|₁`.
    pub rel_tol: f64,
    /// Weight of the `|c|₁` penalty that keeps unconstrained coefficients at 0.
    pub regularization: f64,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        Self {
            grid: CGrid::default(),
            dense_grid: CGrid {
                c_lo: 1.0 / 64.0,
                c_hi: 64.0,
                samples: 129,
            },
            scan_lines: 50_000,
            dense_lines: 1_000_000,
            per_round: 32,
            max_rounds: 50,
            inflate: 0.1,
            min_half_width: 0.5,
            rel_tol: 1e-9,
            regularization: 1e-7,
        }
    }
}

impl SeparatorConfig {
    pub fn region_for(&self, target: &DiscreteMeasure<f64, Coords<f64>>) -> Region {
        let pts: Vec<Coords<f64>> = target.atoms().iter().map(|a| a.point.clone()).collect();
        Region::around(&pts, self.inflate, self.min_half_width)
    }

    fn dense_set(&self, cone: &Cone<f64>, region: Region) -> LineSet {
        // offset far from the scan's indices so the two sets share no base point
        LineSet::new(region, unit_directions(cone, &self.dense_grid), self.dense_lines, 1 << 40)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Verified,
    Refuted,
    Inconclusive,
}

impl CertStatus {
    pub fn label(self) -> &'static str {
        match self {
            CertStatus::Verified => "verified",
            CertStatus::Refuted => "refuted",
            CertStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub f: PolyFunc<f64>,
    /// `f(0) − ⟨f, ν⟩`, rounded from `gap_exact`.
    pub gap: f64,
    pub gap_exact: BigRational,
    /// Worst convexity violation on the dense lines.
    pub violation: f64,
    /// Violation and gap threshold, relative to `|c|₁`.
    pub tolerance: f64,
    pub status: CertStatus,
    pub region: Region,
    pub lp_constraints: usize,
    pub dense_lines: usize,
    pub rounds: usize,
    /// LP optimum after each round.
    pub objective_history: Vec<f64>,
    /// A multiple of `|x|²` was added to absorb residual violations.
    pub repaired: bool,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "coefficients": self.f.to_json()["terms"],
            "variables": self.f.nvars(),
            "gap": float_to_json(self.gap),
            "gap_exact": scalar_to_json(&self.gap_exact),
            "violation": float_to_json(self.violation),
            "tolerance": float_to_json(self.tolerance),
            "status": self.status.label(),
            "region": {"lo": self.region.lo.map(float_to_json), "hi": self.region.hi.map(float_to_json)},
            "samples": {
                "lp_constraints": self.lp_constraints,
                "dense_lines": self.dense_lines,
                "rounds": self.rounds,
            },
            "objective_history": self.objective_history.iter().map(|v| float_to_json(*v)).collect::<Vec<_>>(),
            "repaired": self.repaired,
        })
    }
}

/// Worst negative second derivative of `f` along `samples` lines through
/// `region` in directions of `cone` (dense direction grid).
pub fn convexity_violation(f: &PolyFunc<f64>, cone: &Cone<f64>, region: &Region, samples: usize) -> Result<f64> {
    check_poly(f)?;
    let set = LineSet::new(
        region.clone(),
        unit_directions(cone, &SeparatorConfig::default().dense_grid),
        samples,
        1 << 40,
    );
    Ok(scan(f, &set, 0).worst)
}

fn check_poly(f: &PolyFunc<f64>) -> Result<()> {
    if f.nvars() != 3 {
        return Err(Error::Dimension(format!(
            "convexity checks need chart coordinates, got {} variables",
            f.nvars()
        )));
    }
    if f.degree() > 4 {
        return Err(Error::OutOfRange(format!("degree {} exceeds 4", f.degree())));
    }
    Ok(())
}

/// `f(0) − ⟨f, ν⟩` in exact arithmetic (coefficients and atoms read as exact binary values).
pub fn exact_gap(f: &PolyFunc<f64>, target: &DiscreteMeasure<f64, Coords<f64>>) -> BigRational {
    let fe = f.to_exact();
    let origin = vec![BigRational::zero(); f.nvars()];
    let mut gap = fe.eval(&origin);
    for a in target.atoms() {
        let x: Vec<BigRational> = a.point.0.iter().map(|v| <BigRational as Scalar>::from_f64(*v)).collect();
        gap -= <BigRational as Scalar>::from_f64(a.weight) * fe.eval(&x);
    }
    gap
}

fn status_of(gap: f64, violation: f64, tol: f64) -> CertStatus {
    if violation > tol {
        CertStatus::Refuted
    } else if gap > tol {
        CertStatus::Verified
    } else {
        CertStatus::Inconclusive
    }
}

/// Recomputes the gap exactly and the violation on the dense lines; the status
/// follows from those alone.
pub fn verify_certificate(
    cert: &Certificate,
    cone: &Cone<f64>,
    target: &DiscreteMeasure<f64, Coords<f64>>,
    cfg: &SeparatorConfig,
) -> Result<Certificate> {
    check_poly(&cert.f)?;
    let region = cfg.region_for(target);
    let dense = scan(&cert.f, &cfg.dense_set(cone, region.clone()), 0);
    let gap_exact = exact_gap(&cert.f, target);
    let gap = Scalar::to_f64(&gap_exact);
    let tol = cfg.rel_tol * cert.f.norm_l1();
    Ok(Certificate {
        gap,
        gap_exact,
        violation: dense.worst,
        tolerance: tol,
        status: status_of(gap, dense.worst, tol),
        region,
        dense_lines: dense.lines,
        ..cert.clone()
    })
}

/// Wraps a given polynomial in an unverified certificate.
pub fn certificate_for(f: PolyFunc<f64>) -> Certificate {
    Certificate {
        f,
        gap: 0.0,
        gap_exact: BigRational::zero(),
        violation: 0.0,
        tolerance: 0.0,
        status: CertStatus::Inconclusive,
        region: Region::cube(1.0),
        lp_constraints: 0,
        dense_lines: 0,
        rounds: 0,
        objective_history: vec![],
        repaired: false,
    }
}

/// `D²_d m(q)` for the monomial with exponents `e`.
fn monomial_curvature(e: &[u32], q: &[f64; 3], d: &[f64; 3]) -> f64 {
    let mono = |ex: [i64; 3]| -> f64 {
        if ex.iter().any(|&k| k < 0) {
            0.0
        } else {
            q[0].powi(ex[0] as i32) * q[1].powi(ex[1] as i32) * q[2].powi(ex[2] as i32)
        }
    };
    let e = [e[0] as i64, e[1] as i64, e[2] as i64];
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if d[i] == 0.0 || d[j] == 0.0 {
                continue;
            }
            let mut ex = e;
            let c = if i == j {
                (e[i] * (e[i] - 1)) as f64
            } else {
                (e[i] * e[j]) as f64
            };
            if c == 0.0 {
                continue;
            }
            ex[i] -= 1;
            ex[j] -= 1;
            s += d[i] * d[j] * c * mono(ex);
        }
    }
    s
}

struct Lp {
    basis: Vec<Vec<u32>>,
    pos: Vec<Variable>,
    neg: Vec<Variable>,
    constraints: usize,
}

impl Lp {
    fn row(&self, q: &[f64; 3], d: &[f64; 3]) -> LinearExpr {
        let mut expr = LinearExpr::empty();
        for (k, e) in self.basis.iter().enumerate() {
            let v = monomial_curvature(e, q, d);
            if v != 0.0 {
                expr.add(self.pos[k], v);
                expr.add(self.neg[k], -v);
            }
        }
        expr
    }

    fn poly(&self, sol: &Solution) -> PolyFunc<f64> {
        let terms = self.basis.iter().enumerate().filter_map(|(k, e)| {
            let c = *sol.var_value(self.pos[k]) - *sol.var_value(self.neg[k]);
            // snap LP round-off so that bound-attaining coefficients are exact
            let c = if (c.abs() - 1.0).abs() < 1e-12 { c.signum() } else { c };
            (c.abs() > 1e-12).then(|| (e.clone(), c))
        });
        PolyFunc::from_terms(3, terms).expect("three variables")
    }
}

/// Maximizes `f(0) − ⟨f, target⟩` over polynomials of degree `2..=degree`
/// with `|c|∞ ≤ 1` that are convex along the cone on the target's box.
///
/// Constant and linear terms are omitted: they do not change the gap of a
/// barycenter-zero measure nor any second derivative.
pub fn separate(
    target: &DiscreteMeasure<f64, Coords<f64>>,
    cone: &Cone<f64>,
    degree: u32,
    cfg: &SeparatorConfig,
) -> Result<Certificate> {
    if !(2..=4).contains(&degree) {
        return Err(Error::OutOfRange(format!("degree {degree} outside 2..=4")));
    }
    let bary = target.barycenter();
    if bary.norm_inf() > 1e-9 {
        return Err(Error::InvalidMeasure(format!("target barycenter {bary} is not 0")));
    }
    let region = cfg.region_for(target);
    let directions = unit_directions(cone, &cfg.grid);
    if directions.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let basis = monomials(3, 2, degree);

    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let mut pos = Vec::with_capacity(basis.len());
    let mut neg = Vec::with_capacity(basis.len());
    for e in &basis {
        let m = PolyFunc::monomial(e, 1.0);
        let obj = m.eval(&[0.0; 3]) - target.integrate(|p| m.eval(&p.0));
        pos.push(problem.add_var(obj - cfg.regularization, (0.0, 1.0)));
        neg.push(problem.add_var(-obj - cfg.regularization, (0.0, 1.0)));
    }
    let mut lp = Lp {
        basis,
        pos,
        neg,
        constraints: 0,
    };
    for q in region.corners_and_center() {
        for d in &directions {
            problem.add_constraint(lp.row(&q, d), ComparisonOp::Ge, 0.0);
            lp.constraints += 1;
        }
    }
    let mut sol = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;

    let scan_set = LineSet::new(region.clone(), directions, cfg.scan_lines, 1);
    let dense_set = cfg.dense_set(cone, region.clone());
    let mut history = vec![sol.objective()];
    let mut rounds = 0;
    let mut f = lp.poly(&sol);
    let mut dense: Option<Scan> = None;
    while rounds < cfg.max_rounds {
        rounds += 1;
        let tol = cfg.rel_tol * f.norm_l1();
        let mut s = scan(&f, &scan_set, cfg.per_round);
        if s.worst <= tol {
            let d = scan(&f, &dense_set, cfg.per_round);
            if d.worst <= tol {
                dense = Some(d);
                break;
            }
            s = d;
        }
        for v in &s.top {
            sol = sol
                .add_constraint(lp.row(&v.point, &v.direction), ComparisonOp::Ge, 0.0)
                .map_err(|e| Error::Lp(e.to_string()))?;
            lp.constraints += 1;
        }
        history.push(sol.objective());
        f = lp.poly(&sol);
    }

    let mut dense = match dense {
        Some(d) => d,
        None => scan(&f, &dense_set, 0),
    };
    let mut repaired = false;
    if dense.worst > cfg.rel_tol * f.norm_l1() {
        // D²_d |x|² = 2 for unit d, so ε|x|² with 2ε above the violation convexifies every dense line
        let eps = 0.5 * dense.worst * (1.0 + 1e-6) + 1e-15;
        let ball = PolyFunc::from_terms(3, (0..3).map(|k| {
            let mut e = vec![0; 3];
            e[k] = 2;
            (e, eps)
        }))?;
        let g = f.plus(&ball);
        let s = g.norm_inf().max(1.0);
        f = g.scaled(&(1.0 / s));
        dense = scan(&f, &dense_set, 0);
        repaired = true;
    }

    let gap_exact = exact_gap(&f, target);
    let gap = Scalar::to_f64(&gap_exact);
    let tol = cfg.rel_tol * f.norm_l1();
    Ok(Certificate {
        status: status_of(gap, dense.worst, tol),
        f,
        gap,
        gap_exact,
        violation: dense.worst,
        tolerance: tol,
        region,
        lp_constraints: lp.constraints,
        dense_lines: dense.lines,
        rounds,
        objective_history: history,
        repaired,
    })
}
