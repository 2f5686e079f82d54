//! The three-dimensional matrix subspaces carrying the eight-atom measures,
//! their coordinates and rank-one cones.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{rank_one_factor, Matrix, RANK_TOL};
use crate::point::Point;
use crate::scalar::{parse_scalar, Scalar};

/// Coordinates `(x, y, z)` with respect to a chart basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Coords<S>(pub [S; 3]);

impl<S: Scalar> Coords<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self([x, y, z])
    }

    pub fn ints(x: i64, y: i64, z: i64) -> Self {
        Self([S::from_i64(x), S::from_i64(y), S::from_i64(z)])
    }

    pub fn x(&self) -> &S {
        &self.0[0]
    }

    pub fn y(&self) -> &S {
        &self.0[1]
    }

    pub fn z(&self) -> &S {
        &self.0[2]
    }

    pub fn dot(&self, other: &Self) -> S {
        self.0
            .iter()
            .zip(&other.0)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = &self.0;
        let [d, e, f] = &o.0;
        Self([
            b.clone() * f.clone() - c.clone() * e.clone(),
            c.clone() * d.clone() - a.clone() * f.clone(),
            a.clone() * e.clone() - b.clone() * d.clone(),
        ])
    }

    pub fn to_f64(&self) -> Coords<f64> {
        Coords(self.0.clone().map(|v| v.to_f64()))
    }
}

impl<S: Scalar> Point<S> for Coords<S> {
    fn entries(&self) -> &[S] {
        &self.0
    }

    fn with_entries(&self, entries: Vec<S>) -> Self {
        Self(entries.try_into().expect("three coordinates"))
    }
}

impl<S: Scalar> fmt::Display for Coords<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Scales a direction to unit max-norm with the first nonzero coordinate positive.
pub fn canonical_direction(d: &Coords<f64>) -> Coords<f64> {
    let n = d.norm_inf();
    if n == 0.0 {
        return d.clone();
    }
    let lead = d.0.iter().copied().find(|v| v.abs() > 1e-12 * n).unwrap_or(1.0);
    let s = if lead < 0.0 { -1.0 / n } else { 1.0 / n };
    Coords(d.0.map(|v| v * s + 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind<S> {
    /// The 2×2 subspace `L_τ`.
    Tau(S),
    /// The 3×2 subspace spanned by `e₁₁`, `e₂₂` and `e₃₁ + e₃₂`.
    ThreeByTwo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart<S> {
    kind: ChartKind<S>,
    basis: [Matrix<S>; 3],
}

impl<S: Scalar> Chart<S> {
    /// Basis `[[1,0],[2τ,0]]`, `[[0,2τ],[0,1]]`, `τ[[1,1],[1,1]]`.
    /// At τ = 0 the third basis matrix vanishes and the chart is degenerate.
    pub fn tau(tau: S) -> Result<Self> {
        if tau < S::zero() || tau >= S::from_ratio(1, 2) {
            return Err(Error::OutOfRange(format!("tau = {tau} outside [0, 1/2)")));
        }
        let z = S::zero;
        let one = S::one;
        let two_tau = S::from_i64(2) * tau.clone();
        let basis = [
            Matrix::new(2, 2, vec![one(), z(), two_tau.clone(), z()])?,
            Matrix::new(2, 2, vec![z(), two_tau, z(), one()])?,
            Matrix::new(2, 2, vec![tau.clone(), tau.clone(), tau.clone(), tau.clone()])?,
        ];
        Ok(Self {
            kind: ChartKind::Tau(tau),
            basis,
        })
    }

    pub fn three_by_two() -> Self {
        let z = S::zero;
        let one = S::one;
        let basis = [
            Matrix::new(3, 2, vec![one(), z(), z(), z(), z(), z()]).unwrap(),
            Matrix::new(3, 2, vec![z(), z(), z(), one(), z(), z()]).unwrap(),
            Matrix::new(3, 2, vec![z(), z(), z(), z(), one(), one()]).unwrap(),
        ];
        Self {
            kind: ChartKind::ThreeByTwo,
            basis,
        }
    }

    /// `"tau:<t>"` or `"3x2"`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim() {
            "3x2" | "three-by-two" => Ok(Self::three_by_two()),
            s => match s.strip_prefix("tau:") {
                Some(t) => Self::tau(parse_scalar(t)?),
                None => Err(Error::Parse(format!("unknown chart {spec:?}"))),
            },
        }
    }

    pub fn kind(&self) -> &ChartKind<S> {
        &self.kind
    }

    pub fn tau_value(&self) -> Option<&S> {
        match &self.kind {
            ChartKind::Tau(t) => Some(t),
            ChartKind::ThreeByTwo => None,
        }
    }

    pub fn basis(&self) -> &[Matrix<S>; 3] {
        &self.basis
    }

    pub fn matrix_rows(&self) -> usize {
        self.basis[0].rows()
    }

    pub fn to_f64(&self) -> Chart<f64> {
        Chart {
            kind: match &self.kind {
                ChartKind::Tau(t) => ChartKind::Tau(t.to_f64()),
                ChartKind::ThreeByTwo => ChartKind::ThreeByTwo,
            },
            basis: self.basis.clone().map(|b| b.to_f64()),
        }
    }

    /// The chart's own rank-one cone.
    pub fn rank_one_cone(&self) -> Cone<S> {
        match &self.kind {
            ChartKind::Tau(t) => Cone::Quadric(t.clone()),
            ChartKind::ThreeByTwo => Cone::Axes,
        }
    }

    /// `x·B₁ + y·B₂ + z·B₃`.
    pub fn coords_to_matrix(&self, c: &Coords<S>) -> Matrix<S> {
        self.basis
            .iter()
            .zip(&c.0)
            .fold(self.basis[0].zero_like(), |acc, (b, s)| acc.plus(&b.scaled(s)))
    }

    /// Least-squares coordinates; fails when the residual exceeds `tol·|M|∞`.
    pub fn matrix_to_coords(&self, m: &Matrix<S>, tol: f64) -> Result<Coords<S>> {
        if !m.same_shape(&self.basis[0]) {
            return Err(Error::Dimension("matrix shape differs from chart".into()));
        }
        let gram: Vec<Vec<S>> = self
            .basis
            .iter()
            .map(|a| self.basis.iter().map(|b| a.dot(b)).collect())
            .collect();
        let rhs: Vec<S> = self.basis.iter().map(|b| b.dot(m)).collect();
        let det = det3(&gram);
        if det.is_zero() || (!S::EXACT && det.to_f64().abs() < 1e-300) {
            let t = self.tau_value().map_or(f64::NAN, Scalar::to_f64);
            return Err(Error::DegenerateChart(t));
        }
        let solve = |k: usize| {
            let replaced: Vec<Vec<S>> = gram
                .iter()
                .zip(&rhs)
                .map(|(row, r)| {
                    let mut row = row.clone();
                    row[k] = r.clone();
                    row
                })
                .collect();
            det3(&replaced) / det.clone()
        };
        let c = Coords([solve(0), solve(1), solve(2)]);
        let residual = m.minus(&self.coords_to_matrix(&c)).norm_inf();
        if residual > S::from_f64(tol) * m.norm_inf() {
            return Err(Error::NotInSubspace {
                residual: residual.to_f64(),
            });
        }
        Ok(c)
    }

    /// Layer normal of a rank-one direction.
    pub fn normal_of(&self, d: &Coords<S>) -> Result<[f64; 2]> {
        Ok(rank_one_factor(&self.coords_to_matrix(d), RANK_TOL)?.normal)
    }
}

fn det3<S: Scalar>(m: &[Vec<S>]) -> S {
    let t = |i: usize, j: usize| m[i][j].clone();
    t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) - t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0))
        + t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0))
}

/// Rank-one direction sets in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Cone<S> {
    /// `(1+2τ)xy + τxz + τyz = 0`.
    Quadric(S),
    /// `xy = 0`, the τ → 0 limit of the quadric.
    Lambda0,
    /// The three coordinate axes.
    Axes,
    /// An explicit finite list of directions (up to scale).
    Dictionary(Vec<Coords<S>>),
}

impl<S: Scalar> Cone<S> {
    /// `"tau:<t>"`, `"lambda0"`, `"axes"`; `"dict:@file"` is resolved by the caller
    /// through `load` which returns the file's directions.
    pub fn parse_with(
        spec: &str,
        load: impl FnOnce(&str) -> Result<Vec<Coords<S>>>,
    ) -> Result<Self> {
        match spec.trim() {
            "lambda0" => Ok(Cone::Lambda0),
            "axes" => Ok(Cone::Axes),
            s => {
                if let Some(t) = s.strip_prefix("tau:") {
                    let tau: S = parse_scalar(t)?;
                    if tau < S::zero() {
                        return Err(Error::OutOfRange("negative tau".into()));
                    }
                    Ok(Cone::Quadric(tau))
                } else if let Some(path) = s.strip_prefix("dict:@") {
                    let dirs = load(path)?;
                    if dirs.is_empty() {
                        return Err(Error::EmptyDictionary);
                    }
                    Ok(Cone::Dictionary(dirs))
                } else {
                    Err(Error::Parse(format!("unknown cone {spec:?}")))
                }
            }
        }
    }

    pub fn parse(spec: &str) -> Result<Self> {
        Self::parse_with(spec, |_| {
            Err(Error::Parse("dictionary cones need a file loader".into()))
        })
    }

    /// Scale-invariant membership. Quadric/Λ₀: the form's residual relative to
    /// `|d|²`; axes/dictionary: angle to the nearest listed line at most `tol`.
    pub fn contains(&self, d: &Coords<S>, tol: f64) -> Result<bool> {
        if d.is_zero() {
            return Err(Error::ZeroDirection);
        }
        let [x, y, z] = &d.0;
        let bound = S::from_f64(tol) * d.norm_sq();
        Ok(match self {
            Cone::Quadric(t) => {
                let q = (S::one() + S::from_i64(2) * t.clone()) * x.clone() * y.clone()
                    + t.clone() * x.clone() * z.clone()
                    + t.clone() * y.clone() * z.clone();
                q.abs() <= bound
            }
            Cone::Lambda0 => (x.clone() * y.clone()).abs() <= bound,
            Cone::Axes => [Coords::ints(1, 0, 0), Coords::ints(0, 1, 0), Coords::ints(0, 0, 1)]
                .iter()
                .any(|e| parallel(d, e, tol)),
            Cone::Dictionary(dirs) => dirs.iter().any(|e| !e.is_zero() && parallel(d, e, tol)),
        })
    }

    pub fn to_f64(&self) -> Cone<f64> {
        match self {
            Cone::Quadric(t) => Cone::Quadric(t.to_f64()),
            Cone::Lambda0 => Cone::Lambda0,
            Cone::Axes => Cone::Axes,
            Cone::Dictionary(d) => Cone::Dictionary(d.iter().map(Coords::to_f64).collect()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Cone::Quadric(t) => format!("tau:{t}"),
            Cone::Lambda0 => "lambda0".into(),
            Cone::Axes => "axes".into(),
            Cone::Dictionary(d) => format!("dict[{}]", d.len()),
        }
    }
}

/// `|d × e| ≤ sin(tol)·|d|·|e|`, squared so exact fields need no roots.
fn parallel<S: Scalar>(d: &Coords<S>, e: &Coords<S>, tol: f64) -> bool {
    let s = tol.min(std::f64::consts::FRAC_PI_2).sin();
    let lhs = d.cross(e).norm_sq();
    let rhs = S::from_f64(s * s) * d.norm_sq() * e.norm_sq();
    lhs <= rhs
}

pub fn in_cone<S: Scalar>(d: &Coords<S>, cone: &Cone<S>, tol: f64) -> Result<bool> {
    cone.contains(d, tol)
}

/// Denominators below this magnitude make the family parameter singular.
pub const FAMILY_SINGULAR: f64 = 1e-14;

/// The pair `(c, −τc/(c+τ(1+2c)), 1)` and `(−τc/(c+τ(1+2c)), c, 1)` of
/// quadric-cone directions.
pub fn cone_family<S: Scalar>(c: &S, tau: &S) -> Result<(Coords<S>, Coords<S>)> {
    let den = c.clone() + tau.clone() * (S::one() + S::from_i64(2) * c.clone());
    if den.to_f64().abs() < FAMILY_SINGULAR {
        return Err(Error::SingularParameter(den.to_f64()));
    }
    let off = -(tau.clone() * c.clone()) / den;
    Ok((
        Coords::new(c.clone(), off.clone(), S::one()),
        Coords::new(off, c.clone(), S::one()),
    ))
}

/// The `c → ∞` limit of [`cone_family`].
pub fn cone_family_at_infinity<S: Scalar>() -> (Coords<S>, Coords<S>) {
    (Coords::ints(1, 0, 0), Coords::ints(0, 1, 0))
}

/// Signed logarithmic grid for the family parameter `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct CGrid {
    pub c_lo: f64,
    pub c_hi: f64,
    /// Number of log-spaced magnitudes in `[c_lo, c_hi]`; each is used with both signs.
    pub samples: usize,
}

impl Default for CGrid {
    fn default() -> Self {
        Self {
            c_lo: 1.0 / 16.0,
            c_hi: 16.0,
            samples: 65,
        }
    }
}

impl CGrid {
    pub fn magnitudes(&self) -> Vec<f64> {
        if self.samples == 0 {
            return vec![];
        }
        if self.samples == 1 {
            return vec![self.c_lo];
        }
        let (a, b) = (self.c_lo.log2(), self.c_hi.log2());
        (0..self.samples)
            .map(|i| {
                let u = a + (b - a) * i as f64 / (self.samples - 1) as f64;
                u.exp2()
            })
            .collect()
    }

    /// `±` magnitudes, ascending.
    pub fn values(&self) -> Vec<f64> {
        let m = self.magnitudes();
        m.iter().rev().map(|v| -v).chain(m.iter().copied()).collect()
    }
}

impl Cone<f64> {
    /// Finite direction sample: the c-grid families plus `c = 0` and `c = ∞`
    /// for the quadric and Λ₀ cones, the listed lines otherwise. Canonical,
    /// deduplicated, and sorted lexicographically.
    pub fn sample_directions(&self, grid: &CGrid) -> Vec<Coords<f64>> {
        let axes = [
            Coords::ints(1, 0, 0),
            Coords::ints(0, 1, 0),
            Coords::ints(0, 0, 1),
        ];
        let mut dirs: Vec<Coords<f64>> = match self {
            Cone::Quadric(tau) => {
                let mut v = axes.to_vec();
                for c in grid.values() {
                    if let Ok((a, b)) = cone_family(&c, tau) {
                        v.push(a);
                        v.push(b);
                    }
                }
                v
            }
            Cone::Lambda0 => {
                let mut v = axes.to_vec();
                for c in grid.values() {
                    v.push(Coords::new(c, 0.0, 1.0));
                    v.push(Coords::new(0.0, c, 1.0));
                }
                v
            }
            Cone::Axes => axes.to_vec(),
            Cone::Dictionary(d) => d.iter().filter(|e| !e.is_zero()).cloned().collect(),
        };
        for d in dirs.iter_mut() {
            *d = canonical_direction(d);
        }
        dirs.sort_by(|a, b| lex_cmp(a, b));
        dirs.dedup_by(|a, b| a.minus(b).norm_inf() <= 1e-12);
        dirs
    }
}

pub fn lex_cmp(a: &Coords<f64>, b: &Coords<f64>) -> std::cmp::Ordering {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    #[test]
    fn coords_to_matrix_examples() {
        let chart = Chart::tau(0.1).unwrap();
        let m = chart.coords_to_matrix(&Coords::ints(1, 1, 1));
        let want = [1.1, 0.3, 0.3, 1.1];
        for (a, b) in m.entries().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(chart.coords_to_matrix(&Coords::ints(0, 0, 0)).is_zero());

        let c32 = Chart::<Q>::three_by_two();
        let x2 = c32.coords_to_matrix(&Coords::ints(1, 1, 1));
        assert_eq!(
            x2.to_rows(),
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]]
        );
    }

    #[test]
    fn matrix_to_coords_examples() {
        let tau = rat(1, 20);
        let chart = Chart::tau(tau.clone()).unwrap();
        let one = Q::one();
        let three = rat(3, 1);
        let x7 = Matrix::new(
            2,
            2,
            vec![-(&one + &tau), -(&three * &tau), -(&three * &tau), -(&one + &tau)],
        )
        .unwrap();
        assert_eq!(chart.matrix_to_coords(&x7, 0.0).unwrap(), Coords::ints(-1, -1, -1));
        let zero = Matrix::<Q>::zeros(2, 2).unwrap();
        assert_eq!(chart.matrix_to_coords(&zero, 0.0).unwrap(), Coords::ints(0, 0, 0));

        let chart = Chart::tau(0.1).unwrap();
        let e11 = Matrix::new(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            chart.matrix_to_coords(&e11, 1e-10),
            Err(Error::NotInSubspace { .. })
        ));
    }

    #[test]
    fn degenerate_chart_at_zero() {
        let chart = Chart::tau(Q::zero()).unwrap();
        let m = chart.coords_to_matrix(&Coords::ints(1, 1, 1));
        assert!(matches!(chart.matrix_to_coords(&m, 0.0), Err(Error::DegenerateChart(_))));
        assert!(Chart::tau(rat(1, 2)).is_err());
        assert!(Chart::tau(rat(-1, 10)).is_err());
    }

    #[test]
    fn cone_membership_examples() {
        let q = Cone::Quadric(rat(1, 10));
        assert!(q.contains(&Coords::ints(0, 0, 1), 0.0).unwrap());
        assert!(!q.contains(&Coords::ints(1, 1, 0), 1e-9).unwrap());
        assert!(Cone::<Q>::Lambda0.contains(&Coords::ints(2, 0, 1), 0.0).unwrap());
        assert!(!Cone::<Q>::Lambda0.contains(&Coords::ints(2, 1, 1), 0.0).unwrap());
        assert!(Cone::<Q>::Axes.contains(&Coords::ints(0, -3, 0), 0.0).unwrap());
        assert!(!Cone::<Q>::Axes.contains(&Coords::ints(0, 1, 1), 0.0).unwrap());
        assert_eq!(q.contains(&Coords::ints(0, 0, 0), 0.0), Err(Error::ZeroDirection));
        let dict = Cone::<Q>::Dictionary(vec![Coords::ints(1, 2, 3)]);
        assert!(dict.contains(&Coords::ints(-2, -4, -6), 0.0).unwrap());
        assert!(!dict.contains(&Coords::ints(1, 2, 4), 1e-6).unwrap());
    }

    #[test]
    fn membership_is_scale_invariant() {
        let cones = [Cone::Quadric(rat(1, 7)), Cone::Lambda0, Cone::Axes];
        let dirs = [Coords::ints(2, 0, 1), Coords::ints(1, 1, 1), Coords::ints(0, 0, 5)];
        for cone in &cones {
            for d in &dirs {
                for s in [rat(-3, 1), rat(1, 5), rat(7, 2)] {
                    assert_eq!(
                        cone.contains(d, 0.0).unwrap(),
                        cone.contains(&d.scaled(&s), 0.0).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn family_examples() {
        let (a, b) = cone_family(&rat(1, 1), &rat(1, 10)).unwrap();
        assert_eq!(a, Coords::new(rat(1, 1), rat(-1, 13), rat(1, 1)));
        assert_eq!(b, Coords::new(rat(-1, 13), rat(1, 1), rat(1, 1)));
        let q = Cone::Quadric(rat(1, 10));
        assert!(q.contains(&a, 0.0).unwrap() && q.contains(&b, 0.0).unwrap());

        let (a, b) = cone_family(&Q::zero(), &rat(1, 10)).unwrap();
        assert_eq!(a, Coords::ints(0, 0, 1));
        assert_eq!(b, Coords::ints(0, 0, 1));

        // large c approaches the c = ∞ directions
        let (a, b) = cone_family(&1e9, &0.1).unwrap();
        let (ea, eb) = cone_family_at_infinity::<f64>();
        let close = |d: &Coords<f64>, e: &Coords<f64>| {
            let u = d.scaled(&(1.0 / d.norm_inf()));
            u.minus(e).norm_inf().min(u.plus(e).norm_inf()) < 1e-8
        };
        assert!(close(&a, &ea) && close(&b, &eb));

        // τ = 0 with c = 0 makes the denominator vanish
        assert!(matches!(cone_family(&0.0, &0.0), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn normal_examples() {
        let chart = Chart::tau(0.1).unwrap();
        assert_eq!(chart.normal_of(&Coords::ints(1, 0, 0)).unwrap(), [1.0, 0.0]);
        let n = chart.normal_of(&Coords::ints(0, 0, 1)).unwrap();
        assert!((n[0] - 0.5f64.sqrt()).abs() < 1e-15 && (n[1] - 0.5f64.sqrt()).abs() < 1e-15);

        let (a, _) = cone_family(&1.0, &0.1).unwrap();
        let n = chart.normal_of(&a).unwrap();
        let want = canonical_unit_vec([1.0, 0.1 / 1.3]);
        assert!((n[0] - want[0]).abs() < 1e-12 && (n[1] - want[1]).abs() < 1e-12);

        assert_eq!(chart.normal_of(&Coords::ints(1, 1, 0)), Err(Error::NotRankOne));
    }

    fn canonical_unit_vec(v: [f64; 2]) -> [f64; 2] {
        let l = v[0].hypot(v[1]);
        [v[0] / l, v[1] / l]
    }

    #[test]
    fn grid_contains_powers_of_two() {
        let g = CGrid::default();
        let m = g.magnitudes();
        assert_eq!(m.len(), 65);
        assert_eq!(m[0], 1.0 / 16.0);
        assert_eq!(m[64], 16.0);
        assert!(m.contains(&2.0) && m.contains(&1.0) && m.contains(&0.5));
        let dirs = Cone::Quadric(0.05).sample_directions(&g);
        assert!(dirs.len() > 200);
        assert_eq!(Cone::<f64>::Axes.sample_directions(&g).len(), 3);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(Cone::<Q>::parse("tau:1/10").unwrap(), Cone::Quadric(rat(1, 10)));
        assert_eq!(Cone::<Q>::parse("lambda0").unwrap(), Cone::Lambda0);
        assert_eq!(Cone::<f64>::parse("axes").unwrap(), Cone::Axes);
        assert!(Cone::<f64>::parse("bogus").is_err());
        let dict = Cone::<f64>::parse_with("dict:@x.json", |_| Ok(vec![Coords::ints(1, 0, 0)]));
        assert_eq!(dict.unwrap(), Cone::Dictionary(vec![Coords::ints(1, 0, 0)]));
        assert_eq!(Chart::<Q>::parse("3x2").unwrap(), Chart::three_by_two());
        assert_eq!(Chart::<f64>::parse("tau:0.05").unwrap(), Chart::tau(0.05).unwrap());
    }
}
