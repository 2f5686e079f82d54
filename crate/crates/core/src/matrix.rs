//! Small dense matrices (m ≤ 3 rows, two columns), rank detection and
//! rank-one factorization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Scalar;

/// Default relative tolerance for the floating-point rank test.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    /// Row-major constructor. Rows in `1..=3`, exactly two columns.
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if !(1..=3).contains(&rows) || cols != 2 {
            return Err(Error::Dimension(format!("unsupported shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !S::EXACT && data.iter().any(|x| !x.to_f64().is_finite()) {
            return Err(Error::Dimension("non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![S::zero(); rows * cols])
    }

    pub fn identity2() -> Self {
        Self::new(2, 2, vec![S::one(), S::zero(), S::zero(), S::one()]).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// All 2×2 minors (rows i<k, the two columns).
    pub fn minors(&self) -> Vec<S> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for k in i + 1..self.rows {
                out.push(
                    self.get(i, 0).clone() * self.get(k, 1).clone()
                        - self.get(i, 1).clone() * self.get(k, 0).clone(),
                );
            }
        }
        out
    }

    /// Determinant of a 2×2 matrix.
    pub fn det2(&self) -> Result<S> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::Dimension(format!(
                "det2 needs 2x2, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.minors().remove(0))
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Self) -> S {
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

impl<S: Scalar> Point<S> for Matrix<S> {
    fn entries(&self) -> &[S] {
        &self.data
    }

    fn with_entries(&self, entries: Vec<S>) -> Self {
        debug_assert_eq!(entries.len(), self.data.len());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: entries,
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankVerdict {
    Zero,
    RankOne,
    RankTwo,
}

/// Rank classification.
///
/// Exact fields: rank one iff every 2×2 minor vanishes. Doubles: rank one iff
/// `σ₂ ≤ tol·σ₁`, with the singular values taken from the Gram invariants
/// `σ₁²+σ₂² = |M|²` and `σ₁²σ₂² = Σ minors²`.
pub fn rank_verdict<S: Scalar>(m: &Matrix<S>, tol: f64) -> RankVerdict {
    if m.is_zero() {
        return RankVerdict::Zero;
    }
    if S::EXACT {
        return if m.minors().iter().all(|x| x.is_zero()) {
            RankVerdict::RankOne
        } else {
            RankVerdict::RankTwo
        };
    }
    let (s1, s2) = singular_values(&m.to_f64());
    if s1 == 0.0 {
        RankVerdict::Zero
    } else if s2 <= tol * s1 {
        RankVerdict::RankOne
    } else {
        RankVerdict::RankTwo
    }
}

pub fn rank_one_test<S: Scalar>(m: &Matrix<S>, tol: f64) -> bool {
    rank_verdict(m, tol) == RankVerdict::RankOne
}

/// Singular values `(σ₁, σ₂)` of an m×2 matrix.
pub fn singular_values(m: &Matrix<f64>) -> (f64, f64) {
    let scale = m.norm_inf();
    if scale == 0.0 {
        return (0.0, 0.0);
    }
    let a = m.scaled(&(1.0 / scale));
    let frob: f64 = a.entries().iter().map(|x| x * x).sum();
    let gram_det: f64 = a.minors().iter().map(|x| x * x).sum();
    let disc = (frob * frob - 4.0 * gram_det).max(0.0).sqrt();
    let s1sq = 0.5 * (frob + disc);
    let s2sq = if s1sq > 0.0 { gram_det / s1sq } else { 0.0 };
    (scale * s1sq.sqrt(), scale * s2sq.max(0.0).sqrt())
}

/// `M = left ⊗ normal` with `|normal| = 1` and the first nonzero component of
/// `normal` positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneFactors {
    pub left: Vec<f64>,
    pub normal: [f64; 2],
}

impl RankOneFactors {
    pub fn outer(&self) -> Matrix<f64> {
        let data = self
            .left
            .iter()
            .flat_map(|v| self.normal.iter().map(move |n| v * n))
            .collect();
        Matrix::new(self.left.len(), 2, data).unwrap()
    }
}

/// Rank-one factorization; the verdict is taken in the matrix's own field.
pub fn rank_one_factor<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<RankOneFactors> {
    match rank_verdict(m, tol) {
        RankVerdict::RankOne => {}
        RankVerdict::Zero | RankVerdict::RankTwo => return Err(Error::NotRankOne),
    }
    let a = m.to_f64();
    // The largest row carries the normal with the least cancellation.
    let best = (0..a.rows())
        .max_by(|&i, &k| {
            let ni = a.row(i).iter().map(|x| x * x).sum::<f64>();
            let nk = a.row(k).iter().map(|x| x * x).sum::<f64>();
            ni.total_cmp(&nk).then(k.cmp(&i))
        })
        .unwrap();
    let normal = canonical_unit([a.get(best, 0).to_owned(), a.get(best, 1).to_owned()]);
    let left = (0..a.rows())
        .map(|i| a.get(i, 0) * normal[0] + a.get(i, 1) * normal[1])
        .collect();
    Ok(RankOneFactors { left, normal })
}

/// Unit vector with the first nonzero component positive.
pub fn canonical_unit(v: [f64; 2]) -> [f64; 2] {
    let len = v[0].hypot(v[1]);
    let mut n = [v[0] / len, v[1] / len];
    let lead = if n[0].abs() > 1e-12 { n[0] } else { n[1] };
    if lead < 0.0 {
        n = [-n[0], -n[1]];
    }
    // avoid -0.0 in reports
    [n[0] + 0.0, n[1] + 0.0]
}

pub fn det2<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    m.det2()
}
