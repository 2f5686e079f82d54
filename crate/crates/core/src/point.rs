use std::fmt::Debug;

use crate::scalar::Scalar;

/// Elements of a finite-dimensional real vector space that measures and
/// laminate trees can live on: matrices, or coordinates in a chart.
pub trait Point<S: Scalar>: Clone + Debug + PartialEq + Send + Sync {
    fn entries(&self) -> &[S];
    fn with_entries(&self, entries: Vec<S>) -> Self;

    fn same_shape(&self, other: &Self) -> bool {
        self.entries().len() == other.entries().len()
    }

    fn zero_like(&self) -> Self {
        self.with_entries(vec![S::zero(); self.entries().len()])
    }

    fn plus(&self, other: &Self) -> Self {
        self.with_entries(zip_map(self.entries(), other.entries(), |a, b| a.clone() + b.clone()))
    }

    fn minus(&self, other: &Self) -> Self {
        self.with_entries(zip_map(self.entries(), other.entries(), |a, b| a.clone() - b.clone()))
    }

    fn scaled(&self, s: &S) -> Self {
        self.with_entries(self.entries().iter().map(|a| a.clone() * s.clone()).collect())
    }

    /// Max-abs entry.
    fn norm_inf(&self) -> S {
        self.entries()
            .iter()
            .fold(S::zero(), |m, a| S::max_of(m, a.abs()))
    }

    fn is_zero(&self) -> bool {
        self.entries().iter().all(|a| a.is_zero())
    }

    fn to_f64_vec(&self) -> Vec<f64> {
        self.entries().iter().map(Scalar::to_f64).collect()
    }
}

fn zip_map<S: Scalar>(a: &[S], b: &[S], f: impl Fn(&S, &S) -> S) -> Vec<S> {
    assert_eq!(a.len(), b.len(), "point shape mismatch");
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Max-abs distance between two points, in doubles.
pub fn dist_inf<S: Scalar, P: Point<S>>(a: &P, b: &P) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x.to_f64() - y.to_f64()).abs())
        .fold(0.0, f64::max)
}
