//! Finitely supported probability measures on matrices or chart coordinates.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::point::{dist_inf, Point};
use crate::scalar::Scalar;
use crate::transport::transport_cost;

/// Atoms closer than this (max-abs) are merged in floating-point mode.
pub const MERGE_TOL: f64 = 1e-10;
/// Allowed deviation of the total mass from one in floating-point mode.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<S, P> {
    pub point: P,
    pub weight: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<S, P> {
    atoms: Vec<Atom<S, P>>,
}

impl<S: Scalar, P: Point<S>> DiscreteMeasure<S, P> {
    /// Validates weights (positive, summing to one) and merges coincident atoms.
    pub fn new(atoms: Vec<Atom<S, P>>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidMeasure("no atoms".into()));
        };
        if atoms.iter().any(|a| !a.point.same_shape(&first.point)) {
            return Err(Error::InvalidMeasure("atoms of different shapes".into()));
        }
        if atoms.iter().any(|a| a.weight <= S::zero()) {
            return Err(Error::InvalidMeasure("non-positive weight".into()));
        }
        let total = atoms.iter().fold(S::zero(), |acc, a| acc + a.weight.clone());
        let off = total - S::one();
        if !(if S::EXACT { off.is_zero() } else { off.within(MASS_TOL) }) {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to 1 + {}",
                off.to_f64()
            )));
        }
        Ok(Self {
            atoms: merge_atoms(atoms),
        })
    }

    pub fn dirac(point: P) -> Self {
        Self {
            atoms: vec![Atom {
                point,
                weight: S::one(),
            }],
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (P, S)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(point, weight)| Atom { point, weight })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom<S, P>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Weight carried by `point` (zero when absent).
    pub fn weight_at(&self, point: &P) -> S {
        self.atoms
            .iter()
            .filter(|a| same_point(&a.point, point))
            .fold(S::zero(), |acc, a| acc + a.weight.clone())
    }

    pub fn barycenter(&self) -> P {
        let zero = self.atoms[0].point.zero_like();
        self.atoms
            .iter()
            .fold(zero, |acc, a| acc.plus(&a.point.scaled(&a.weight)))
    }

    /// `Σ wᵢ f(pᵢ)`.
    pub fn integrate(&self, f: impl Fn(&P) -> S) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, a| acc + a.weight.clone() * f(&a.point))
    }

    /// Push-forward under a point map; atoms that collide are merged.
    pub fn map<Q: Point<S>>(&self, f: impl Fn(&P) -> Q) -> Result<DiscreteMeasure<S, Q>> {
        DiscreteMeasure::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    point: f(&a.point),
                    weight: a.weight.clone(),
                })
                .collect(),
        )
    }

    /// Optimal transport cost with max-abs ground metric.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if !self.atoms[0].point.same_shape(&other.atoms[0].point) {
            return Err(Error::Dimension("measures of different shapes".into()));
        }
        let a: Vec<f64> = self.atoms.iter().map(|x| x.weight.to_f64()).collect();
        let b: Vec<f64> = other.atoms.iter().map(|x| x.weight.to_f64()).collect();
        transport_cost(&a, &b, |i, j| {
            dist_inf(&self.atoms[i].point, &other.atoms[j].point)
        })
    }
}

impl<S: Scalar> DiscreteMeasure<S, Matrix<S>> {
    /// Row marginal: atoms become the `row`-th rows (1-based), as 1×N matrices.
    pub fn project_row(&self, row: usize) -> Result<Self> {
        let m = self.atoms[0].point.rows();
        if row == 0 || row > m {
            return Err(Error::OutOfRange(format!("row {row} of {m}")));
        }
        self.map(|p| Matrix::new(1, p.cols(), p.row(row - 1).to_vec()).unwrap())
    }
}

impl<P: Point<BigRational>> DiscreteMeasure<BigRational, P> {
    pub fn to_f64_measure<Q: Point<f64>>(&self, convert: impl Fn(&P) -> Q) -> DiscreteMeasure<f64, Q> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                point: convert(&a.point),
                weight: Scalar::to_f64(&a.weight),
            })
            .collect();
        DiscreteMeasure {
            atoms: merge_atoms(atoms),
        }
    }
}

fn same_point<S: Scalar, P: Point<S>>(a: &P, b: &P) -> bool {
    if S::EXACT {
        a == b
    } else {
        dist_inf(a, b) <= MERGE_TOL
    }
}

/// Merges atoms at coincident points, keeping first-appearance order.
pub(crate) fn merge_atoms<S: Scalar, P: Point<S>>(atoms: Vec<Atom<S, P>>) -> Vec<Atom<S, P>> {
    let mut out: Vec<Atom<S, P>> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match out.iter_mut().find(|a| same_point(&a.point, &atom.point)) {
            Some(existing) => existing.weight = existing.weight.clone() + atom.weight,
            None => out.push(atom),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn mat(v: [f64; 4]) -> Matrix<f64> {
        Matrix::new(2, 2, v.to_vec()).unwrap()
    }

    #[test]
    fn weights_are_validated() {
        let a = mat([1.0, 0.0, 0.0, 1.0]);
        assert!(DiscreteMeasure::from_pairs([(a.clone(), 0.5)]).is_err());
        assert!(DiscreteMeasure::from_pairs([(a.clone(), 1.5), (a.clone(), -0.5)]).is_err());
        assert!(DiscreteMeasure::<f64, Matrix<f64>>::new(vec![]).is_err());
        let m = DiscreteMeasure::from_pairs([(a.clone(), 0.25), (a.clone(), 0.75)]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn dirac_barycenter_and_integral() {
        let a = mat([1.0, 2.0, 3.0, 4.0]);
        let m = DiscreteMeasure::dirac(a.clone());
        assert_eq!(m.barycenter(), a);
        assert_eq!(m.integrate(|_| 1.0), 1.0);
    }

    #[test]
    fn distances_between_diracs() {
        let a = mat([1.0, 2.0, 3.0, 4.0]);
        let b = mat([1.5, 2.0, 0.0, 4.0]);
        let da = DiscreteMeasure::dirac(a.clone());
        let db = DiscreteMeasure::dirac(b.clone());
        assert_eq!(da.distance(&da).unwrap(), 0.0);
        assert_eq!(da.distance(&db).unwrap(), 3.0);
    }

    #[test]
    fn projection_of_single_atom() {
        let a = Matrix::new(2, 2, vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)]).unwrap();
        let p = DiscreteMeasure::dirac(a).project_row(2).unwrap();
        assert_eq!(p.atoms()[0].point.row(0), &[rat(1, 4), rat(1, 5)]);
        assert_eq!(p.atoms()[0].weight, rat(1, 1));
        assert!(p.project_row(2).is_err());
        assert!(p.project_row(0).is_err());
    }

    fn measure_strategy() -> impl Strategy<Value = DiscreteMeasure<f64, Matrix<f64>>> {
        prop::collection::vec((prop::array::uniform4(-2.0f64..2.0), 0.05f64..1.0), 1..6).prop_map(
            |atoms| {
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                let mut pairs: Vec<(Matrix<f64>, f64)> =
                    atoms.iter().map(|(p, w)| (mat(*p), w / total)).collect();
                // renormalize the last weight so the sum is one to rounding
                let head: f64 = pairs[..pairs.len() - 1].iter().map(|p| p.1).sum();
                pairs.last_mut().unwrap().1 = 1.0 - head;
                DiscreteMeasure::from_pairs(pairs).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn affine_integration_is_exact(mu in measure_strategy(), c in prop::array::uniform4(-3.0f64..3.0), k in -2.0f64..2.0) {
            let coeff = mat(c);
            let f = |p: &Matrix<f64>| coeff.dot(p) + k;
            let lhs = mu.integrate(f);
            let rhs = f(&mu.barycenter());
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn projection_commutes_with_barycenter(mu in measure_strategy(), row in 1usize..=2) {
            let projected = mu.project_row(row).unwrap().barycenter();
            let full = mu.barycenter();
            for j in 0..2 {
                prop_assert!((projected.get(0, j) - full.get(row - 1, j)).abs() < 1e-12);
            }
        }

        #[test]
        fn distance_is_a_metric(a in measure_strategy(), b in measure_strategy(), c in measure_strategy()) {
            let ab = a.distance(&b).unwrap();
            let ba = b.distance(&a).unwrap();
            let bc = b.distance(&c).unwrap();
            let ac = a.distance(&c).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!(a.distance(&a).unwrap() < 1e-9);
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }
}
