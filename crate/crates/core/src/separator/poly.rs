use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::json::{scalar_from_json, scalar_to_json};
use crate::scalar::Scalar;

/// Exponent vectors of total degree in `min..=max`, graded then reverse-lexicographic
/// (`x² < xy < xz < y² < …` within a degree).
pub fn monomials(nvars: usize, min: u32, max: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, deg: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            rec(prefix, left - 1, deg - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    for deg in min..=max {
        rec(&mut Vec::new(), nvars, deg, &mut out);
    }
    out
}

/// A polynomial in `nvars` variables with sparse coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFunc<S> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> PolyFunc<S> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, S)>) -> Result<Self> {
        let mut f = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!("exponent {e:?} for {nvars} variables")));
            }
            f.add_term(e, c);
        }
        Ok(f)
    }

    /// `c · x^e`, with `e` given as exponents.
    pub fn monomial(exps: &[u32], c: S) -> Self {
        let mut f = Self::zero(exps.len());
        f.add_term(exps.to_vec(), c);
        f
    }

    fn add_term(&mut self, e: Vec<u32>, c: S) {
        let v = self.terms.remove(&e).unwrap_or_else(S::zero) + c;
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn norm_l1(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m = m * xi.clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut f = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            f.add_term(e.clone(), c.clone() * s.clone());
        }
        f
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut f = self.clone();
        for (e, c) in &other.terms {
            f.add_term(e.clone(), c.clone());
        }
        f
    }

    pub fn times(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count");
        let mut f = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                f.add_term(e, ca.clone() * cb.clone());
            }
        }
        f
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut f = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                f.add_term(e2, c.clone() * S::from_i64(e[var] as i64));
            }
        }
        f
    }

    /// `Σ dᵢ ∂ᵢ f`.
    pub fn directional(&self, d: &[S]) -> Self {
        assert_eq!(d.len(), self.nvars, "direction dimension");
        let mut f = Self::zero(self.nvars);
        for (i, di) in d.iter().enumerate() {
            if !di.is_zero() {
                f = f.plus(&self.partial(i).scaled(di));
            }
        }
        f
    }

    /// Substitutes each variable by a linear form in `m` new variables:
    /// `xᵢ = Σⱼ forms[i][j] yⱼ`.
    pub fn substitute_linear(&self, forms: &[Vec<S>]) -> Result<Self> {
        if forms.len() != self.nvars {
            return Err(Error::Dimension(format!("{} forms for {} variables", forms.len(), self.nvars)));
        }
        let m = forms.first().map_or(0, Vec::len);
        if forms.iter().any(|f| f.len() != m) {
            return Err(Error::Dimension("ragged linear forms".into()));
        }
        let lin: Vec<PolyFunc<S>> = forms
            .iter()
            .map(|row| {
                PolyFunc::from_terms(
                    m,
                    row.iter().enumerate().map(|(j, c)| {
                        let mut e = vec![0; m];
                        e[j] = 1;
                        (e, c.clone())
                    }),
                )
            })
            .collect::<Result<_>>()?;
        let mut out = PolyFunc::zero(m);
        for (e, c) in &self.terms {
            let mut t = PolyFunc::monomial(&vec![0; m], c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.times(&lin[i]);
                }
            }
            out = out.plus(&t);
        }
        Ok(out)
    }

    /// Pulls a polynomial in the (row-major) matrix entries back to chart
    /// coordinates.
    pub fn pullback(&self, chart: &Chart<S>) -> Result<Self> {
        let basis = chart.basis();
        let entries = basis[0].rows() * basis[0].cols();
        if self.nvars != entries {
            return Err(Error::Dimension(format!(
                "polynomial in {} variables, chart has {entries} entries",
                self.nvars
            )));
        }
        let cols = basis[0].cols();
        let forms: Vec<Vec<S>> = (0..entries)
            .map(|k| basis.iter().map(|b| b.get(k / cols, k % cols).clone()).collect())
            .collect();
        self.substitute_linear(&forms)
    }

    pub fn to_f64(&self) -> PolyFunc<f64> {
        PolyFunc {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.to_f64())).collect(),
        }
    }

    pub fn to_exact(&self) -> PolyFunc<BigRational> {
        PolyFunc {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), <BigRational as Scalar>::from_f64(c.to_f64())))
                .filter(|(_, c)| !num_traits::Zero::is_zero(c))
                .collect(),
        }
    }

    /// `{"variables": n, "terms": [{"exponents": [..], "value": ..}]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!({"exponents": e, "value": scalar_to_json(c)}))
            .collect();
        json!({"variables": self.nvars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let nvars = v
            .get("variables")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("polynomial needs \"variables\"".into()))? as usize;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial needs \"terms\"".into()))?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let exps = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term needs \"exponents\"".into()))?
                .iter()
                .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| Error::Parse("bad exponent".into())))
                .collect::<Result<Vec<u32>>>()?;
            let c = scalar_from_json(t.get("value").ok_or_else(|| Error::Parse("term needs \"value\"".into()))?)?;
            out.push((exps, c));
        }
        Self::from_terms(nvars, out)
    }
}
