//! JSON encodings for matrices, coordinates, measures and trees.
//!
//! Scalars are written as `"p/q"` strings in exact mode and as numbers with
//! 17 significant digits otherwise. Either form is accepted on input.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::chart::Coords;
use crate::error::{Error, Result};
use crate::laminate::{LaminateTree, SplitNode};
use crate::matrix::Matrix;
use crate::measure::{Atom, DiscreteMeasure};
use crate::scalar::{format_f64, parse_scalar, Scalar};

fn bad(what: &str) -> Error {
    Error::Parse(what.to_string())
}

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(format!("{x}"))
    } else {
        float_to_json(x.to_f64())
    }
}

pub fn float_to_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    Value::Number(Number::from_str(&format_f64(x)).expect("formatted float is valid JSON"))
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::Number(n) => parse_scalar(&n.to_string()),
        Value::String(s) => parse_scalar(s),
        _ => Err(bad("expected a number or a \"p/q\" string")),
    }
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json<S: Scalar>(v: &Value) -> Result<Matrix<S>> {
    let rows = v.as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("matrix row must be an array"))?
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

pub fn coords_to_json<S: Scalar>(c: &Coords<S>) -> Value {
    Value::Array(c.0.iter().map(scalar_to_json).collect())
}

pub fn coords_from_json<S: Scalar>(v: &Value) -> Result<Coords<S>> {
    let xs = v.as_array().ok_or_else(|| bad("coordinates must be an array"))?;
    if xs.len() != 3 {
        return Err(bad("coordinates need exactly three entries"));
    }
    Ok(Coords::new(
        scalar_from_json(&xs[0])?,
        scalar_from_json(&xs[1])?,
        scalar_from_json(&xs[2])?,
    ))
}

/// A measure read from JSON, either on matrices or on chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMeasure<S> {
    Matrix(DiscreteMeasure<S, Matrix<S>>),
    Coords(DiscreteMeasure<S, Coords<S>>),
}

/// A tree read from JSON: nested-array points are matrices, flat triples are coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTree<S> {
    Matrix(LaminateTree<S, Matrix<S>>),
    Coords(LaminateTree<S, Coords<S>>),
}

pub fn matrix_measure_to_json<S: Scalar>(mu: &DiscreteMeasure<S, Matrix<S>>) -> Value {
    measure_json(mu, "matrix", matrix_to_json)
}

pub fn coords_measure_to_json<S: Scalar>(mu: &DiscreteMeasure<S, Coords<S>>) -> Value {
    measure_json(mu, "coords", coords_to_json)
}

fn measure_json<S: Scalar, P: crate::point::Point<S>>(
    mu: &DiscreteMeasure<S, P>,
    key: &str,
    point: impl Fn(&P) -> Value,
) -> Value {
    let atoms = mu
        .atoms()
        .iter()
        .map(|a| {
            let mut m = Map::new();
            m.insert(key.to_string(), point(&a.point));
            m.insert("weight".to_string(), scalar_to_json(&a.weight));
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("atoms".to_string(), Value::Array(atoms));
    Value::Object(m)
}

pub fn measure_from_json<S: Scalar>(v: &Value) -> Result<AnyMeasure<S>> {
    let atoms = v
        .get("atoms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("measure needs an \"atoms\" array"))?;
    let first = atoms.first().ok_or_else(|| Error::InvalidMeasure("no atoms".into()))?;
    let weight = |a: &Value| scalar_from_json::<S>(a.get("weight").ok_or_else(|| bad("atom without weight"))?);
    if first.get("matrix").is_some() {
        let atoms = atoms
            .iter()
            .map(|a| {
                let p = a.get("matrix").ok_or_else(|| bad("mixed atom kinds"))?;
                Ok(Atom {
                    point: matrix_from_json(p)?,
                    weight: weight(a)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnyMeasure::Matrix(DiscreteMeasure::new(atoms)?))
    } else if first.get("coords").is_some() {
        let atoms = atoms
            .iter()
            .map(|a| {
                let p = a.get("coords").ok_or_else(|| bad("mixed atom kinds"))?;
                Ok(Atom {
                    point: coords_from_json(p)?,
                    weight: weight(a)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnyMeasure::Coords(DiscreteMeasure::new(atoms)?))
    } else {
        Err(bad("atom needs a \"matrix\" or \"coords\" field"))
    }
}

pub fn tree_to_json<S: Scalar, P: crate::point::Point<S>>(
    tree: &LaminateTree<S, P>,
    point: &impl Fn(&P) -> Value,
) -> Value {
    node_to_json(tree.root(), point)
}

fn node_to_json<S: Scalar, P: crate::point::Point<S>>(node: &SplitNode<S, P>, point: &impl Fn(&P) -> Value) -> Value {
    let mut m = Map::new();
    m.insert("point".to_string(), point(&node.point));
    m.insert("weight".to_string(), scalar_to_json(&node.weight));
    if let Some(ch) = node.children.as_deref() {
        m.insert(
            "children".to_string(),
            Value::Array(ch.iter().map(|c| node_to_json(c, point)).collect()),
        );
    }
    Value::Object(m)
}

pub fn coords_tree_to_json<S: Scalar>(tree: &LaminateTree<S, Coords<S>>) -> Value {
    tree_to_json(tree, &coords_to_json)
}

pub fn matrix_tree_to_json<S: Scalar>(tree: &LaminateTree<S, Matrix<S>>) -> Value {
    tree_to_json(tree, &matrix_to_json)
}

pub fn tree_from_json<S: Scalar>(v: &Value) -> Result<AnyTree<S>> {
    let point = v.get("point").ok_or_else(|| bad("tree node without point"))?;
    let is_matrix = point
        .as_array()
        .and_then(|a| a.first())
        .map(Value::is_array)
        .unwrap_or(false);
    if is_matrix {
        Ok(AnyTree::Matrix(LaminateTree::new(node_from_json(v, &matrix_from_json)?)?))
    } else {
        Ok(AnyTree::Coords(LaminateTree::new(node_from_json(v, &coords_from_json)?)?))
    }
}

fn node_from_json<S: Scalar, P: crate::point::Point<S>>(
    v: &Value,
    point: &impl Fn(&Value) -> Result<P>,
) -> Result<SplitNode<S, P>> {
    let p = point(v.get("point").ok_or_else(|| bad("tree node without point"))?)?;
    let w = scalar_from_json(v.get("weight").ok_or_else(|| bad("tree node without weight"))?)?;
    match v.get("children") {
        None | Some(Value::Null) => Ok(SplitNode::leaf(p, w)),
        Some(Value::Array(ch)) if ch.is_empty() => Ok(SplitNode::leaf(p, w)),
        Some(Value::Array(ch)) if ch.len() == 2 => Ok(SplitNode::with_children(
            p,
            w,
            node_from_json(&ch[0], point)?,
            node_from_json(&ch[1], point)?,
        )),
        Some(_) => Err(Error::MalformedTree("a split node needs exactly two children".into())),
    }
}

/// Rewrites every non-integer number with 17 significant digits.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                float_to_json(text.parse::<f64>().unwrap_or(f64::NAN))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(canonicalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Serializes with sorted keys and canonical numbers, newline-terminated.
pub fn to_canonical_string(v: &impl serde::Serialize) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&canonicalize(value)).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::scenarios::{build_mu_tau_tree, build_nu_tau};
    use num_rational::BigRational;

    #[test]
    fn measure_round_trip_exact() {
        let mu = build_nu_tau(rat(1, 20)).unwrap().measure.unwrap();
        let v = matrix_measure_to_json(&mu);
        assert_eq!(v["atoms"][2]["weight"], Value::String("1/16".into()));
        match measure_from_json::<BigRational>(&v).unwrap() {
            AnyMeasure::Matrix(back) => assert_eq!(back, mu),
            _ => panic!("expected matrix atoms"),
        }
    }

    #[test]
    fn tree_round_trip_and_kind_detection() {
        let tree = build_mu_tau_tree(rat(1, 10)).unwrap();
        let v = coords_tree_to_json(&tree);
        match tree_from_json::<BigRational>(&v).unwrap() {
            AnyTree::Coords(back) => assert_eq!(back, tree),
            _ => panic!("expected coordinate tree"),
        }
        let m: Value = serde_json::from_str(r#"{"point":[[0,0],[0,0]],"weight":1}"#).unwrap();
        assert!(matches!(tree_from_json::<f64>(&m).unwrap(), AnyTree::Matrix(_)));
        let one_child: Value =
            serde_json::from_str(r#"{"point":[0,0,0],"weight":1,"children":[{"point":[0,0,0],"weight":1}]}"#).unwrap();
        assert!(matches!(tree_from_json::<f64>(&one_child), Err(Error::MalformedTree(_))));
    }

    #[test]
    fn floats_are_canonical() {
        let v: Value = serde_json::from_str(r#"{"b":0.1,"a":[1,2.5e-3]}"#).unwrap();
        let s = to_canonical_string(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("2.5000000000000001e-3"));
        assert_eq!(scalar_from_json::<BigRational>(&Value::String("3/7".into())).unwrap(), rat(3, 7));
        let decimal: Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(scalar_from_json::<BigRational>(&decimal).unwrap(), rat(1, 10));
    }
}
