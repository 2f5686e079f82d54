use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lamina_core::chart::{Chart, Cone, Coords};
use lamina_core::json::{coords_from_json, measure_from_json, AnyMeasure};
use lamina_core::measure::{Atom, DiscreteMeasure};
use lamina_core::scalar::{parse_rational, Scalar};
use lamina_core::scenarios::{build_scenario, SCENARIO_NAMES};
use num_rational::BigRational;
use serde_json::Value;

pub fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

pub fn parse_tau(text: &str) -> Result<BigRational> {
    Ok(parse_rational(text)?)
}

pub fn parse_taus(text: &str) -> Result<Vec<BigRational>> {
    text.split(',').map(|t| parse_tau(t.trim())).collect()
}

/// Directions from `[[x,y,z], …]` or `{"directions": [...]}`.
fn load_directions<S: Scalar>(path: &str) -> lamina_core::Result<Vec<Coords<S>>> {
    let v = read_json(path).map_err(|e| lamina_core::Error::Parse(format!("{e:#}")))?;
    let list = v.get("directions").unwrap_or(&v);
    let arr = list
        .as_array()
        .ok_or_else(|| lamina_core::Error::Parse("dictionary must be an array of directions".into()))?;
    arr.iter().map(coords_from_json).collect()
}

pub fn parse_cone<S: Scalar>(spec: &str) -> Result<Cone<S>> {
    Ok(Cone::parse_with(spec, load_directions)?)
}

pub fn parse_chart<S: Scalar>(spec: &str) -> Result<Option<Chart<S>>> {
    if spec == "none" {
        return Ok(None);
    }
    Ok(Some(Chart::parse(spec)?))
}

pub fn is_scenario(name: &str) -> bool {
    SCENARIO_NAMES.contains(&name)
}

/// A target measure in chart coordinates with the chart and cone it naturally carries.
pub struct Target {
    pub measure: DiscreteMeasure<f64, Coords<f64>>,
    pub chart: Option<Chart<f64>>,
    pub cone: Option<Cone<f64>>,
}

/// A scenario name or a measure file. Matrix-valued files need `chart`.
pub fn load_target(spec: &str, tau: Option<&BigRational>, chart: Option<&Chart<f64>>) -> Result<Target> {
    if is_scenario(spec) {
        let b = build_scenario::<BigRational>(spec, tau.cloned())?;
        return Ok(Target {
            measure: b.coords_measure.to_f64_measure(|c| c.to_f64()),
            chart: b.chart.as_ref().map(Chart::to_f64),
            cone: Some(b.cone.to_f64()),
        });
    }
    if !Path::new(spec).exists() {
        bail!("{spec:?} is neither a scenario ({}) nor a file", SCENARIO_NAMES.join(", "));
    }
    let measure = match measure_from_json::<f64>(&read_json(spec)?)? {
        AnyMeasure::Coords(m) => m,
        AnyMeasure::Matrix(m) => {
            let chart = chart.ok_or_else(|| anyhow!("a matrix-valued target needs --chart"))?;
            let atoms = m
                .atoms()
                .iter()
                .map(|a| {
                    Ok(Atom {
                        point: chart.matrix_to_coords(&a.point, 1e-9)?,
                        weight: a.weight,
                    })
                })
                .collect::<lamina_core::Result<Vec<_>>>()?;
            DiscreteMeasure::new(atoms)?
        }
    };
    Ok(Target {
        measure,
        chart: chart.cloned(),
        cone: None,
    })
}
