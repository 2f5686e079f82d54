use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use lamina_core::chart::{CGrid, Chart, Cone, Coords};
use lamina_core::json::{
    coords_measure_to_json, coords_tree_to_json, float_to_json, matrix_measure_to_json, measure_from_json,
    scalar_to_json, to_canonical_string, tree_from_json, AnyMeasure, AnyTree,
};
use lamina_core::laminate::validate;
use lamina_core::lamsearch::{proper_directions, search, sweep, sweep_csv, NormalFilter, SearchConfig, SearchResult};
use lamina_core::measure::DiscreteMeasure;
use lamina_core::scalar::Scalar;
use lamina_core::scenarios::build_scenario;
use lamina_core::separator::{separate, SeparatorConfig};
use lamina_core::Error;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::inputs::{is_scenario, load_target, parse_chart, parse_cone, parse_tau, parse_taus, read_json};
use crate::{
    Command, DistanceArgs, Format, SearchArgs, SearchOptions, SeparateArgs, SweepArgs, TreeFlattenArgs,
    TreeValidateArgs, VerifyArgs,
};

pub fn run(cmd: Command) -> u8 {
    let verify = matches!(cmd, Command::Verify(_));
    let validate = matches!(cmd, Command::TreeValidate(_));
    let result = match cmd {
        Command::Verify(a) => cmd_verify(a),
        Command::Search(a) => cmd_search(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Separate(a) => cmd_separate(a),
        Command::TreeValidate(a) => cmd_tree_validate(a),
        Command::TreeFlatten(a) => cmd_tree_flatten(a),
        Command::MeasureDistance(a) => cmd_distance(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if verify {
                2
            } else if validate {
                1
            } else if matches!(e.downcast_ref::<Error>(), Some(Error::Lp(_))) {
                2
            } else {
                1
            }
        }
    }
}

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&str>, v: &Value) -> Result<()> {
    emit(out, &to_canonical_string(v)?)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    if !is_scenario(&a.scenario) {
        bail!("unknown scenario {:?}", a.scenario);
    }
    let tau = a.tau.as_deref().map(parse_tau).transpose()?;
    let bundle = build_scenario::<BigRational>(&a.scenario, tau.clone())?;
    let cone = a.cone.as_deref().map(parse_cone::<BigRational>).transpose()?;
    let checks = bundle.verify(cone.as_ref(), 0.0);
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({
        "scenario": a.scenario,
        "tau": tau.as_ref().map(scalar_to_json),
        "cone": cone.as_ref().unwrap_or(&bundle.cone).label(),
        "passed": passed,
        "checks": checks,
    });
    emit_json(a.out.as_deref(), &report)?;
    Ok(if passed { 0 } else { 1 })
}

fn search_config(o: &SearchOptions) -> SearchConfig {
    let mut cfg = if o.restricted {
        SearchConfig::restricted(o.depth)
    } else {
        SearchConfig {
            max_depth: o.depth,
            ..SearchConfig::default()
        }
    };
    cfg.grid = CGrid {
        samples: o.dict_size,
        ..CGrid::default()
    };
    cfg.tol = o.tol;
    cfg.node_budget = o.budget;
    cfg.seed = o.seed;
    cfg.certify = !o.no_certify;
    if let Some(w) = o.w_min {
        cfg.w_min = w;
    }
    if let Some(w) = o.w_max {
        cfg.w_max = w;
    }
    cfg
}

fn config_json(cfg: &SearchConfig) -> Value {
    json!({
        "depth": cfg.max_depth,
        "dict_size": cfg.grid.samples,
        "tol": float_to_json(cfg.tol),
        "w_min": float_to_json(cfg.w_min),
        "w_max": float_to_json(cfg.w_max),
        "node_budget": cfg.node_budget,
        "seed": cfg.seed,
        "normal_filter": cfg.normal_filter.as_ref().map(|f: &NormalFilter| json!({
            "targets": f.targets.iter().map(|t| t.map(float_to_json)).collect::<Vec<_>>(),
            "max_angle": float_to_json(f.max_angle),
        })),
        "certify": cfg.certify,
    })
}

fn result_json(r: &SearchResult) -> Value {
    let splits: Vec<Value> = r
        .splits()
        .iter()
        .map(|s| {
            json!({
                "path": s.path,
                "direction": s.direction.map(float_to_json),
                "relative_weight": float_to_json(s.relative_weight),
            })
        })
        .collect();
    json!({
        "status": r.status.label(),
        "defect": float_to_json(r.defect),
        "nodes": r.nodes,
        "polytope_feasible": r.polytope_feasible,
        "tree": coords_tree_to_json(&r.tree),
        "splits": splits,
    })
}

fn chart_label(c: &Option<Chart<f64>>) -> String {
    match c.as_ref().and_then(|c| c.tau_value().copied()) {
        Some(t) => format!("tau:{}", lamina_core::scalar::format_f64(t)),
        None if c.is_some() => "3x2".into(),
        None => "none".into(),
    }
}

/// Chart and cone from explicit flags, falling back to the target's own.
fn resolve_geometry(
    target_spec: &str,
    tau: Option<&str>,
    chart: Option<&str>,
    cone: Option<&str>,
) -> Result<(DiscreteMeasure<f64, Coords<f64>>, Option<Chart<f64>>, Cone<f64>)> {
    let tau = tau.map(parse_tau).transpose()?;
    let chart_flag = chart.map(parse_chart::<f64>).transpose()?;
    let cone_flag = cone.map(parse_cone::<f64>).transpose()?;
    let target = load_target(target_spec, tau.as_ref(), chart_flag.as_ref().and_then(|c| c.as_ref()))?;
    let chart = match chart_flag {
        Some(c) => c,
        None => match (&target.chart, &cone_flag) {
            (Some(c), _) => Some(c.clone()),
            (None, Some(Cone::Quadric(t))) => Some(Chart::tau(*t)?),
            _ => None,
        },
    };
    let cone = cone_flag
        .or(target.cone)
        .ok_or_else(|| anyhow!("--cone is required for this target"))?;
    if let (Cone::Quadric(t), Some(c)) = (&cone, &chart) {
        match c.tau_value() {
            Some(s) if (s - t).abs() <= 1e-15 => {}
            _ => bail!("cone tau:{t} needs the chart tau:{t}"),
        }
    }
    Ok((target.measure, chart, cone))
}

fn cmd_search(a: SearchArgs) -> Result<u8> {
    let (target, chart, cone) = resolve_geometry(&a.target, a.tau.as_deref(), a.chart.as_deref(), a.cone.as_deref())?;
    let cfg = search_config(&a.opts);
    let r = search(&target, chart.as_ref(), &cone, &cfg)?;
    let mut v = result_json(&r);
    v["target"] = coords_measure_to_json(&target);
    v["cone"] = json!(cone.label());
    v["chart"] = json!(chart_label(&chart));
    v["config"] = config_json(&cfg);
    emit_json(a.out.as_deref(), &v)?;
    Ok(0)
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    if !matches!(a.scenario.as_str(), "nu-tau" | "nu-bar-tau" | "mu-tau-tree") {
        bail!("sweeps need a tau-dependent scenario, got {:?}", a.scenario);
    }
    let taus: Vec<f64> = parse_taus(&a.taus)?.iter().map(Scalar::to_f64).collect();
    let cfg = search_config(&a.opts);
    let name = a.scenario.clone();
    let rows = sweep(
        |t| Ok(build_scenario::<f64>(&name, Some(t))?.coords_measure),
        &taus,
        |t| Chart::tau(t).map(Some),
        |t| Ok(Cone::Quadric(t)),
        &cfg,
    )?;
    match a.format {
        Format::Csv => emit(a.out.as_deref(), &sweep_csv(&rows))?,
        Format::Json => {
            let rows_json: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut v = match &r.outcome {
                        Ok(res) => result_json(res),
                        Err(e) => json!({"error": e}),
                    };
                    v["tau"] = float_to_json(r.tau);
                    v
                })
                .collect();
            let proper = match proper_directions(&rows, cfg.w_min, cfg.w_max) {
                Ok(list) => json!(list
                    .iter()
                    .map(|p| json!({
                        "normal": p.normal.map(float_to_json),
                        "weight": float_to_json(p.weight),
                        "direction": p.direction.map(float_to_json),
                        "paths": p.paths,
                    }))
                    .collect::<Vec<_>>()),
                Err(e) => json!({"error": e.to_string()}),
            };
            let v = json!({
                "scenario": a.scenario,
                "config": config_json(&cfg),
                "rows": rows_json,
                "proper_directions": proper,
            });
            emit_json(a.out.as_deref(), &v)?;
        }
    }
    Ok(0)
}

fn cmd_separate(a: SeparateArgs) -> Result<u8> {
    let (target, _chart, cone) =
        resolve_geometry(&a.target, a.tau.as_deref(), a.chart.as_deref(), a.cone.as_deref())?;
    let cfg = SeparatorConfig {
        dense_lines: a.dense,
        max_rounds: a.rounds,
        ..SeparatorConfig::default()
    };
    let cert = separate(&target, &cone, a.degree, &cfg)?;
    let mut v = cert.to_json();
    v["cone"] = json!(cone.label());
    v["degree"] = json!(a.degree);
    emit_json(a.out.as_deref(), &v)?;
    Ok(0)
}

fn cmd_tree_validate(a: TreeValidateArgs) -> Result<u8> {
    let tree = tree_from_json::<BigRational>(&read_json(&a.tree)?)?;
    let cone = a.cone.as_deref().map(parse_cone::<BigRational>).transpose()?;
    let chart = a.chart.as_deref().map(parse_chart::<BigRational>).transpose()?.flatten();
    let report = match &tree {
        AnyTree::Coords(t) => validate(t, cone.as_ref(), chart.as_ref(), a.tol)?,
        AnyTree::Matrix(t) => validate(t, cone.as_ref(), chart.as_ref(), a.tol)?,
    };
    emit_json(a.out.as_deref(), &serde_json::to_value(&report)?)?;
    Ok(if report.valid { 0 } else { 1 })
}

fn cmd_tree_flatten(a: TreeFlattenArgs) -> Result<u8> {
    let v = match tree_from_json::<BigRational>(&read_json(&a.tree)?)? {
        AnyTree::Coords(t) => coords_measure_to_json(&t.flatten()?),
        AnyTree::Matrix(t) => matrix_measure_to_json(&t.flatten()?),
    };
    emit_json(a.out.as_deref(), &v)?;
    Ok(0)
}

fn cmd_distance(a: DistanceArgs) -> Result<u8> {
    let ma = measure_from_json::<f64>(&read_json(&a.a)?)?;
    let mb = measure_from_json::<f64>(&read_json(&a.b)?)?;
    let d = match (ma, mb) {
        (AnyMeasure::Coords(x), AnyMeasure::Coords(y)) => x.distance(&y)?,
        (AnyMeasure::Matrix(x), AnyMeasure::Matrix(y)) => x.distance(&y)?,
        _ => bail!("both measures must be matrix-valued or both coordinate-valued"),
    };
    emit_json(a.out.as_deref(), &json!({"distance": float_to_json(d)}))?;
    Ok(0)
}
