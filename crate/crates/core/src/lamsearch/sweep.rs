use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{canonical_direction, Chart, Cone, Coords};
use crate::error::{Error, Result};
use crate::laminate::LaminateTree;
use crate::matrix::canonical_unit;
use crate::measure::DiscreteMeasure;
use crate::scalar::format_f64;

use super::{search, split_infos, SearchConfig, SearchResult, SearchStatus};

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub tau: f64,
    pub chart: Option<Chart<f64>>,
    pub outcome: std::result::Result<SearchResult, String>,
}

impl SweepRow {
    /// A row holding a known tree instead of a search outcome.
    pub fn from_tree(tau: f64, tree: LaminateTree<f64, Coords<f64>>, chart: Option<Chart<f64>>) -> Self {
        Self {
            tau,
            chart,
            outcome: Ok(SearchResult {
                tree,
                defect: 0.0,
                nodes: 0,
                status: SearchStatus::Exact,
                polytope_feasible: None,
            }),
        }
    }
}

/// Runs one search per τ. Failures are recorded in their row; the sweep goes on.
pub fn sweep(
    target_builder: impl Fn(f64) -> Result<DiscreteMeasure<f64, Coords<f64>>> + Sync,
    taus: &[f64],
    chart_builder: impl Fn(f64) -> Result<Option<Chart<f64>>> + Sync,
    cone_builder: impl Fn(f64) -> Result<Cone<f64>> + Sync,
    cfg: &SearchConfig,
) -> Result<Vec<SweepRow>> {
    if taus.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::OutOfRange("sweep values of tau must be positive".into()));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::OutOfRange("sweep values of tau must be strictly descending".into()));
    }
    Ok(taus
        .par_iter()
        .map(|&tau| {
            let chart = chart_builder(tau);
            let outcome = (|| {
                let target = target_builder(tau)?;
                let cone = cone_builder(tau)?;
                let chart = chart.as_ref().map_err(|e| Error::OutOfRange(e.to_string()))?;
                search(&target, chart.as_ref(), &cone, cfg)
            })()
            .map_err(|e| e.to_string());
            SweepRow {
                tau,
                chart: chart.ok().flatten(),
                outcome,
            }
        })
        .collect())
}

fn fmt_dir(d: &[f64; 3]) -> String {
    format!("({:.6} {:.6} {:.6})", d[0], d[1], d[2])
}

/// CSV with columns `tau,defect,status,nodes,directions,weights`. Directions
/// are the distinct canonical split directions in pre-order; weights are the
/// relative split weights in pre-order.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("tau,defect,status,nodes,directions,weights\n");
    for row in rows {
        match &row.outcome {
            Ok(r) => {
                let splits = r.splits();
                let mut dirs: Vec<String> = Vec::new();
                for s in &splits {
                    let c = fmt_dir(&canonical_direction(&Coords(s.direction)).0);
                    if !dirs.contains(&c) {
                        dirs.push(c);
                    }
                }
                let weights: Vec<String> = splits.iter().map(|s| format!("{:.6}", s.relative_weight)).collect();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    format_f64(row.tau),
                    format_f64(r.defect),
                    r.status.label(),
                    r.nodes,
                    dirs.join(";"),
                    weights.join(";")
                ));
            }
            Err(e) => out.push_str(&format!(
                "{},,error: {},,,\n",
                format_f64(row.tau),
                e.replace([',', '\n'], ";")
            )),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProperDirection {
    /// Extrapolated unit normal at τ = 0 (first nonzero component positive).
    pub normal: [f64; 2],
    /// Extrapolated relative weight `λ_right / (λ_left + λ_right)`.
    pub weight: f64,
    /// Extrapolated split direction, `|d|∞ = 1`.
    pub direction: [f64; 3],
    /// Tree paths whose splits share this limit.
    pub paths: Vec<String>,
}

struct Track {
    tau: f64,
    normal: [f64; 2],
    weight: f64,
    direction: [f64; 3],
}

fn extrapolate(a: f64, b: f64, ta: f64, tb: f64) -> f64 {
    a - ta * (b - a) / (tb - ta)
}

/// Splits present (by tree path) in every row whose relative weight stays in
/// `[w_min, w_max]`, with normal, weight and direction extrapolated linearly
/// to τ = 0 from the two smallest values of τ. Coinciding limits are merged.
pub fn proper_directions(rows: &[SweepRow], w_min: f64, w_max: f64) -> Result<Vec<ProperDirection>> {
    let mut usable: Vec<(&SweepRow, &SearchResult)> = rows
        .iter()
        .filter_map(|r| match (&r.outcome, &r.chart) {
            (Ok(res), Some(_)) => Some((r, res)),
            _ => None,
        })
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientRows {
            need: 3,
            got: usable.len(),
        });
    }
    usable.sort_by(|a, b| a.0.tau.total_cmp(&b.0.tau));

    let mut tracks: BTreeMap<String, Vec<Track>> = BTreeMap::new();
    for (row, res) in &usable {
        let chart = row.chart.as_ref().unwrap();
        for s in split_infos(&res.tree) {
            let d = Coords(s.direction);
            let Ok(normal) = chart.normal_of(&d) else { continue };
            let scale = d.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            tracks.entry(s.path).or_default().push(Track {
                tau: row.tau,
                normal,
                weight: s.relative_weight,
                direction: d.0.map(|v| v / scale),
            });
        }
    }

    let mut out: Vec<ProperDirection> = Vec::new();
    for (path, track) in tracks {
        if track.len() != usable.len() {
            continue;
        }
        if track.iter().any(|t| t.weight < w_min || t.weight > w_max) {
            continue;
        }
        let (a, b) = (&track[0], &track[1]);
        let sign = if a.normal[0] * b.normal[0] + a.normal[1] * b.normal[1] < 0.0 { -1.0 } else { 1.0 };
        let n = [
            extrapolate(a.normal[0], sign * b.normal[0], a.tau, b.tau),
            extrapolate(a.normal[1], sign * b.normal[1], a.tau, b.tau),
        ];
        let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
        let normal = canonical_unit([n[0] / len, n[1] / len]);
        let weight = extrapolate(a.weight, b.weight, a.tau, b.tau);
        let direction = [0, 1, 2].map(|k| extrapolate(a.direction[k], b.direction[k], a.tau, b.tau));
        match out.iter_mut().find(|p| {
            (p.normal[0] - normal[0]).abs() <= 1e-2 && (p.normal[1] - normal[1]).abs() <= 1e-2 && (p.weight - weight).abs() <= 1e-2
        }) {
            Some(p) => p.paths.push(path),
            None => out.push(ProperDirection {
                normal,
                weight,
                direction,
                paths: vec![path],
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_mu_tau_tree, build_nu_bar_tau, build_symmetric_cube_tree};

    const TAUS: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

    fn mu_rows() -> Vec<SweepRow> {
        TAUS.iter()
            .map(|&t| SweepRow::from_tree(t, build_mu_tau_tree(t).unwrap(), Some(Chart::tau(t).unwrap())))
            .collect()
    }

    fn has(found: &[ProperDirection], normal: [f64; 2], weight: f64) -> bool {
        found.iter().any(|p| {
            (p.normal[0] - normal[0]).abs() < 1e-2 && (p.normal[1] - normal[1]).abs() < 1e-2 && (p.weight - weight).abs() < 1e-2
        })
    }

    #[test]
    fn mu_tau_limits() {
        let found = proper_directions(&mu_rows(), 0.05, 0.95).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(found.len(), 3, "{found:?}");
        assert!(has(&found, [0.0, 1.0], 0.5));
        assert!(has(&found, [1.0, 0.0], 0.5));
        assert!(has(&found, [h, h], 0.25));
    }

    #[test]
    fn constant_tree_keeps_its_splits() {
        let rows: Vec<SweepRow> = TAUS
            .iter()
            .map(|&t| SweepRow::from_tree(t, build_symmetric_cube_tree(), Some(Chart::tau(t).unwrap())))
            .collect();
        let found = proper_directions(&rows, 0.05, 0.95).unwrap();
        assert_eq!(found.len(), 3);
        assert!(found.iter().all(|p| (p.weight - 0.5).abs() < 1e-12));
    }

    #[test]
    fn vanishing_weight_is_excluded() {
        use crate::laminate::SplitNode;
        let rows: Vec<SweepRow> = TAUS
            .iter()
            .map(|&t| {
                // right part carries weight t along the x axis
                let left = Coords::new(-t / (1.0 - t), 0.0, 0.0);
                let root = SplitNode::with_children(
                    Coords::new(0.0, 0.0, 0.0),
                    1.0,
                    SplitNode::leaf(left, 1.0 - t),
                    SplitNode::leaf(Coords::new(1.0, 0.0, 0.0), t),
                );
                SweepRow::from_tree(t, LaminateTree::new(root).unwrap(), Some(Chart::tau(t).unwrap()))
            })
            .collect();
        assert!(proper_directions(&rows, 0.05, 0.95).unwrap().is_empty());
        assert!(matches!(
            proper_directions(&rows[..2], 0.05, 0.95),
            Err(Error::InsufficientRows { need: 3, got: 2 })
        ));
    }

    #[test]
    fn nu_bar_sweep_is_exact() {
        let cfg = SearchConfig::restricted(6);
        let rows = sweep(
            |t| Ok(build_nu_bar_tau(t)?.coords_measure),
            &[0.2, 0.05, 0.01],
            |t| Chart::tau(t).map(Some),
            |t| Ok(Cone::Quadric(t)),
            &cfg,
        )
        .unwrap();
        for r in &rows {
            let res = r.outcome.as_ref().unwrap();
            assert_eq!(res.status, SearchStatus::Exact);
        }
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("tau,defect,status,nodes,directions,weights"));
        assert!(sweep(|t| Ok(build_nu_bar_tau(t)?.coords_measure), &[0.01, 0.2], |_| Ok(None), |_| Ok(Cone::Axes), &cfg).is_err());
    }
}
