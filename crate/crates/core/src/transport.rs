//! Exact optimal transport between finitely supported distributions by LP.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use crate::error::{Error, Result};

/// Minimal cost of moving `supply` onto `demand` under the ground cost
/// `cost(i, j)`. Both mass vectors must have the same total (to rounding).
pub fn transport_cost(
    supply: &[f64],
    demand: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    if supply.is_empty() || demand.is_empty() {
        return Err(Error::InvalidMeasure("empty marginal".into()));
    }
    if supply.len() == 1 || demand.len() == 1 {
        // a single atom on either side fixes the plan
        let total = if supply.len() == 1 {
            demand.iter().enumerate().map(|(j, b)| b * cost(0, j)).sum()
        } else {
            supply.iter().enumerate().map(|(i, a)| a * cost(i, 0)).sum()
        };
        return Ok(total);
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut rows: Vec<LinearExpr> = (0..supply.len()).map(|_| LinearExpr::empty()).collect();
    let mut cols: Vec<LinearExpr> = (0..demand.len()).map(|_| LinearExpr::empty()).collect();
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, col) in cols.iter_mut().enumerate() {
            let v = problem.add_var(cost(i, j), (0.0, f64::INFINITY));
            row.add(v, 1.0);
            col.add(v, 1.0);
        }
    }
    for (expr, &a) in rows.into_iter().zip(supply) {
        problem.add_constraint(expr, ComparisonOp::Eq, a);
    }
    // the last column balance is implied by the totals
    let n = demand.len();
    for (expr, &b) in cols.into_iter().zip(demand).take(n - 1) {
        problem.add_constraint(expr, ComparisonOp::Eq, b);
    }
    let solution = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok(solution.objective().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_plans() {
        let c = |i: usize, j: usize| (i as f64 - j as f64).abs();
        assert_eq!(transport_cost(&[1.0], &[0.5, 0.5], c).unwrap(), 0.5);
        assert!(transport_cost(&[0.5, 0.5], &[0.5, 0.5], c).unwrap().abs() < 1e-12);
        let v = transport_cost(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5], c).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_two_by_two() {
        // plans on 2x2 supports form a segment; scan it
        let a = [0.3, 0.7];
        let b = [0.6, 0.4];
        let cost = [[1.0, 3.0], [2.0, 0.5]];
        let mut best = f64::INFINITY;
        for k in 0..=10_000 {
            let p00 = 0.3 * k as f64 / 10_000.0;
            let p01 = a[0] - p00;
            let p10 = b[0] - p00;
            let p11 = a[1] - p10;
            if p01 < 0.0 || p10 < 0.0 || p11 < 0.0 {
                continue;
            }
            let v = p00 * cost[0][0] + p01 * cost[0][1] + p10 * cost[1][0] + p11 * cost[1][1];
            best = best.min(v);
        }
        let lp = transport_cost(&a, &b, |i, j| cost[i][j]).unwrap();
        assert!((lp - best).abs() < 1e-9, "{lp} vs {best}");
    }
}
