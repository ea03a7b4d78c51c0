//! The initial vector problem as a linear program.
//!
//! For weights `y_j = δ_j^2` the squared distance of `g x` from `x` is
//! `2 - 2 <c(g), y>`, so maximising the minimum distance is
//!
//! ```text
//! max z  s.t.  z + 2 <c_i, y> <= 2,  sum y = 1,  y >= 0, z >= 0
//! ```
//!
//! solved here by a dense two-phase simplex with Bland's rule.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::code::{constraint_coefficients, min_distance, GroupElementSigns, InitialVector};
use crate::error::{Error, Result};
use crate::lattice::GroupElementTable;

pub const PIVOT_TOLERANCE: f64 = 1e-10;
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Weights below this are reported as degenerate.
pub const DEGENERATE_WEIGHT: f64 = 1e-9;
/// Decimals kept when identifying equal constraint rows.
pub const DEDUP_DECIMALS: i32 = 12;
/// Allowed gap between `sqrt(z)` and the re-evaluated minimum distance.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexProblem {
    /// Number of weight variables.
    pub weights: usize,
    /// One coefficient vector per distinct non-identity element.
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    /// Optimal, with some weight below [`DEGENERATE_WEIGHT`]: the code lies in
    /// a lower-dimensional sphere.
    DegenerateFlagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub z: f64,
    pub y: Vec<f64>,
    pub status: LpStatus,
    pub iterations: usize,
}

impl SimplexProblem {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let weights = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if weights == 0 || rows.iter().any(|r| r.len() != weights) {
            return Err(Error::DimensionMismatch("ragged constraint rows".into()));
        }
        Ok(SimplexProblem { weights, rows })
    }

    pub fn constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn iteration_cap(&self) -> usize {
        50 * (self.weights + self.rows.len())
    }

    /// `min_i (2 - 2 <c_i, y>)`.
    pub fn objective_at(&self, y: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|c| 2.0 - 2.0 * c.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

fn dedup_key(c: &[f64]) -> Vec<i64> {
    let scale = 10f64.powi(DEDUP_DECIMALS);
    c.iter().map(|x| (x * scale).round() as i64).collect()
}

fn collect_rows(
    coefficients: impl Iterator<Item = Vec<f64>>,
    dedup: bool,
) -> Result<SimplexProblem> {
    let mut seen = HashSet::new();
    let rows: Vec<Vec<f64>> = coefficients
        .filter(|c| !dedup || seen.insert(dedup_key(c)))
        .collect();
    SimplexProblem::from_rows(rows)
}

fn table_coefficients<'a>(
    elements: &'a GroupElementTable,
    order: u64,
) -> impl Iterator<Item = Vec<f64>> + 'a {
    elements.iter().filter_map(move |b| {
        constraint_coefficients(&GroupElementSigns::rotation(b.to_vec()), order).ok()
    })
}

/// One row per non-identity element, equal rows (after rounding) merged.
pub fn build_lp(elements: &GroupElementTable, order: u64) -> Result<SimplexProblem> {
    collect_rows(table_coefficients(elements, order), true)
}

/// Same as [`build_lp`] without merging equal rows.
pub fn build_lp_unfolded(elements: &GroupElementTable, order: u64) -> Result<SimplexProblem> {
    collect_rows(table_coefficients(elements, order), false)
}

/// Rows for elements carrying reflection signs; weights are ordered as the
/// rotation blocks followed by the reflection coordinates.
pub fn build_lp_signed(elements: &[GroupElementSigns], order: u64) -> Result<SimplexProblem> {
    collect_rows(
        elements
            .iter()
            .filter(|e| !e.is_identity(order))
            .map(|e| constraint_coefficients(e, order))
            .collect::<Result<Vec<_>>>()?
            .into_iter(),
        true,
    )
}

struct Tableau {
    a: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.a[i][self.cols]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let p = self.a[r][s];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[s];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[s] = 0.0;
            }
        }
        let f = self.obj[s];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.obj[s] = 0.0;
        }
        self.basis[r] = s;
    }

    /// Bland's rule until optimal; `allowed` limits entering columns.
    fn optimize(&mut self, allowed: usize, budget: &mut usize) -> Result<()> {
        loop {
            let Some(s) = (0..allowed).find(|&j| self.obj[j] < -PIVOT_TOLERANCE) else {
                return Ok(());
            };
            if *budget == 0 {
                return Err(Error::NumericalFailure(
                    "simplex iteration cap reached".into(),
                ));
            }
            *budget -= 1;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let a = self.a[i][s];
                if a <= PIVOT_TOLERANCE {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-15
                            || (ratio <= best + 1e-15 && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(Error::NumericalFailure(
                    "linear program is unbounded".into(),
                ));
            };
            self.pivot(r, s);
        }
    }
}

/// Two-phase simplex. Variables are `[z, y_1..y_m]`, one slack per
/// constraint row and one artificial for `sum y = 1`.
pub fn solve(problem: &SimplexProblem) -> Result<LpSolution> {
    let m = problem.weights;
    let nc = problem.rows.len();
    if m == 0 || nc == 0 {
        return Err(Error::EmptyGroup);
    }
    let n = 1 + m;
    let art = n + nc;
    let cols = art + 1;
    let mut a = Vec::with_capacity(nc + 1);
    for (i, c) in problem.rows.iter().enumerate() {
        let mut row = vec![0.0; cols + 1];
        row[0] = 1.0;
        for (j, v) in c.iter().enumerate() {
            row[1 + j] = 2.0 * v;
        }
        row[n + i] = 1.0;
        row[cols] = 2.0;
        a.push(row);
    }
    let mut eq = vec![0.0; cols + 1];
    for v in &mut eq[1..n] {
        *v = 1.0;
    }
    eq[art] = 1.0;
    eq[cols] = 1.0;
    a.push(eq);
    let basis: Vec<usize> = (n..n + nc).chain([art]).collect();

    // phase one: maximise -artificial
    let mut obj = vec![0.0; cols + 1];
    for (o, e) in obj.iter_mut().zip(&a[nc]) {
        *o = -e;
    }
    obj[art] = 0.0;
    let mut t = Tableau {
        a,
        obj,
        basis,
        cols,
    };
    let mut budget = problem.iteration_cap();
    let start = budget;
    t.optimize(art, &mut budget)?;
    if t.obj[cols] < -FEASIBILITY_TOLERANCE {
        return Err(Error::NumericalFailure(
            "linear program is infeasible".into(),
        ));
    }
    if let Some(r) = t.basis.iter().position(|&b| b == art) {
        match (0..art).find(|&j| t.a[r][j].abs() > PIVOT_TOLERANCE) {
            Some(s) => t.pivot(r, s),
            None => {
                t.a.remove(r);
                t.basis.remove(r);
            }
        }
    }

    // phase two: maximise z
    t.obj = vec![0.0; cols + 1];
    t.obj[0] = -1.0;
    if let Some(r) = t.basis.iter().position(|&b| b == 0) {
        let row = t.a[r].clone();
        for (o, v) in t.obj.iter_mut().zip(&row) {
            *o += v;
        }
        t.obj[0] = 0.0;
    }
    t.optimize(art, &mut budget)?;

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i);
        }
    }
    let mut y: Vec<f64> = x[1..].iter().map(|v| v.max(0.0)).collect();
    let s: f64 = y.iter().sum();
    if (s - 1.0).abs() > FEASIBILITY_TOLERANCE {
        return Err(Error::NumericalFailure(format!("weights sum to {s}")));
    }
    for v in &mut y {
        *v /= s;
    }
    let z = problem.objective_at(&y);
    if (z - x[0]).abs() > FEASIBILITY_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "objective {} disagrees with constraint minimum {z}",
            x[0]
        )));
    }
    let status = if y.iter().any(|&v| v < DEGENERATE_WEIGHT) {
        LpStatus::DegenerateFlagged
    } else {
        LpStatus::Optimal
    };
    Ok(LpSolution {
        z: z.max(0.0),
        y,
        status,
        iterations: start - budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalVector {
    pub vector: InitialVector,
    pub min_distance: f64,
    pub solution: LpSolution,
}

/// Best initial vector for a fixed group, with `d` checked against the
/// cosine formula.
pub fn optimal_initial_vector(elements: &GroupElementTable, order: u64) -> Result<OptimalVector> {
    let problem = build_lp(elements, order)?;
    let solution = solve(&problem)?;
    let vector = InitialVector::from_weights(&solution.y)?;
    let d = solution.z.sqrt();
    let check = min_distance(elements, order, &vector);
    if (d - check).abs() > ROUND_TRIP_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "LP distance {d} disagrees with evaluated distance {check}"
        )));
    }
    Ok(OptimalVector {
        vector,
        min_distance: check,
        solution,
    })
}
