//! Group codes as concrete point sets: distance evaluation from exponent
//! vectors, the flat torus map and rendering of pseudo-diagonal matrices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GroupElementTable, GroupPresentation};

/// Largest orbit the brute-force oracle will render.
pub const BRUTE_FORCE_LIMIT: usize = 5000;

const NORM_TOLERANCE: f64 = 1e-12;

/// Weights of the initial vector `(δ_1, 0, δ_2, 0, ..., δ_k, 0, r_1, ..., r_s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialVector {
    pub deltas: Vec<f64>,
    /// Values on the reflection coordinates, empty for rotation-only groups.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reflection: Vec<f64>,
}

impl InitialVector {
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        Self::with_reflection(deltas, Vec::new())
    }

    pub fn with_reflection(deltas: Vec<f64>, reflection: Vec<f64>) -> Result<Self> {
        let v = InitialVector { deltas, reflection };
        if v.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidParameter(
                "radii must be finite and nonnegative".into(),
            ));
        }
        if v.reflection.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter(
                "reflection values must be finite".into(),
            ));
        }
        if (v.norm_squared() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "initial vector must have unit norm (squared norm {})",
                v.norm_squared()
            )));
        }
        Ok(v)
    }

    /// Scales arbitrary nonnegative radii to unit norm.
    pub fn normalized(deltas: Vec<f64>) -> Result<Self> {
        let s: f64 = deltas.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::InvalidParameter("initial vector is zero".into()));
        }
        Self::new(deltas.into_iter().map(|d| d / s).collect())
    }

    /// From LP weights `y_j = δ_j^2`.
    pub fn from_weights(y: &[f64]) -> Result<Self> {
        Self::normalized(y.iter().map(|w| w.max(0.0).sqrt()).collect())
    }

    pub fn blocks(&self) -> usize {
        self.deltas.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.deltas
            .iter()
            .chain(&self.reflection)
            .map(|d| d * d)
            .collect()
    }

    pub fn norm_squared(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn dimension(&self) -> usize {
        2 * self.deltas.len() + self.reflection.len()
    }

    pub fn ambient(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dimension());
        for (j, d) in self.deltas.iter().enumerate() {
            v[2 * j] = *d;
        }
        let base = 2 * self.deltas.len();
        for (l, r) in self.reflection.iter().enumerate() {
            v[base + l] = *r;
        }
        v
    }
}

/// One group element in pseudo-diagonal form: rotation exponents and
/// reflection signs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElementSigns {
    pub exponents: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub signs: Vec<i8>,
}

impl GroupElementSigns {
    pub fn rotation(exponents: Vec<i64>) -> Self {
        GroupElementSigns {
            exponents,
            signs: Vec::new(),
        }
    }

    pub fn is_identity(&self, order: u64) -> bool {
        self.exponents
            .iter()
            .all(|b| b.rem_euclid(order as i64) == 0)
            && self.signs.iter().all(|&s| s == 1)
    }

    pub fn dimension(&self) -> usize {
        2 * self.exponents.len() + self.signs.len()
    }
}

/// `c` with `|g x - x|^2 = 2 - 2 <c, y>`: `cos(2π b_j / M)` per rotation
/// block, then the reflection signs.
pub fn constraint_coefficients(e: &GroupElementSigns, order: u64) -> Result<Vec<f64>> {
    if e.is_identity(order) {
        return Err(Error::IdentityElement);
    }
    let m = order as i64;
    let mut c: Vec<f64> = e
        .exponents
        .iter()
        .map(|&b| (2.0 * PI * b.rem_euclid(m) as f64 / m as f64).cos())
        .collect();
    c.extend(e.signs.iter().map(|&s| s as f64));
    Ok(c)
}

fn rotation_coefficients(b: &[i64], m: i64) -> impl Iterator<Item = f64> + '_ {
    b.iter()
        .map(move |&x| (2.0 * PI * x.rem_euclid(m) as f64 / m as f64).cos())
}

/// Squared distance `2 - 2 <c(b), y>` of element `b` from the identity.
pub fn squared_distance(b: &[i64], order: u64, weights: &[f64]) -> f64 {
    let s: f64 = rotation_coefficients(b, order as i64)
        .zip(weights)
        .map(|(c, y)| c * y)
        .sum();
    (2.0 - 2.0 * s).max(0.0)
}

/// Minimum distance `min_{g != 1} |g x - x|` from the cosine formula.
pub fn min_distance(elements: &GroupElementTable, order: u64, x: &InitialVector) -> f64 {
    let y = x.weights();
    elements
        .iter()
        .filter(|b| b.iter().any(|v| v.rem_euclid(order as i64) != 0))
        .map(|b| squared_distance(b, order, &y[..b.len()]))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Minimum distance for elements carrying reflection signs.
pub fn min_distance_signed(
    elements: &[GroupElementSigns],
    order: u64,
    x: &InitialVector,
) -> Result<f64> {
    let y = x.weights();
    let mut best = f64::INFINITY;
    for e in elements.iter().filter(|e| !e.is_identity(order)) {
        let c = constraint_coefficients(e, order)?;
        if c.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "element has {} coordinates, vector has {}",
                c.len(),
                y.len()
            )));
        }
        let s: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
        best = best.min((2.0 - 2.0 * s).max(0.0));
    }
    Ok(best.sqrt())
}

/// `ψ(u) = (δ_1 cos(u_1/δ_1), δ_1 sin(u_1/δ_1), ...)`.
pub fn torus_map(x0: &InitialVector, phases: &[f64]) -> Result<DVector<f64>> {
    if phases.len() != x0.blocks() {
        return Err(Error::DimensionMismatch(format!(
            "{} phases for {} blocks",
            phases.len(),
            x0.blocks()
        )));
    }
    if let Some(j) = x0.deltas.iter().position(|&d| d == 0.0) {
        return Err(Error::DegenerateRadius(j));
    }
    let mut v = DVector::zeros(2 * x0.blocks());
    for (j, (&d, &u)) in x0.deltas.iter().zip(phases).enumerate() {
        v[2 * j] = d * (u / d).cos();
        v[2 * j + 1] = d * (u / d).sin();
    }
    Ok(v)
}

/// Torus phases of the lattice point `b`: `u_j = 2π δ_j b_j / M`.
pub fn lattice_phases(x0: &InitialVector, b: &[i64], order: u64) -> Vec<f64> {
    x0.deltas
        .iter()
        .zip(b)
        .map(|(d, &x)| 2.0 * PI * d * x as f64 / order as f64)
        .collect()
}

/// Block-diagonal orthogonal matrix: rotations by `2π b_j / M`, then the signs.
pub fn render_element(e: &GroupElementSigns, order: u64, dim: usize) -> Result<DMatrix<f64>> {
    if e.dimension() != dim {
        return Err(Error::DimensionMismatch(format!(
            "element acts on R^{}, requested R^{dim}",
            e.dimension()
        )));
    }
    let m = order as i64;
    let mut g = DMatrix::zeros(dim, dim);
    for (j, &b) in e.exponents.iter().enumerate() {
        let angle = 2.0 * PI * b.rem_euclid(m) as f64 / m as f64;
        let (s, c) = angle.sin_cos();
        let i = 2 * j;
        g[(i, i)] = c;
        g[(i, i + 1)] = -s;
        g[(i + 1, i)] = s;
        g[(i + 1, i + 1)] = c;
    }
    let base = 2 * e.exponents.len();
    for (l, &s) in e.signs.iter().enumerate() {
        g[(base + l, base + l)] = s as f64;
    }
    Ok(g)
}

/// Orbit `{g x}` as rows.
pub fn render_orbit(
    elements: &[GroupElementSigns],
    order: u64,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let dim = x.len();
    let mut points = DMatrix::zeros(elements.len(), dim);
    for (i, e) in elements.iter().enumerate() {
        let p = render_element(e, order, dim)? * x;
        points.set_row(i, &p.transpose());
    }
    Ok(points)
}

/// Smallest pairwise distance between rows.
pub fn min_pairwise_distance(points: &DMatrix<f64>) -> Result<f64> {
    let n = points.nrows();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min((points.row(i) - points.row(j)).norm());
        }
    }
    Ok(best)
}

/// Renders every element, applies it to `x` and returns the smallest
/// pairwise distance of the orbit.
pub fn brute_force_min_distance(
    elements: &[GroupElementSigns],
    order: u64,
    dim: usize,
    x: &DVector<f64>,
) -> Result<f64> {
    if elements.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            size: elements.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if x.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} coordinates, expected {dim}",
            x.len()
        )));
    }
    min_pairwise_distance(&render_orbit(elements, order, x)?)
}

pub fn rotation_elements(table: &GroupElementTable) -> Vec<GroupElementSigns> {
    table
        .iter()
        .map(|b| GroupElementSigns::rotation(b.to_vec()))
        .collect()
}

/// A found code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub order: u64,
    pub dim: usize,
    pub group: String,
    pub presentation: GroupPresentation,
    pub initial_vector: InitialVector,
    pub min_distance: f64,
    /// Generator matrix of the exponent lattice.
    pub lattice: Vec<Vec<i64>>,
    pub raw_count: usize,
    pub tested_count: usize,
    pub degenerate: bool,
}
