//! Optimum search over candidate lattices, the odd-dimension layered
//! construction, and counting estimates.

use std::cmp::Ordering;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, totient};
use crate::code::{
    brute_force_min_distance, CodeRecord, GroupElementSigns, InitialVector, BRUTE_FORCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::intmat::{snf, IntMatrix};
use crate::ivp::{optimal_initial_vector, LpStatus};
use crate::lattice::{
    enumerate_lattices, group_elements, isomorphism_class, CandidateLattice, EnumerationOptions,
    GroupPresentation, Signature,
};

/// Candidates whose distance is within this of the best are considered tied.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Agreement required between the closed-form odd-dimension distance and
/// the rendered orbit.
pub const ODD_ORBIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Keep the evaluation of every tested candidate.
    pub keep_all: bool,
    pub enumeration: EnumerationOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub order: u64,
    pub dim: usize,
    pub options: SearchOptions,
}

impl SearchParams {
    pub fn new(order: u64, dim: usize) -> Self {
        SearchParams {
            order,
            dim,
            options: SearchOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SearchOptions) -> Self {
        self.options = options;
        self
    }

    pub fn blocks(&self) -> usize {
        self.dim / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidParameter(format!(
                "order must be at least 2 (got M = {})",
                self.order
            )));
        }
        if self.order > crate::lattice::MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "order {} exceeds the supported maximum {}",
                self.order,
                crate::lattice::MAX_ORDER
            )));
        }
        if self.dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "dimension must be at least 2 (got n = {})",
                self.dim
            )));
        }
        if self.dim % 2 == 1 && self.order % 2 == 1 {
            return Err(Error::OddOrder(self.order));
        }
        Ok(())
    }
}

/// LP result for one tested candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEvaluation {
    pub lattice: Vec<Vec<i64>>,
    #[serde(skip)]
    pub signature: Option<Signature>,
    pub min_distance: f64,
    pub deltas: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub record: CodeRecord,
    /// Empty unless `keep_all` was requested.
    pub evaluations: Vec<CandidateEvaluation>,
}

/// Runs `f` on a pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn evaluate_candidate(c: &CandidateLattice) -> Result<CandidateEvaluation> {
    let table = group_elements(&c.t, c.order)?;
    let best = optimal_initial_vector(&table, c.order)?;
    Ok(CandidateEvaluation {
        lattice: c.rows_i64(),
        signature: Some(c.signature.clone()),
        min_distance: best.min_distance,
        deltas: best.vector.deltas,
        degenerate: best.solution.status == LpStatus::DegenerateFlagged,
    })
}

/// Index of the winner: largest distance, ties within [`TIE_TOLERANCE`]
/// broken by signature, then by matrix entries.
fn select_best(evals: &[CandidateEvaluation]) -> Option<usize> {
    let best = evals
        .iter()
        .map(|e| e.min_distance)
        .fold(f64::NEG_INFINITY, f64::max);
    (0..evals.len())
        .filter(|&i| evals[i].min_distance >= best - TIE_TOLERANCE)
        .min_by(|&a, &b| {
            let (x, y) = (&evals[a], &evals[b]);
            x.signature
                .cmp(&y.signature)
                .then_with(|| x.lattice.cmp(&y.lattice))
                .then(Ordering::Equal)
        })
}

/// Best rotation-only code of order `M` in even dimension `n = 2k`.
pub fn search_optimum(params: &SearchParams) -> Result<CodeRecord> {
    Ok(search_with_candidates(params)?.record)
}

pub fn search_with_candidates(params: &SearchParams) -> Result<SearchOutcome> {
    params.validate()?;
    if params.dim % 2 == 1 {
        return Err(Error::InvalidDimension(format!(
            "n = {} is odd; use the odd-dimension search",
            params.dim
        )));
    }
    let order = params.order;
    let k = params.blocks();
    let opts = params.options;
    with_threads(opts.threads, move || {
        let set = enumerate_lattices(order, k, &opts.enumeration);
        let evals: Vec<CandidateEvaluation> = set
            .candidates
            .par_iter()
            .map(evaluate_candidate)
            .collect::<Result<_>>()?;
        let i = select_best(&evals).ok_or(Error::EmptyGroup)?;
        let winner = &evals[i];
        let t = IntMatrix::from_rows(&winner.lattice);
        let presentation = isomorphism_class(&t, order)?;
        let record = CodeRecord {
            order,
            dim: params.dim,
            group: presentation.label(),
            presentation,
            initial_vector: InitialVector::normalized(winner.deltas.clone())?,
            min_distance: winner.min_distance,
            lattice: winner.lattice.clone(),
            raw_count: set.raw_count,
            tested_count: set.candidates.len(),
            degenerate: winner.degenerate,
        };
        Ok(SearchOutcome {
            record,
            evaluations: if opts.keep_all { evals } else { Vec::new() },
        })
    })
}

/// Two copies of the best `(M/2, 2k)` code on parallel hyperplanes,
/// `y_θ = (cos θ x_0, ±sin θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddDimCode {
    pub order: u64,
    pub dim: usize,
    pub base: CodeRecord,
    pub theta: f64,
    pub min_distance: f64,
    /// Invariant factors of `base × Z_2`, decreasing.
    pub invariant_factors: Vec<u64>,
    pub initial_vector: Vec<f64>,
    /// Minimum distance of the rendered orbit, when within the brute-force guard.
    pub orbit_min_distance: Option<f64>,
}

impl OddDimCode {
    pub fn group_label(&self) -> String {
        GroupPresentation {
            order: self.order,
            invariant_factors: self.invariant_factors.clone(),
            generators: Vec::new(),
        }
        .label()
    }

    /// Elements `(b, ±1)` of the layered group.
    pub fn elements(&self) -> Result<Vec<GroupElementSigns>> {
        layered_elements(&self.base)
    }
}

fn layered_elements(base: &CodeRecord) -> Result<Vec<GroupElementSigns>> {
    let t = IntMatrix::from_rows(&base.lattice);
    let table = group_elements(&t, base.order)?;
    // exponents are taken modulo the full order M = 2 * base order
    let mut out = Vec::with_capacity(2 * table.len());
    for sign in [1i8, -1] {
        for b in table.iter() {
            out.push(GroupElementSigns {
                exponents: b.iter().map(|x| 2 * x).collect(),
                signs: vec![sign],
            });
        }
    }
    Ok(out)
}

/// `θ` solving `cos θ · d0 = 2 sin θ` by bisection.
pub fn equalizing_angle_bisection(d0: f64) -> f64 {
    let f = |t: f64| t.cos() * d0 - 2.0 * t.sin();
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Layered distance `min(cos θ · d0, 2 sin θ)`.
pub fn layered_distance(d0: f64, theta: f64) -> f64 {
    (theta.cos() * d0).min(2.0 * theta.sin())
}

fn product_factors(factors: &[u64], extra: u64) -> Result<Vec<u64>> {
    let mut diag: Vec<u64> = factors.to_vec();
    diag.push(extra);
    let n = diag.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (i, d) in diag.iter().enumerate() {
        rows[i][i] = *d as i64;
    }
    let s = snf(&IntMatrix::from_rows(&rows))?;
    Ok(s.invariant_factors
        .iter()
        .filter_map(BigInt::to_u64)
        .filter(|&d| d > 1)
        .collect())
}

/// Best layered code of even order `M` in odd dimension `n = 2k + 1`.
pub fn search_optimum_odd(params: &SearchParams) -> Result<OddDimCode> {
    params.validate()?;
    if params.dim.is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!(
            "n = {} is even; use the even-dimension search",
            params.dim
        )));
    }
    if params.order % 2 == 1 {
        return Err(Error::OddOrder(params.order));
    }
    let half = params.order / 2;
    let k = params.blocks();
    if half < 2 || k < 1 {
        return Err(Error::InvalidParameter(format!(
            "layered construction needs M >= 4 and n >= 3 (got M = {}, n = {})",
            params.order, params.dim
        )));
    }
    let base = search_optimum(&SearchParams {
        order: half,
        dim: 2 * k,
        options: params.options,
    })?;
    let d0 = base.min_distance;
    let theta = (d0 / 2.0).atan();
    let bisected = equalizing_angle_bisection(d0);
    if (theta - bisected).abs() > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "equalizing angle {theta} disagrees with bisection {bisected}"
        )));
    }
    let d = 2.0 * d0 / (4.0 + d0 * d0).sqrt();
    if (layered_distance(d0, theta) - d).abs() > 1e-12 {
        return Err(Error::NumericalFailure(
            "active constraints are not equalized".into(),
        ));
    }

    let x0 = base.initial_vector.ambient();
    let mut y = x0.scale(theta.cos()).as_slice().to_vec();
    y.push(theta.sin());

    let orbit_min_distance = if params.order as usize <= BRUTE_FORCE_LIMIT {
        let elements = layered_elements(&base)?;
        let v = DVector::from_vec(y.clone());
        let brute = brute_force_min_distance(&elements, params.order, params.dim, &v)?;
        if (brute - d).abs() > ODD_ORBIT_TOLERANCE {
            return Err(Error::NumericalFailure(format!(
                "rendered orbit distance {brute} disagrees with {d}"
            )));
        }
        Some(brute)
    } else {
        None
    };

    let invariant_factors = product_factors(&base.presentation.invariant_factors, 2)?;
    Ok(OddDimCode {
        order: params.order,
        dim: params.dim,
        base,
        theta,
        min_distance: d,
        invariant_factors,
        initial_vector: y,
        orbit_min_distance,
    })
}

/// Counting columns for one `(M, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEstimates {
    pub order: u64,
    pub dim: usize,
    /// `C(M/2, n/2)`; `None` on overflow.
    pub binomial: Option<u128>,
    /// `floor((M/2)^k / φ(M))`; `None` on overflow.
    pub adam_estimate: Option<u128>,
    pub tested_cyclic: usize,
    pub tested_commutative: usize,
    pub raw_count: usize,
}

pub fn count_estimates(
    order: u64,
    dim: usize,
    options: &EnumerationOptions,
) -> Result<CountEstimates> {
    let params = SearchParams::new(order, dim);
    params.validate()?;
    if dim % 2 == 1 {
        return Err(Error::InvalidDimension(format!(
            "count estimates need even n (got {dim})"
        )));
    }
    let k = dim / 2;
    let half = (order / 2) as u128;
    let adam_estimate = half
        .checked_pow(k as u32)
        .map(|p| p / totient(order) as u128);
    let set = enumerate_lattices(order, k, options);
    let cyclic = set
        .candidates
        .par_iter()
        .map(|c| c.is_cyclic())
        .collect::<Result<Vec<bool>>>()?;
    Ok(CountEstimates {
        order,
        dim,
        binomial: binomial(order / 2, k as u64),
        adam_estimate,
        tested_cyclic: cyclic.iter().filter(|&&c| c).count(),
        tested_commutative: set.candidates.len(),
        raw_count: set.raw_count,
    })
}
