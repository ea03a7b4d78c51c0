//! Candidate lattices for commutative group codes free of reflection blocks.
//!
//! A group of order `M` acting by rotations on `k` planes corresponds to a
//! lattice `L` of exponent vectors with `M Z^k ⊂ L ⊂ Z^k` and
//! `[L : M Z^k] = M`. This module enumerates upper-triangular generator
//! matrices for those lattices, filters out the ones that do not contain
//! `M Z^k`, and discards lattices whose codes are isometric to one already
//! kept.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, element_order, ext_gcd, gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::intmat::{scaled_inverse, snf, IntMatrix};

/// Largest order accepted by the enumeration; keeps every modular product in `i64`.
pub const MAX_ORDER: u64 = 1 << 30;

/// A diagonal `d_i = M / a_i` for the generator matrix, with
/// `a_1 >= a_2 >= ... >= a_k` and `a_1 * ... * a_k = M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiagonalProfile {
    pub order: u64,
    pub divisors: Vec<u64>,
    pub diagonal: Vec<u64>,
}

impl DiagonalProfile {
    pub fn blocks(&self) -> usize {
        self.diagonal.len()
    }

    /// Values `(a_i)^i * (a_{i+1} ... a_k)` for `i = 1..=k`.
    pub fn tower_products(&self) -> Vec<u128> {
        let a = &self.divisors;
        (0..a.len())
            .map(|i| {
                let head = (a[i] as u128).pow(i as u32 + 1);
                a[i + 1..].iter().fold(head, |acc, &x| acc * x as u128)
            })
            .collect()
    }

    /// True when the bound `(a_i)^i (a_{i+1} ... a_k) <= M` is attained with
    /// equality for some `i >= 2`.
    pub fn on_boundary(&self) -> bool {
        self.tower_products()
            .iter()
            .skip(1)
            .any(|&v| v == self.order as u128)
    }

    pub fn admits(&self, bound: DiagonalBound) -> bool {
        match bound {
            DiagonalBound::Inclusive => true,
            DiagonalBound::Strict => self.blocks() != 2 || !self.on_boundary(),
        }
    }
}

/// All ordered factorizations `M = a_1 ... a_k` with `a_1 >= ... >= a_k`,
/// sorted lexicographically by diagonal.
pub fn enumerate_diagonals(order: u64, blocks: usize) -> Vec<DiagonalProfile> {
    fn rec(rest: u64, max: u64, left: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            if rest == 1 {
                out.push(acc.clone());
            }
            return;
        }
        for a in arith::divisors(rest).into_iter().rev() {
            if a > max {
                continue;
            }
            acc.push(a);
            rec(rest / a, a, left - 1, acc, out);
            acc.pop();
        }
    }
    if order == 0 || blocks == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    rec(order, order, blocks, &mut Vec::new(), &mut raw);
    let mut profiles: Vec<DiagonalProfile> = raw
        .into_iter()
        .map(|a| DiagonalProfile {
            order,
            diagonal: a.iter().map(|&x| order / x).collect(),
            divisors: a,
        })
        .collect();
    profiles.sort_by(|x, y| x.diagonal.cmp(&y.diagonal));
    profiles
}

/// Which diagonal profiles enter the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalBound {
    /// For two blocks, skip the profile `a_1 = a_2 = sqrt(M)`; other block
    /// counts use every profile.
    #[default]
    Strict,
    /// Every profile allowed by `(a_i)^i (a_{i+1} ... a_k) <= M`.
    Inclusive,
}

/// How isometric candidates are discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DedupRule {
    /// Inverse-pair discards on two-block lattices: `[[d1, d1*b], [0, d2]]`
    /// is dropped when `min(b^-1, d2 - b^-1) < b` modulo `d2`. Other block
    /// counts fall back to [`DedupRule::Isometry`].
    #[default]
    Adam,
    /// One representative per canonical signed-permutation signature.
    Isometry,
    /// Keep every valid matrix.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EnumerationOptions {
    pub bound: DiagonalBound,
    pub dedup: DedupRule,
}

impl EnumerationOptions {
    /// Every admissible profile with full isometry dedup.
    pub fn complete() -> Self {
        EnumerationOptions {
            bound: DiagonalBound::Inclusive,
            dedup: DedupRule::Isometry,
        }
    }
}

/// Canonical form of a lattice up to signed coordinate permutations: the
/// lexicographically smallest Hermite form over all `k! 2^k` images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// Row-major big-endian serialization.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .iter()
            .flat_map(|x| (*x as u64).to_be_bytes())
            .collect()
    }
}

/// A valid generator matrix `T` together with `W = M T^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLattice {
    pub order: u64,
    pub t: IntMatrix,
    pub w: IntMatrix,
    pub signature: Signature,
}

impl CandidateLattice {
    pub fn blocks(&self) -> usize {
        self.t.rows()
    }

    pub fn rows_i64(&self) -> Vec<Vec<i64>> {
        self.t
            .to_i64_rows()
            .expect("candidate entries are bounded by M")
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.blocks())
            .map(|i| self.t.get(i, i).to_u64().expect("positive diagonal"))
            .collect()
    }

    pub fn is_cyclic(&self) -> Result<bool> {
        Ok(invariant_factors(&self.t, self.order)?.len() <= 1)
    }
}

/// Candidates for one profile.
#[derive(Debug, Clone)]
pub struct ProfileEnumeration {
    pub profile: DiagonalProfile,
    /// Matrices that passed the `W` integrality check.
    pub raw: Vec<CandidateLattice>,
    /// Matrices rejected by the `W` integrality check.
    pub rejected: usize,
}

fn raw_matrices(diagonal: &[i64]) -> Vec<Vec<Vec<i64>>> {
    let k = diagonal.len();
    let mut t = vec![vec![0i64; k]; k];
    for i in 0..k {
        t[i][i] = diagonal[i];
    }
    let mut out = Vec::new();

    // Fill column j bottom-up (row i = j-1 down to 0) so the gcd of the
    // entries below is known when choosing T(i, j).
    fn fill(
        t: &mut Vec<Vec<i64>>,
        diagonal: &[i64],
        col: usize,
        row: usize,
        below_gcd: i64,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        let k = diagonal.len();
        if col == k {
            if sign_fold_ok(t, diagonal) {
                out.push(t.clone());
            }
            return;
        }
        let dj = diagonal[col];
        for x in 0..dj {
            let g = gcd(x, below_gcd);
            if diagonal[row] > g {
                continue;
            }
            t[row][col] = x;
            if row == 0 {
                let next = col + 1;
                if next == k {
                    fill(t, diagonal, next, 0, 0, out);
                } else {
                    fill(t, diagonal, next, next - 1, diagonal[next], out);
                }
            } else {
                fill(t, diagonal, col, row - 1, g, out);
            }
        }
        t[row][col] = 0;
    }

    if k == 1 {
        out.push(t);
        return out;
    }
    fill(&mut t, diagonal, 1, 0, diagonal[1], &mut out);
    out
}

/// Negating the last coordinate maps the last column `v` to `-v mod d_k`;
/// keep only the lexicographically smaller of the two.
fn sign_fold_ok(t: &[Vec<i64>], diagonal: &[i64]) -> bool {
    let k = diagonal.len();
    let dk = diagonal[k - 1];
    let v: Vec<i64> = (0..k - 1).map(|i| t[i][k - 1]).collect();
    let neg: Vec<i64> = v.iter().map(|&x| (dk - x) % dk).collect();
    v <= neg
}

/// Upper-triangular matrices with the profile's diagonal, reduced
/// superdiagonal entries satisfying `T(i,i) <= gcd(T(i..=j, j))`, folded
/// under the last-coordinate sign flip, and passing the `W` check.
pub fn raw_candidates(profile: &DiagonalProfile) -> ProfileEnumeration {
    let order = profile.order;
    let m = BigInt::from(order);
    let diagonal: Vec<i64> = profile.diagonal.iter().map(|&d| d as i64).collect();
    let matrices = raw_matrices(&diagonal);
    let results: Vec<Option<CandidateLattice>> = matrices
        .par_iter()
        .map(|rows| {
            let t = IntMatrix::from_rows(rows);
            let w = scaled_inverse(&t, &m).ok()?;
            let signature = canonical_signature_rows(rows, order as i64);
            Some(CandidateLattice {
                order,
                t,
                w,
                signature,
            })
        })
        .collect();
    let rejected = results.iter().filter(|r| r.is_none()).count();
    ProfileEnumeration {
        profile: profile.clone(),
        raw: results.into_iter().flatten().collect(),
        rejected,
    }
}

/// Candidates of one profile, deduplicated by signature with the
/// lexicographically smallest matrix kept per class.
pub fn enumerate_candidates(profile: &DiagonalProfile) -> Vec<CandidateLattice> {
    let mut raw = raw_candidates(profile).raw;
    sort_candidates(&mut raw);
    dedup_by_signature(raw)
}

fn sort_candidates(c: &mut [CandidateLattice]) {
    c.sort_by_cached_key(|x| (x.diagonal(), x.rows_i64()));
}

fn dedup_by_signature(sorted: Vec<CandidateLattice>) -> Vec<CandidateLattice> {
    let mut seen = HashSet::new();
    sorted
        .into_iter()
        .filter(|c| seen.insert(c.signature.clone()))
        .collect()
}

/// The lattice an inverse-pair discard points to, as the superdiagonal entry
/// of the kept partner. Only two-block matrices `[[d1, d1*b], [0, d2]]` with
/// `d1 | d2` and `b` a unit modulo `d2` have one.
pub fn adam_partner(rows: &[Vec<i64>]) -> Option<i64> {
    if rows.len() != 2 {
        return None;
    }
    let (d1, w, d2) = (rows[0][0], rows[0][1], rows[1][1]);
    if d2 <= 1 || d2 % d1 != 0 || w % d1 != 0 {
        return None;
    }
    let b = w / d1;
    let inv = mod_inverse(b, d2)?;
    let folded = inv.min(d2 - inv);
    (folded < b).then_some(d1 * folded)
}

/// Result of enumerating every profile for `(M, k)`.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub order: u64,
    pub blocks: usize,
    pub options: EnumerationOptions,
    pub profiles: Vec<DiagonalProfile>,
    /// Matrices passing the `W` check, before dedup.
    pub raw_count: usize,
    /// Matrices failing the `W` check.
    pub rejected_count: usize,
    /// Distinct signatures among the raw matrices.
    pub isometry_classes: usize,
    /// Kept candidates, sorted by diagonal then entries.
    pub candidates: Vec<CandidateLattice>,
}

pub fn enumerate_lattices(order: u64, blocks: usize, options: &EnumerationOptions) -> CandidateSet {
    let profiles: Vec<DiagonalProfile> = enumerate_diagonals(order, blocks)
        .into_iter()
        .filter(|p| p.admits(options.bound))
        .collect();
    let mut raw = Vec::new();
    let mut rejected_count = 0;
    for p in &profiles {
        let e = raw_candidates(p);
        rejected_count += e.rejected;
        raw.extend(e.raw);
    }
    sort_candidates(&mut raw);
    let raw_count = raw.len();
    let isometry_classes = raw
        .iter()
        .map(|c| &c.signature)
        .collect::<HashSet<_>>()
        .len();

    let dedup = match options.dedup {
        DedupRule::Adam if blocks != 2 => DedupRule::Isometry,
        other => other,
    };
    let candidates = match dedup {
        DedupRule::None => raw,
        DedupRule::Isometry => dedup_by_signature(raw),
        DedupRule::Adam => raw
            .into_iter()
            .filter(|c| adam_partner(&c.rows_i64()).is_none())
            .collect(),
    };
    CandidateSet {
        order,
        blocks,
        options: *options,
        profiles,
        raw_count,
        rejected_count,
        isometry_classes,
        candidates,
    }
}

/// Hermite form of the subgroup of `Z_m^k` generated by `gens` and the
/// vectors `m e_i`: upper triangular, `H(j,j) | m`, `0 <= H(i,j) < H(j,j)`.
pub fn subgroup_hermite(gens: &[Vec<i64>], m: i64) -> Vec<Vec<i64>> {
    let k = gens.first().map_or(0, Vec::len);
    let mm = m as i128;
    let mut pool: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| g.iter().map(|x| x.rem_euclid(m)).collect())
        .collect();
    let mut h = vec![vec![0i64; k]; k];
    for c in 0..k {
        let mut pivot = vec![0i64; k];
        pivot[c] = m;
        for r in pool.iter_mut() {
            if r[c] == 0 {
                continue;
            }
            let (a, b) = (pivot[c], r[c]);
            let (g, x, y) = ext_gcd(a, b);
            let (p, q) = ((-(b / g)) as i128, (a / g) as i128);
            let (x, y) = (x as i128, y as i128);
            pivot[c] = g;
            r[c] = 0;
            for j in c + 1..k {
                let (u, v) = (pivot[j] as i128, r[j] as i128);
                pivot[j] = (x * u + y * v).rem_euclid(mm) as i64;
                r[j] = (p * u + q * v).rem_euclid(mm) as i64;
            }
        }
        let g = pivot[c];
        if g < m {
            let scale = (m / g) as i128;
            let extra: Vec<i64> = (0..k)
                .map(|j| {
                    if j <= c {
                        0
                    } else {
                        (scale * pivot[j] as i128).rem_euclid(mm) as i64
                    }
                })
                .collect();
            if extra.iter().any(|&x| x != 0) {
                pool.push(extra);
            }
        }
        pool.retain(|r| r.iter().any(|&x| x != 0));
        h[c] = pivot;
    }
    for j in 1..k {
        for i in 0..j {
            let q = h[i][j].div_euclid(h[j][j]);
            if q == 0 {
                continue;
            }
            h[i][j] -= q * h[j][j];
            let (upper, lower) = h.split_at_mut(j);
            for (x, &y) in upper[i][j + 1..].iter_mut().zip(&lower[0][j + 1..]) {
                *x = (*x as i128 - q as i128 * y as i128).rem_euclid(mm) as i64;
            }
        }
    }
    h
}

fn canonical_signature_rows(rows: &[Vec<i64>], m: i64) -> Signature {
    let k = rows.len();
    let mut best: Option<Vec<i64>> = None;
    let mut image = vec![vec![0i64; k]; rows.len()];
    for sigma in arith::permutations(k) {
        for mask in 0u32..(1 << k) {
            for (src, dst) in rows.iter().zip(image.iter_mut()) {
                for j in 0..k {
                    let x = src[sigma[j]];
                    dst[j] = if mask >> j & 1 == 1 {
                        (-x).rem_euclid(m)
                    } else {
                        x.rem_euclid(m)
                    };
                }
            }
            let h = subgroup_hermite(&image, m);
            let flat: Vec<i64> = h.into_iter().flatten().collect();
            if best.as_ref().is_none_or(|b| flat < *b) {
                best = Some(flat);
            }
        }
    }
    Signature(best.unwrap_or_default())
}

/// Canonical signature of the lattice spanned by the rows of `t` and `M Z^k`.
///
/// Multiplying by a unit of `Z_M` maps a subgroup onto itself, so the
/// signature is automatically invariant under unit scalings.
pub fn canonical_signature(t: &IntMatrix, order: u64) -> Signature {
    let rows = t.to_i64_rows().expect("entries fit in i64");
    canonical_signature_rows(&rows, order as i64)
}

/// The `M` elements of `Λ / M Z^k`, as vectors in `[0, M)^k`, identity first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElementTable {
    pub order: u64,
    pub blocks: usize,
    pub elements: Vec<Vec<i64>>,
}

impl GroupElementTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.elements.iter().map(Vec::as_slice)
    }

    pub fn as_set(&self) -> HashSet<Vec<i64>> {
        self.elements.iter().cloned().collect()
    }

    /// All elements generated by `gens` in `Z_m^k`, by closure.
    pub fn closure(gens: &[Vec<i64>], order: u64) -> GroupElementTable {
        let m = order as i64;
        let k = gens.first().map_or(0, Vec::len);
        let zero = vec![0i64; k];
        let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
        let mut elements = vec![zero];
        let mut head = 0;
        while head < elements.len() {
            let current = elements[head].clone();
            head += 1;
            for g in gens {
                let next: Vec<i64> = current
                    .iter()
                    .zip(g)
                    .map(|(a, b)| (a + b).rem_euclid(m))
                    .collect();
                if seen.insert(next.clone()) {
                    elements.push(next);
                }
            }
        }
        GroupElementTable {
            order,
            blocks: k,
            elements,
        }
    }
}

/// Elements `x T mod M` for `0 <= x_i < M / T(i,i)`, in lexicographic order of `x`.
pub fn group_elements(t: &IntMatrix, order: u64) -> Result<GroupElementTable> {
    let rows = t
        .to_i64_rows()
        .ok_or_else(|| Error::Internal("matrix entries exceed i64".into()))?;
    let k = rows.len();
    let m = order as i64;
    let mut ranges = Vec::with_capacity(k);
    for (i, row) in rows.iter().enumerate() {
        let d = row[i];
        if d <= 0 || m % d != 0 {
            return Err(Error::Internal(format!(
                "diagonal entry {d} does not divide M = {m}"
            )));
        }
        ranges.push(m / d);
    }
    let total: i64 = ranges.iter().product();
    if total != m {
        return Err(Error::Internal(format!(
            "quotient has {total} cosets, expected {m}"
        )));
    }
    let mut elements = Vec::with_capacity(m as usize);
    let mut x = vec![0i64; k];
    loop {
        let e: Vec<i64> = (0..k)
            .map(|j| {
                (0..=j)
                    .map(|i| x[i] as i128 * rows[i][j] as i128)
                    .sum::<i128>()
                    .rem_euclid(m as i128) as i64
            })
            .collect();
        elements.push(e);
        // odometer, last coordinate fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            x[pos] += 1;
            if x[pos] < ranges[pos] {
                break;
            }
            x[pos] = 0;
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX || k == 0 {
            break;
        }
    }
    let distinct: HashSet<&Vec<i64>> = elements.iter().collect();
    if distinct.len() != m as usize {
        return Err(Error::Internal(format!(
            "generated {} distinct elements, expected {m}",
            distinct.len()
        )));
    }
    Ok(GroupElementTable {
        order,
        blocks: k,
        elements,
    })
}

/// Invariant factors of the quotient, decreasing, with trailing 1s dropped.
pub fn invariant_factors(t: &IntMatrix, order: u64) -> Result<Vec<u64>> {
    let w = scaled_inverse(t, &BigInt::from(order))?;
    let s = snf(&w)?;
    Ok(s.invariant_factors
        .iter()
        .map(|d| d.to_u64().expect("factor divides M"))
        .filter(|&d| d > 1)
        .collect())
}

/// `⊕ Z_{d_i}` with one exponent-vector generator per nontrivial factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub order: u64,
    /// Decreasing, `d_{i+1} | d_i`, factors equal to 1 omitted.
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<Vec<u64>>,
}

impl GroupPresentation {
    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    /// `Z128`, `Z5+Z20` (ascending, as usually written).
    pub fn label(&self) -> String {
        if self.invariant_factors.is_empty() {
            return "Z1".into();
        }
        self.invariant_factors
            .iter()
            .rev()
            .map(|d| format!("Z{d}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Smallest `alpha * g mod M` over units `alpha`; generates the same cyclic subgroup.
fn unit_normalized(g: &[i64], m: i64) -> Vec<i64> {
    (1..m.max(2))
        .filter(|&a| gcd(a, m) == 1)
        .map(|a| {
            g.iter()
                .map(|&x| (a as i128 * x as i128).rem_euclid(m as i128) as i64)
                .collect::<Vec<i64>>()
        })
        .min()
        .unwrap_or_else(|| g.to_vec())
}

/// Invariant factors and generators from the Smith form `D = V W U` of
/// `W = M T^-1`: the rows of `U^-1 T` reduced mod `M`, row `i` of order `d_i`.
/// Each generator is replaced by its smallest unit multiple.
pub fn isomorphism_class(t: &IntMatrix, order: u64) -> Result<GroupPresentation> {
    let m = order as i64;
    let w = scaled_inverse(t, &BigInt::from(order))?;
    let s = snf(&w)?;
    let basis = &s.u.unimodular_inverse()? * t;
    let rows = basis
        .to_i64_rows()
        .ok_or_else(|| Error::Internal("generator entries exceed i64".into()))?;

    let mut invariant_factors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in s.invariant_factors.iter().enumerate() {
        let d = d
            .to_i64()
            .ok_or_else(|| Error::Internal("factor overflow".into()))?;
        if d == 1 {
            continue;
        }
        let g: Vec<i64> = rows[i].iter().map(|x| x.rem_euclid(m)).collect();
        let g = unit_normalized(&g, m);
        if element_order(&g, m) != d {
            return Err(Error::Internal(format!(
                "generator {g:?} does not have order {d}"
            )));
        }
        invariant_factors.push(d as u64);
        generators.push(g);
    }
    let product: u64 = invariant_factors.iter().product();
    if product != order {
        return Err(Error::Internal(format!(
            "invariant factors multiply to {product}, expected {order}"
        )));
    }

    let expected = group_elements(t, order)?.as_set();
    let regenerated = direct_sum_elements(&generators, &invariant_factors, m);
    if regenerated.len() != expected.len() || !regenerated.iter().all(|e| expected.contains(e)) {
        return Err(Error::Internal(
            "generators do not regenerate the group".into(),
        ));
    }
    Ok(GroupPresentation {
        order,
        invariant_factors,
        generators: generators
            .into_iter()
            .map(|g| g.into_iter().map(|x| x as u64).collect())
            .collect(),
    })
}

fn direct_sum_elements(gens: &[Vec<i64>], orders: &[u64], m: i64) -> HashSet<Vec<i64>> {
    let k = gens.first().map_or(0, Vec::len);
    let mut acc: HashSet<Vec<i64>> = HashSet::from([vec![0; k.max(1)][..k].to_vec()]);
    for (g, &d) in gens.iter().zip(orders) {
        let mut next = HashSet::with_capacity(acc.len() * d as usize);
        for e in &acc {
            let mut cur = e.clone();
            for _ in 0..d {
                next.insert(cur.clone());
                for (c, x) in cur.iter_mut().zip(g) {
                    *c = (*c + x).rem_euclid(m);
                }
            }
        }
        acc = next;
    }
    acc
}

/// Whether `a = alpha * π(b) mod M` for a unit `alpha` and a signed
/// coordinate permutation `π`.
pub fn adam_equivalent(a: &[i64], b: &[i64], order: u64) -> bool {
    let m = order as i64;
    let k = a.len();
    if b.len() != k {
        return false;
    }
    let a: Vec<i64> = a.iter().map(|x| x.rem_euclid(m)).collect();
    let images: HashSet<Vec<i64>> = arith::permutations(k)
        .into_iter()
        .flat_map(|sigma| {
            (0u32..1 << k).map(move |mask| {
                (0..k)
                    .map(|j| {
                        let x = b[sigma[j]];
                        if mask >> j & 1 == 1 {
                            (-x).rem_euclid(m)
                        } else {
                            x.rem_euclid(m)
                        }
                    })
                    .collect::<Vec<i64>>()
            })
        })
        .collect();
    (1..m.max(2)).filter(|&u| gcd(u, m) == 1).any(|u| {
        let scaled: Vec<i64> = a
            .iter()
            .map(|&x| (u as i128 * x as i128).rem_euclid(m as i128) as i64)
            .collect();
        images.contains(&scaled)
    })
}

/// Lattice generator matrix (Hermite form) for the group spanned by `gens`.
pub fn lattice_from_generators(gens: &[Vec<i64>], order: u64) -> IntMatrix {
    IntMatrix::from_rows(&subgroup_hermite(gens, order as i64))
}

/// Groups the raw candidates by signature; handy for checking dedup decisions.
pub fn signature_classes(raw: &[CandidateLattice]) -> HashMap<Signature, Vec<usize>> {
    let mut map: HashMap<Signature, Vec<usize>> = HashMap::new();
    for (i, c) in raw.iter().enumerate() {
        map.entry(c.signature.clone()).or_default().push(i);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn diagonals_for_128() {
        let p = enumerate_diagonals(128, 2);
        let d: Vec<Vec<u64>> = p.iter().map(|x| x.diagonal.clone()).collect();
        assert_eq!(d, vec![vec![1, 128], vec![2, 64], vec![4, 32], vec![8, 16]]);
    }

    #[test]
    fn diagonals_for_12_and_prime() {
        let d: Vec<Vec<u64>> = enumerate_diagonals(12, 2)
            .iter()
            .map(|x| x.diagonal.clone())
            .collect();
        assert_eq!(d, vec![vec![1, 12], vec![2, 6], vec![3, 4]]);
        let d: Vec<Vec<u64>> = enumerate_diagonals(7, 2)
            .iter()
            .map(|x| x.diagonal.clone())
            .collect();
        assert_eq!(d, vec![vec![1, 7]]);
    }

    #[test]
    fn boundary_profile_detection() {
        let p = enumerate_diagonals(64, 2);
        let boundary: Vec<Vec<u64>> = p
            .iter()
            .filter(|x| x.on_boundary())
            .map(|x| x.diagonal.clone())
            .collect();
        assert_eq!(boundary, vec![vec![8, 8]]);
        for prof in enumerate_diagonals(360, 3) {
            assert_eq!(prof.divisors.iter().product::<u64>(), 360);
            assert!(prof.tower_products().iter().all(|&v| v <= 360));
        }
    }

    #[test]
    fn profile_one_128_has_65_matrices() {
        let p = &enumerate_diagonals(128, 2)[0];
        let e = raw_candidates(p);
        assert_eq!(e.raw.len(), 65);
        assert_eq!(e.rejected, 0);
    }

    #[test]
    fn w_check_rejects_non_sublattice() {
        let p = enumerate_diagonals(12, 3)
            .into_iter()
            .find(|p| p.diagonal == vec![2, 6, 12])
            .unwrap();
        let e = raw_candidates(&p);
        assert!(e.rejected > 0);
        let bad = t(&[&[2, 3, 0], &[0, 6, 6], &[0, 0, 12]]);
        assert!(e.raw.iter().all(|c| c.t != bad));
    }

    #[test]
    fn hermite_of_cyclic_group() {
        assert_eq!(
            subgroup_hermite(&[vec![1, 3]], 10),
            vec![vec![1, 3], vec![0, 10]]
        );
        assert_eq!(
            subgroup_hermite(&[vec![3, 1]], 10),
            vec![vec![1, 7], vec![0, 10]]
        );
        assert_eq!(
            subgroup_hermite(&[vec![2, 0], vec![0, 10]], 20),
            vec![vec![2, 0], vec![0, 10]]
        );
    }

    #[test]
    fn signature_identifies_inverse_pairs() {
        let a = canonical_signature(&t(&[&[1, 3], &[0, 128]]), 128);
        let b = canonical_signature(&t(&[&[1, 43], &[0, 128]]), 128);
        assert_eq!(a, b);
        let c = canonical_signature(&t(&[&[1, 5], &[0, 128]]), 128);
        let d = canonical_signature(&t(&[&[1, 123], &[0, 128]]), 128);
        assert_eq!(c, d);
        assert_ne!(a, c);
    }

    #[test]
    fn signature_is_unit_invariant() {
        // 3 * (1, 5) = (3, 15) generates the same subgroup of Z_128^2
        let a = canonical_signature_rows(&[vec![1, 5], vec![0, 128]], 128);
        let b = canonical_signature_rows(&[vec![3, 15], vec![0, 128]], 128);
        assert_eq!(a, b);
        assert_eq!(
            subgroup_hermite(&[vec![3, 15]], 128),
            subgroup_hermite(&[vec![1, 5]], 128)
        );
    }

    #[test]
    fn group_elements_examples() {
        let g = group_elements(&t(&[&[1, 11], &[0, 128]]), 128).unwrap();
        let expected: Vec<Vec<i64>> = (0..128).map(|i| vec![i, 11 * i % 128]).collect();
        assert_eq!(g.elements, expected);

        let g = group_elements(&t(&[&[1]]), 5).unwrap();
        assert_eq!(
            g.elements,
            vec![vec![0], vec![1], vec![2], vec![3], vec![4]]
        );

        let g = group_elements(&t(&[&[2, 0], &[0, 10]]), 20).unwrap();
        assert_eq!(g.len(), 20);
        let brute = GroupElementTable::closure(&[vec![2, 0], vec![0, 10]], 20);
        assert_eq!(g.as_set(), brute.as_set());
    }

    #[test]
    fn isomorphism_class_cyclic() {
        let p = isomorphism_class(&t(&[&[1, 11], &[0, 128]]), 128).unwrap();
        assert_eq!(p.invariant_factors, vec![128]);
        assert!(adam_equivalent(
            &p.generators[0]
                .iter()
                .map(|&x| x as i64)
                .collect::<Vec<_>>(),
            &[1, 11],
            128
        ));
        assert_eq!(p.label(), "Z128");

        let p = isomorphism_class(&t(&[&[1]]), 7).unwrap();
        assert_eq!(p.invariant_factors, vec![7]);
        assert_eq!(p.generators, vec![vec![1]]);
    }

    #[test]
    fn isomorphism_class_non_cyclic() {
        let p = isomorphism_class(&t(&[&[2, 0], &[0, 10]]), 20).unwrap();
        assert_eq!(p.invariant_factors, vec![10, 2]);
        assert_eq!(p.label(), "Z2+Z10");
    }

    #[test]
    fn adam_partner_matches_listed_discards() {
        let discarded: Vec<i64> = (0..=64)
            .filter(|&w| adam_partner(&[vec![1, w], vec![0, 128]]).is_some())
            .collect();
        assert_eq!(
            discarded,
            vec![17, 27, 33, 35, 39, 41, 43, 45, 49, 51, 53, 55, 57, 59, 61]
        );
        let discarded: Vec<i64> = (0..=32)
            .step_by(2)
            .filter(|&w| adam_partner(&[vec![2, w], vec![0, 64]]).is_some())
            .collect();
        assert_eq!(discarded, vec![18, 26]);
    }

    #[test]
    fn adam_equivalence_examples() {
        assert!(adam_equivalent(&[1, 11], &[1, 11], 128));
        assert!(adam_equivalent(&[11, 1], &[1, 35], 128));
        assert!(adam_equivalent(&[1, 117], &[1, 11], 128));
        assert!(!adam_equivalent(&[1, 3], &[1, 5], 128));
    }

    #[test]
    fn lattice_from_generators_roundtrip() {
        let t = lattice_from_generators(&[vec![0, 20], vec![5, 10]], 100);
        let p = isomorphism_class(&t, 100).unwrap();
        assert_eq!(p.invariant_factors, vec![20, 5]);
    }
}
