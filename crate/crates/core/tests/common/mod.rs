#![allow(dead_code)]

use std::collections::BTreeSet;

use groupcode::arith::permutations;
use groupcode::lattice::GroupElementTable;
use groupcode::IntMatrix;
use num_traits::Zero;
use rand::Rng;

/// Every subgroup of order `m` in `Z_m^2`, as sorted element lists, found by
/// closing all pairs of elements.
pub fn all_order_m_subgroups(m: i64) -> Vec<Vec<Vec<i64>>> {
    let elems: Vec<Vec<i64>> = (0..m)
        .flat_map(|a| (0..m).map(move |b| vec![a, b]))
        .collect();
    let mut found: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    for (i, g) in elems.iter().enumerate() {
        for h in &elems[i..] {
            let t = GroupElementTable::closure(&[g.clone(), h.clone()], m as u64);
            if t.len() as i64 == m {
                let mut e = t.elements.clone();
                e.sort();
                found.insert(e);
            }
        }
    }
    found.into_iter().collect()
}

/// Applies `v[j] <- signs[j] * v[perm[j]] mod m` to each row.
pub fn signed_permute(rows: &[Vec<i64>], perm: &[usize], negate: u32, m: i64) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|r| {
            (0..perm.len())
                .map(|j| {
                    let x = r[perm[j]];
                    if negate >> j & 1 == 1 {
                        (-x).rem_euclid(m)
                    } else {
                        x.rem_euclid(m)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn random_signed_permutation(k: usize, rng: &mut impl Rng) -> (Vec<usize>, u32) {
    let perms = permutations(k);
    let p = perms[rng.gen_range(0..perms.len())].clone();
    (p, rng.gen_range(0..(1u32 << k)))
}

/// `a` and `b` span the same integer row lattice.
pub fn same_row_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    let integral = |x: &IntMatrix, y: &IntMatrix| {
        // x * y^-1 integral  <=>  x * adj(y) divisible by det(y)
        let det = y.determinant().unwrap();
        let p = x.checked_mul(&y.adjugate().unwrap()).unwrap();
        (0..p.rows()).all(|i| (0..p.cols()).all(|j| (p.get(i, j) % &det).is_zero()))
    };
    integral(a, b) && integral(b, a)
}

/// Entry-by-entry check of the special Hermite form; returns the first
/// violated condition.
pub fn special_form_violation(t: &IntMatrix) -> Option<String> {
    use num_integer::Integer;
    use num_traits::Signed;
    let k = t.rows();
    if !t.is_upper_triangular() {
        return Some("not upper triangular".into());
    }
    for i in 0..k {
        if !t.get(i, i).is_positive() {
            return Some(format!("T[{i}][{i}] not positive"));
        }
        if i + 1 < k && t.get(i, i) > t.get(i + 1, i + 1) {
            return Some(format!("diagonal decreases at {i}"));
        }
        for j in i + 1..k {
            if t.get(i, j).is_negative() || t.get(i, j) >= t.get(j, j) {
                return Some(format!("T[{i}][{j}] not reduced"));
            }
            let g = (i..=j).fold(num_bigint::BigInt::zero(), |g, r| g.gcd(t.get(r, j)));
            if t.get(i, i) > &g {
                return Some(format!("T[{i}][{i}] exceeds gcd of column {j}"));
            }
        }
    }
    None
}
