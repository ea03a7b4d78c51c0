mod common;

use groupcode::intmat::{is_unimodular, scaled_inverse, snf, special_hnf, IntMatrix};
use groupcode::lattice::GroupElementTable;
use groupcode::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn nonsingular(k: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-50i64..=50, k * k)
        .prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(k).map(<[i64]>::to_vec).collect();
            IntMatrix::from_rows(&rows)
        })
        .prop_filter("singular", |m| !m.determinant().unwrap().is_zero())
}

fn any_nonsingular() -> impl Strategy<Value = IntMatrix> {
    (2usize..=4).prop_flat_map(nonsingular)
}

fn column_gcd(m: &IntMatrix, c: usize, from: usize) -> BigInt {
    (from..m.rows()).fold(BigInt::zero(), |g, r| g.gcd(m.get(r, c)))
}

fn assert_special_form(t: &IntMatrix) {
    if let Some(v) = common::special_form_violation(t) {
        panic!("{v}: {t:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hnf_invariants(b in any_nonsingular()) {
        let h = special_hnf(&b).unwrap();
        prop_assert_eq!(&(&(&h.u * &b) * &h.v), &h.t);
        prop_assert!(is_unimodular(&h.u));
        prop_assert!(h.v.is_permutation());
        assert_special_form(&h.t);
        // rows of T span the same lattice as the rows of B V
        prop_assert!(common::same_row_lattice(&h.t, &(&b * &h.v)));
        // first column of B V has the smallest column gcd
        let bv = &b * &h.v;
        let g0 = column_gcd(&bv, 0, 0);
        for c in 1..bv.cols() {
            prop_assert!(g0 <= column_gcd(&bv, c, 0));
        }
    }

    #[test]
    fn hnf_idempotent(b in any_nonsingular()) {
        let t = special_hnf(&b).unwrap().t;
        let again = special_hnf(&t).unwrap();
        prop_assert_eq!(&again.t, &t);
        prop_assert_eq!(again.u, IntMatrix::identity(t.rows()));
        prop_assert_eq!(again.v, IntMatrix::identity(t.rows()));
    }

    #[test]
    fn snf_invariants(a in any_nonsingular()) {
        let s = snf(&a).unwrap();
        prop_assert_eq!(&(&(&s.v * &a) * &s.u), &s.d);
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        let k = a.rows();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
            prop_assert_eq!(s.d.get(i, i), &s.invariant_factors[i]);
            prop_assert!(!s.invariant_factors[i].is_negative());
        }
        for w in s.invariant_factors.windows(2) {
            prop_assert!((&w[0] % &w[1]).is_zero(), "{} does not divide {}", w[1], w[0]);
        }
        let prod: BigInt = s.invariant_factors.iter().product();
        prop_assert_eq!(prod, a.determinant().unwrap().abs());
    }

    /// The W check agrees with a direct membership test of every `M e_i`.
    #[test]
    fn scaled_inverse_iff_contains_multiples(
        m in 2i64..=24,
        k in 2usize..=3,
        seed in prop::collection::vec(0i64..24, 8),
    ) {
        let divisors: Vec<i64> = (1..=m).filter(|d| m % d == 0).collect();
        let mut rows = vec![vec![0i64; k]; k];
        for i in 0..k {
            rows[i][i] = divisors[seed[i] as usize % divisors.len()];
            for j in i + 1..k {
                rows[i][j] = seed[3 + i + j] % m;
            }
        }
        let t = IntMatrix::from_rows(&rows);
        let closure = GroupElementTable::closure(&rows, m as u64).as_set();
        // M e_i are zero mod M; check instead that the lattice spanned by T
        // contains M e_i, i.e. x T = M e_i has an integral solution.
        let contains = (0..k).all(|i| {
            let mut target = vec![0i64; k];
            target[i] = m;
            solve_upper(&rows, &target).is_some()
        });
        let w = scaled_inverse(&t, &BigInt::from(m));
        prop_assert_eq!(w.is_ok(), contains);
        if let Ok(w) = w {
            prop_assert_eq!(&w * &t, IntMatrix::identity(k).scaled(&BigInt::from(m)));
            // then the quotient has exactly det(W) = M^k / det(T) elements
            let det_t: i64 = (0..k).map(|i| rows[i][i]).product();
            prop_assert_eq!(closure.len() as i64, m.pow(k as u32) / det_t);
        } else {
            prop_assert_eq!(w.unwrap_err(), Error::NotSublattice);
        }
    }
}

/// Integral `x` with `x T = b` for upper-triangular `T`, by forward substitution.
fn solve_upper(t: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let k = t.len();
    let mut x = vec![0i64; k];
    for j in 0..k {
        let partial: i64 = (0..j).map(|i| x[i] * t[i][j]).sum();
        let r = b[j] - partial;
        if r % t[j][j] != 0 {
            return None;
        }
        x[j] = r / t[j][j];
    }
    Some(x)
}

#[test]
fn hnf_small_example_against_exhaustive_oracle() {
    let b = IntMatrix::from_rows(&[[2, 5], [3, 4]]);
    let h = special_hnf(&b).unwrap();
    // oracle: the unique reduced upper-triangular basis of the same lattice,
    // found by scanning every candidate with diagonal dividing |det B| = 7
    let mut oracle = Vec::new();
    for d1 in [1i64, 7] {
        let d2 = 7 / d1;
        for w in 0..d2 {
            let c = IntMatrix::from_rows(&[[d1, w], [0, d2]]);
            if common::same_row_lattice(&c, &(&b * &h.v)) {
                oracle.push(c);
            }
        }
    }
    assert_eq!(oracle, vec![h.t.clone()]);
    assert_eq!(h.t, IntMatrix::from_rows(&[[1, 6], [0, 7]]));
    assert_eq!(&(&h.u * &b) * &h.v, h.t);
}

#[test]
fn snf_examples() {
    let s = snf(&IntMatrix::identity(2)).unwrap();
    assert_eq!(s.invariant_factors, vec![BigInt::one(), BigInt::one()]);
    let s = snf(&IntMatrix::from_rows(&[[128, -11], [0, 1]])).unwrap();
    assert_eq!(s.invariant_factors, vec![BigInt::from(128), BigInt::one()]);
    let s = snf(&IntMatrix::diagonal(&[2, 6])).unwrap();
    assert_eq!(s.invariant_factors, vec![BigInt::from(6), BigInt::from(2)]);
    assert_eq!(
        snf(&IntMatrix::from_rows(&[[1, 2], [2, 4]])).unwrap_err(),
        Error::SingularMatrix
    );
}
