mod common;

use groupcode::code::{brute_force_min_distance, rotation_elements};
use groupcode::ivp::optimal_initial_vector;
use groupcode::lattice::{DedupRule, EnumerationOptions, GroupElementTable};
use groupcode::search::*;
use groupcode::Error;

fn search(m: u64, n: usize, threads: usize, dedup: DedupRule) -> SearchOutcome {
    let opts = SearchOptions {
        threads: Some(threads),
        keep_all: true,
        enumeration: EnumerationOptions {
            dedup,
            ..Default::default()
        },
    };
    search_with_candidates(&SearchParams::new(m, n).with_options(opts)).unwrap()
}

#[test]
fn same_answer_for_any_thread_count() {
    for (m, n) in [(48, 4), (36, 6), (100, 4)] {
        let one = search(m, n, 1, DedupRule::Adam);
        for t in [2, 4] {
            let other = search(m, n, t, DedupRule::Adam);
            assert_eq!(one.record, other.record, "M={m} n={n} threads={t}");
            assert_eq!(one.evaluations.len(), other.evaluations.len());
        }
    }
}

#[test]
fn dedup_does_not_change_the_optimum() {
    for m in (4..=64).step_by(2) {
        let full = search(m, 4, 4, DedupRule::None).record;
        for rule in [DedupRule::Adam, DedupRule::Isometry] {
            let r = search(m, 4, 4, rule).record;
            assert!(
                (r.min_distance - full.min_distance).abs() < 1e-9,
                "M={m} {rule:?}"
            );
            assert!(r.tested_count <= full.tested_count);
        }
    }
}

#[test]
fn exhaustive_over_all_subgroups() {
    for m in 2..=16u64 {
        let mut best = 0.0f64;
        for elements in common::all_order_m_subgroups(m as i64) {
            let table = GroupElementTable {
                order: m,
                blocks: 2,
                elements,
            };
            let d = optimal_initial_vector(&table, m).unwrap().min_distance;
            best = best.max(d);
        }
        let found = search_optimum(&SearchParams::new(m, 4)).unwrap();
        assert!(
            (found.min_distance - best).abs() < 1e-9,
            "M={m}: {} vs {best}",
            found.min_distance
        );
    }
}

#[test]
fn record_is_consistent() {
    let r = search_optimum(&SearchParams::new(60, 6)).unwrap();
    let t = groupcode::group_elements(&groupcode::IntMatrix::from_rows(&r.lattice), 60).unwrap();
    let brute =
        brute_force_min_distance(&rotation_elements(&t), 60, 6, &r.initial_vector.ambient())
            .unwrap();
    assert!((brute - r.min_distance).abs() < 1e-9);
    assert_eq!(r.presentation.invariant_factors.iter().product::<u64>(), 60);
    assert!(r.tested_count <= r.raw_count);
}

#[test]
fn odd_dimension_matches_closed_form() {
    for (m, n) in [(20u64, 5usize), (12, 3), (16, 5), (24, 7)] {
        let code = search_optimum_odd(&SearchParams::new(m, n)).unwrap();
        let d0 = code.base.min_distance;
        assert_eq!(code.base.order, m / 2);
        assert!((code.theta - equalizing_angle_bisection(d0)).abs() < 1e-9);
        assert!((code.min_distance - 2.0 * d0 / (4.0 + d0 * d0).sqrt()).abs() < 1e-12);
        assert!((layered_distance(d0, code.theta) - code.min_distance).abs() < 1e-12);
        let orbit = code.orbit_min_distance.expect("small orbit is checked");
        assert!((orbit - code.min_distance).abs() < 1e-9);
        assert_eq!(code.elements().unwrap().len() as u64, m);
        assert_eq!(code.invariant_factors.iter().product::<u64>(), m);
        let norm: f64 = code.initial_vector.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn parameter_errors() {
    assert!(matches!(
        search_optimum_odd(&SearchParams::new(9, 5)),
        Err(Error::OddOrder(9))
    ));
    assert!(search_optimum(&SearchParams::new(10, 5)).is_err());
    assert!(search_optimum(&SearchParams::new(1, 4)).is_err());
    assert!(search_optimum(&SearchParams::new(10, 1)).is_err());
}

#[test]
fn estimates_for_small_case() {
    let e = count_estimates(64, 4, &EnumerationOptions::default()).unwrap();
    assert_eq!((e.binomial, e.adam_estimate), (Some(496), Some(32)));
    assert_eq!(
        (e.tested_cyclic, e.tested_commutative, e.raw_count),
        (26, 38, 45)
    );
}
