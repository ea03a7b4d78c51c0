use groupcode::code::min_distance;
use groupcode::ivp::*;
use groupcode::lattice::{enumerate_lattices, group_elements, EnumerationOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lp_beats_grid_and_folding_is_harmless() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 30 {
        let m = rng.gen_range(5..=200u64);
        let set = enumerate_lattices(m, 2, &EnumerationOptions::default());
        let c = &set.candidates[rng.gen_range(0..set.candidates.len())];
        let table = group_elements(&c.t, m).unwrap();
        let p = build_lp(&table, m).unwrap();
        let s = solve(&p).unwrap();
        let grid = (0..=100)
            .map(|i| {
                let y = i as f64 / 100.0;
                p.objective_at(&[y, 1.0 - y])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(s.z >= grid - 1e-6, "M={m}: lp {} grid {grid}", s.z);
        assert!(s.z <= grid + 0.02);

        let unfolded = solve(&build_lp_unfolded(&table, m).unwrap()).unwrap();
        assert!((unfolded.z - s.z).abs() < 1e-12);

        assert!((s.y.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(s.y.iter().all(|&v| v >= -1e-12));
        for row in &p.rows {
            let val = 2.0 - 2.0 * row.iter().zip(&s.y).map(|(a, b)| a * b).sum::<f64>();
            assert!(val >= s.z - 1e-9);
        }
        let r = optimal_initial_vector(&table, m).unwrap();
        assert!((r.min_distance - s.z.sqrt()).abs() < 1e-9);
        assert!((min_distance(&table, m, &r.vector) - r.min_distance).abs() < 1e-9);
        checked += 1;
    }
}

#[test]
fn deterministic() {
    let t = group_elements(&groupcode::IntMatrix::from_rows(&[[1, 11], [0, 128]]), 128).unwrap();
    let p = build_lp(&t, 128).unwrap();
    assert_eq!(solve(&p).unwrap(), solve(&p).unwrap());
}

#[test]
fn degenerate_optimum_is_flagged() {
    // (1, 0): the second block never moves, so all weight goes to the first
    let t = group_elements(&groupcode::IntMatrix::from_rows(&[[1, 0], [0, 8]]), 8).unwrap();
    let s = solve(&build_lp(&t, 8).unwrap()).unwrap();
    assert_eq!(s.status, LpStatus::DegenerateFlagged);
    assert!((s.y[0] - 1.0).abs() < 1e-9);
}

#[test]
fn iteration_cap_formula() {
    let p = SimplexProblem::from_rows(vec![vec![0.5, -0.5], vec![-1.0, 1.0]]).unwrap();
    assert_eq!(p.iteration_cap(), 50 * 4);
    assert!(SimplexProblem::from_rows(vec![]).is_err());
    assert!(SimplexProblem::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
}
