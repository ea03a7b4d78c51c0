mod common;

use groupcode::code::*;
use groupcode::ivp::optimal_initial_vector;
use groupcode::lattice::{
    enumerate_lattices, group_elements, DedupRule, DiagonalBound, EnumerationOptions,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

proptest! {
    #[test]
    fn render_is_a_homomorphism(
        m in 2u64..200,
        a in prop::collection::vec(0i64..200, 3),
        b in prop::collection::vec(0i64..200, 3),
        sa in prop::bool::ANY,
        sb in prop::bool::ANY,
    ) {
        let sign = |s: bool| if s { -1i8 } else { 1 };
        let e = GroupElementSigns { exponents: a.clone(), signs: vec![sign(sa)] };
        let f = GroupElementSigns { exponents: b.clone(), signs: vec![sign(sb)] };
        let sum = GroupElementSigns {
            exponents: a.iter().zip(&b).map(|(x, y)| (x + y) % m as i64).collect(),
            signs: vec![sign(sa) * sign(sb)],
        };
        let prod = render_element(&e, m, 7).unwrap() * render_element(&f, m, 7).unwrap();
        prop_assert!((prod - render_element(&sum, m, 7).unwrap()).norm() < 1e-10);
        let g = render_element(&e, m, 7).unwrap();
        prop_assert!((&g * g.transpose() - DMatrix::identity(7, 7)).norm() < 1e-12);
    }

    #[test]
    fn torus_map_stays_on_sphere(
        raw in prop::collection::vec(0.01f64..1.0, 1..5),
        phases in prop::collection::vec(-10.0f64..10.0, 5),
    ) {
        let x = InitialVector::normalized(raw).unwrap();
        let p = torus_map(&x, &phases[..x.blocks()]).unwrap();
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_in_unit_interval(m in 2u64..500, b in prop::collection::vec(0i64..500, 1..4)) {
        let e = GroupElementSigns::rotation(b);
        if let Ok(c) = constraint_coefficients(&e, m) {
            prop_assert!(c.iter().all(|x| (-1.0..=1.0).contains(x)));
        } else {
            prop_assert!(e.is_identity(m));
        }
    }
}

/// Geometric uniformity: the distance to the identity's image equals the
/// smallest pairwise distance of the rendered orbit.
#[test]
fn formula_matches_orbit_on_small_cases() {
    for (m, k) in [(6u64, 1usize), (12, 2), (20, 2), (9, 3), (16, 3)] {
        let opts = EnumerationOptions {
            bound: DiagonalBound::Inclusive,
            dedup: DedupRule::None,
        };
        for c in enumerate_lattices(m, k, &opts).candidates {
            let t = group_elements(&c.t, m).unwrap();
            let x = optimal_initial_vector(&t, m).unwrap().vector;
            let brute =
                brute_force_min_distance(&rotation_elements(&t), m, 2 * k, &x.ambient()).unwrap();
            assert!((brute - min_distance(&t, m, &x)).abs() < 1e-9);
        }
    }
}

#[test]
fn torus_path_matches_render_path() {
    let t = group_elements(&groupcode::IntMatrix::from_rows(&[[1, 3], [0, 10]]), 10).unwrap();
    let x = InitialVector::normalized(vec![0.3, 0.8]).unwrap();
    for b in t.iter() {
        let via_torus = torus_map(&x, &lattice_phases(&x, b, 10)).unwrap();
        let via_render =
            render_element(&GroupElementSigns::rotation(b.to_vec()), 10, 4).unwrap() * x.ambient();
        assert!((via_torus - via_render).norm() < 1e-12);
    }
}

#[test]
fn signed_distance_matches_orbit() {
    // Z_6 rotations times a reflection on the last axis
    let mut elements = Vec::new();
    for s in [1i8, -1] {
        for b in 0..6 {
            elements.push(GroupElementSigns {
                exponents: vec![b],
                signs: vec![s],
            });
        }
    }
    let x = InitialVector::with_reflection(vec![0.8], vec![0.6]).unwrap();
    let d = min_distance_signed(&elements, 6, &x).unwrap();
    let brute = brute_force_min_distance(&elements, 6, 3, &x.ambient()).unwrap();
    assert!((d - brute).abs() < 1e-12);
    assert!((d - 0.8f64.min(1.2)).abs() < 1e-12);
}
