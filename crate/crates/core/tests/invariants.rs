use isoptope::extremality::{foc_residuals, hinge_derivative, HingeSpec};
use isoptope::fixtures::{cube, random_simplicial};
use isoptope::hull::polytope_from_halfspaces;
use isoptope::isotropy::{isotropic_constant, isotropic_position, isotropy_residuals};
use isoptope::linalg::{self, det, solve, Matrix};
use isoptope::polytope::{halfspace_moments, moments, to_halfspaces, validate};
use isoptope::symmetry::reflection_defect;
use isoptope::PolytopeV;
use proptest::prelude::*;

fn matrix(d: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0f64..2.0, d * d).prop_map(move |xs| {
        let rows: Vec<Vec<f64>> = xs.chunks(d).map(<[f64]>::to_vec).collect();
        Matrix::from_rows(&rows)
    })
}

/// Well-conditioned affine maps: identity plus a bounded perturbation.
fn affine(d: usize) -> impl Strategy<Value = (Matrix, Vec<f64>)> {
    (
        prop::collection::vec(-0.4f64..0.4, d * d),
        prop::collection::vec(-3.0f64..3.0, d),
    )
        .prop_map(move |(xs, s)| {
            let mut m = Matrix::identity(d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += xs[i * d + j];
                }
            }
            (m, s)
        })
}

fn body() -> impl Strategy<Value = PolytopeV> {
    (2usize..=4, 0u64..1000).prop_map(|(d, seed)| random_simplicial(d, d + 3, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn determinant_is_multiplicative((a, b) in (1usize..=5).prop_flat_map(|d| (matrix(d), matrix(d)))) {
        let lhs = det(&a.matmul(&b));
        let rhs = det(&a) * det(&b);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn solve_inverts_diagonally_dominant_systems(
        (a, b) in (1usize..=6).prop_flat_map(|d| (matrix(d), prop::collection::vec(-5.0f64..5.0, d)))
    ) {
        let d = b.len();
        let a = a.add(&Matrix::identity(d).scaled(2.0 * d as f64 + 1.0));
        let x = solve(&a, &b).unwrap();
        prop_assert!(linalg::norm_inf(&linalg::sub(&a.mul_vec(&x), &b)) < 1e-12);
    }

    #[test]
    fn moments_transform_affinely(
        (p, (t, s)) in body().prop_flat_map(|p| { let d = p.dim; (Just(p), affine(d)) })
    ) {
        let m = moments(&p).unwrap();
        let image = p.map_affine(&t, &s);
        let mi = moments(&image).unwrap();
        let jac = det(&t).abs();
        prop_assert!((mi.volume - jac * m.volume).abs() < 1e-10 * mi.volume);
        let c = linalg::add(&t.mul_vec(&m.centroid), &s);
        prop_assert!(linalg::norm_inf(&linalg::sub(&mi.centroid, &c)) < 1e-10);
        let cov = t.matmul(&m.covariance).matmul(&t.transpose());
        prop_assert!(mi.covariance.sub(&cov).max_abs() < 1e-10);
        let (l0, l1) = (isotropic_constant(&p).unwrap(), isotropic_constant(&image).unwrap());
        prop_assert!((l0 - l1).abs() < 1e-10 * l0);
    }

    #[test]
    fn isotropic_position_is_isotropic_and_idempotent(p in body()) {
        let iso = isotropic_position(&p).unwrap();
        let m = moments(&iso.body).unwrap();
        let (c, a) = isotropy_residuals(&m);
        prop_assert!(c < 1e-8 && a < 1e-7);
        let again = isotropic_position(&iso.body).unwrap();
        for (u, v) in iso.body.vertices.iter().zip(&again.body.vertices) {
            prop_assert!(linalg::dist(u, v) < 1e-8);
        }
    }

    #[test]
    fn json_round_trip_is_exact(p in body()) {
        let back = PolytopeV::from_json(&p.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn halfspace_round_trip_preserves_the_body(p in body()) {
        let h = to_halfspaces(&p).unwrap();
        let q = polytope_from_halfspaces(&h).unwrap();
        prop_assert!(validate(&q).is_valid());
        prop_assert_eq!(q.vertices.len(), p.vertices.len());
        for v in &p.vertices {
            prop_assert!(q.vertices.iter().any(|w| linalg::dist(v, w) < 1e-8));
        }
        let (a, b) = (moments(&p).unwrap(), moments(&q).unwrap());
        prop_assert!((a.volume - b.volume).abs() < 1e-10 * a.volume);
        let c = halfspace_moments(&h).unwrap();
        prop_assert!((a.volume - c.volume).abs() < 1e-10 * a.volume);
        prop_assert!(a.covariance.sub(&c.covariance).max_abs() < 1e-10);
    }

    #[test]
    fn reflection_defect_ignores_vertex_order(p in body(), shift in 0usize..7) {
        let n = linalg::normalized(&p.facet_orientation_vector(0));
        let mut rotated = p.vertices.clone();
        let k = shift % rotated.len();
        rotated.rotate_left(k);
        let (a, b) = (reflection_defect(&p.vertices, &n), reflection_defect(&rotated, &n));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn foc_residuals_and_hinge_slopes_vanish_together(p in body()) {
        let iso = isotropic_position(&p).unwrap().body;
        let d = iso.dim;
        let res = foc_residuals(&iso).unwrap();
        for r in &res {
            for (k, &v) in r.per_vertex.iter().enumerate() {
                // the hinge slope is a positive multiple of the residual
                let slope = hinge_derivative(&iso, &HingeSpec::new(r.facet_index, k, 0.0)).unwrap().dl2d_dt;
                prop_assert!(slope == 0.0 || v == 0.0 || (slope > 0.0) == (v > 0.0), "d {} slope {} residual {}", d, slope, v);
            }
        }
    }
}

#[test]
fn cube_volume_and_covariance() {
    for d in 1..=6 {
        let m = moments(&cube(d)).unwrap();
        assert!((m.volume - 2f64.powi(d as i32)).abs() < 1e-10);
        assert!(m.covariance.sub(&Matrix::identity(d).scaled(1.0 / 3.0)).max_abs() < 1e-12);
    }
}
