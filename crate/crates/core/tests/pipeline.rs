use isoptope::extremality::foc_residuals;
use isoptope::fixtures::{cube, random_mirror_symmetric, random_simplicial};
use isoptope::isotropy::{isotropic_constant, isotropic_position, regular_simplex_isotropic};
use isoptope::optimize::{ascend, report_extremality, AscentConfig, AscentMode, Termination};
use isoptope::polytope::{moments, validate};
use isoptope::sample::RngSeed;
use isoptope::symmetry::{shake, volume_drift};
use isoptope::{Error, PolytopeV};

#[test]
fn json_without_facets_is_hulled_and_analysed() {
    let text = r#"{"dim":3,"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[0.2,0.2,0.2]]}"#;
    let p = PolytopeV::from_json(text).unwrap();
    assert_eq!(p.vertices.len(), 4);
    assert!(validate(&p).is_valid());
    let l = isotropic_constant(&p).unwrap();
    let simplex = isotropic_constant(&regular_simplex_isotropic(3)).unwrap();
    assert!((l - simplex).abs() < 1e-12);
    let iso = isotropic_position(&p).unwrap().body;
    let worst = foc_residuals(&iso)
        .unwrap()
        .iter()
        .flat_map(|r| r.relative.clone())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(worst < 1e-9);
}

#[test]
fn malformed_input_is_reported_not_panicked() {
    assert!(matches!(PolytopeV::from_json("{"), Err(Error::InvalidInput(_))));
    let flat = r#"{"dim":2,"vertices":[[0,0],[1,1],[2,2]]}"#;
    assert!(PolytopeV::from_json(flat).is_err());
    let open = r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"facets":[[0,1],[1,2]]}"#;
    let p = PolytopeV::from_json(open).unwrap();
    assert!(matches!(moments(&p), Err(Error::InvalidPolytope(_))));
}

#[test]
fn shaking_symmetric_bodies_never_lowers_the_constant() {
    for seed in 0..6 {
        let p = random_mirror_symmetric(3, 5, seed).unwrap();
        let s = shake(&p, &[0.0, 0.0, 1.0]).unwrap();
        assert!(volume_drift(&p, &s.body).unwrap() < 1e-8);
        assert!(s.l_after >= s.l_before - 1e-10, "{} -> {}", s.l_before, s.l_after);
    }
    let c = shake(&cube(3), &[0.0, 0.0, 1.0]).unwrap();
    assert!((c.l_after - c.l_before).abs() < 1e-8);
}

#[test]
fn hinge_ascent_from_a_random_body_reports_a_candidate() {
    let p = random_simplicial(2, 5, 3).unwrap();
    let cfg = AscentConfig {
        max_iters: 300,
        seed: RngSeed::new(5),
        mode: AscentMode::HingeAscent,
        ..AscentConfig::default()
    };
    let trace = ascend(&p, &cfg).unwrap();
    assert!(trace.final_l() >= isotropic_constant(&p).unwrap() - 1e-12);
    assert!(matches!(
        trace.termination,
        Termination::FocConverged | Termination::MaxIters | Termination::StepUnderflow | Termination::NoCandidates
    ));
    let report = report_extremality(&trace.final_body).unwrap();
    assert_eq!(report.dim, 2);
    assert!(report.l > 0.0);
}
