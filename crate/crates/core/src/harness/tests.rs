use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{Point, Vec2};
use crate::law::p_laplacian;
use crate::mesh::{generate, MeshFamily, PolytopalMesh};
use crate::polybasis::SmoothField;
use crate::solver::{interpolate_global, Discretization, NewtonConfig};

fn sample_points() -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    (0..50).map(|_| Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))).collect()
}

#[test]
fn linear_case_sources() {
    let trig = make_case(CaseKind::Trigonometric, 2.0).unwrap();
    let exp = make_case(CaseKind::Exponential, 2.0).unwrap();
    for x in sample_points() {
        let s = (PI * x.x).sin() * (PI * x.y).sin();
        assert!((trig.source_at(&x) - 2.0 * PI * PI * s).abs() <= 1e-12 * (1.0 + s.abs()));
        let e = (x.x + PI * x.y).exp();
        assert!((exp.source_at(&x) + (1.0 + PI * PI) * e).abs() <= 1e-12 * e);
    }
    assert_eq!(trig.regularized_evaluations(), 0);
}

#[test]
fn exponential_source_closed_form() {
    let p = 1.75;
    let case = make_case(CaseKind::Exponential, p).unwrap();
    let c = (1.0 + PI * PI).powf(0.5 * p);
    for x in sample_points().into_iter().chain([Point::origin()]) {
        let u = (x.x + PI * x.y).exp();
        let expected = -(p - 1.0) * c * u.powf(p - 1.0);
        assert!((case.source_at(&x) - expected).abs() <= 1e-12 * expected.abs());
    }
}

#[test]
fn source_matches_divergence_of_the_flux() {
    for (kind, p) in [(CaseKind::Trigonometric, 3.0), (CaseKind::Exponential, 1.75), (CaseKind::Trigonometric, 1.75)] {
        let case = make_case(kind, p).unwrap();
        let law = p_laplacian(p).unwrap();
        let flux = |x: &Point| law.eval(&case.exact.gradient(x));
        let h = 1e-5;
        for x in [Point::new(0.2, 0.3), Point::new(0.7, 0.45), Point::new(0.1, 0.9)] {
            let dx = Vec2::new(h, 0.0);
            let dy = Vec2::new(0.0, h);
            let div = (flux(&(x + dx)).x - flux(&(x - dx)).x + flux(&(x + dy)).y - flux(&(x - dy)).y) / (2.0 * h);
            let f = case.source_at(&x);
            assert!((f + div).abs() <= 1e-6 * (1.0 + f.abs()), "{kind} p = {p}: {f} vs {}", -div);
        }
    }
}

#[test]
fn critical_points_are_regularized_and_counted() {
    let case = make_case(CaseKind::Trigonometric, 1.75).unwrap();
    let f = case.source_at(&Point::new(0.5, 0.5));
    assert!(f.is_finite());
    assert_eq!(case.regularized_evaluations(), 1);
    assert!(case.source_at(&Point::new(0.3, 0.6)).is_finite());
    assert_eq!(case.regularized_evaluations(), 1);
}

#[test]
fn trigonometric_case_has_zero_boundary_data() {
    assert!(make_case(CaseKind::Trigonometric, 3.0).unwrap().dirichlet().is_none());
    assert!(make_case(CaseKind::Exponential, 3.0).unwrap().dirichlet().is_some());
    assert!(make_case(CaseKind::Exponential, 1.0).is_err());
    assert_eq!("exp".parse::<CaseKind>().unwrap(), CaseKind::Exponential);
    assert!("cosine".parse::<CaseKind>().is_err());
}

#[test]
fn interpolant_of_a_local_polynomial_has_no_error() {
    let mesh = PolytopalMesh::from_polygons(
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.1), Point::new(1.2, 0.9), Point::new(0.4, 1.3), Point::new(-0.2, 0.6)],
        vec![vec![0, 1, 2, 3, 4]],
    )
    .unwrap();
    let cubic = |x: &Point, a: [usize; 2]| match a {
        [0, 0] => x.x.powi(3) - 2.0 * x.x * x.y * x.y + x.y,
        [1, 0] => 3.0 * x.x * x.x - 2.0 * x.y * x.y,
        [0, 1] => -4.0 * x.x * x.y + 1.0,
        [2, 0] => 6.0 * x.x,
        [1, 1] => -4.0 * x.y,
        [0, 2] => -4.0 * x.x,
        [3, 0] => 6.0,
        [1, 2] => -4.0,
        _ => 0.0,
    };
    for p in [1.75, 2.0, 3.0] {
        let d = Discretization::new(&mesh, 2, 0).unwrap();
        let iu = interpolate_global(&d, &cubic).unwrap();
        let e = errors_against(&d, &cubic, p, &iu).unwrap();
        assert!(e.discrete <= 1e-12 && e.potential <= 1e-10 && e.lp <= 1e-12, "{e:?}");
    }
}

#[test]
fn error_grows_along_a_ray() {
    let case = make_case(CaseKind::Trigonometric, 3.0).unwrap();
    let d = Discretization::new(&generate(MeshFamily::Triangular, 2).unwrap(), 1, 0).unwrap();
    let iu = interpolate_global(&d, &case.exact).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let delta = nalgebra::DVector::from_fn(iu.values.len(), |i, _| if d.layout.is_fixed(i) { 0.0 } else { rng.random_range(-1.0..1.0) });
    let mut last = -1.0;
    for s in [0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
        let mut uh = iu.clone();
        uh.values.axpy(s, &delta, 1.0);
        let e = compute_errors(&d, &case, &uh).unwrap();
        assert!(e.discrete > last);
        last = e.discrete;
    }
}

#[test]
fn eoc_examples() {
    let eoc = compute_eoc(&[0.1, 0.05], &[1e-2, 2.5e-3]);
    assert_eq!(eoc[0], None);
    assert!((eoc[1].unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(compute_eoc(&[0.1, 0.05], &[3e-2, 3e-2])[1], Some(0.0));
    assert_eq!(compute_eoc(&[0.1, 0.05], &[3e-2, 0.0])[1], None);
    assert_eq!(compute_eoc(&[0.1, 0.05], &[-1.0, 1e-3])[1], None);
    // (k + 1) / (p - 1) for p = 3, k = 1
    let hs: Vec<f64> = (2..6).map(|j| 2f64.powi(-j)).collect();
    let es: Vec<f64> = hs.iter().map(|h| 0.7 * h + 0.05 * h * h).collect();
    let last = compute_eoc(&hs, &es)[3].unwrap();
    assert!((last - 1.0).abs() < 0.05);
}

fn small_study(p: f64) -> StudyConfig {
    StudyConfig::new(MeshFamily::Cartesian, 1, p, CaseKind::Trigonometric, 1..=3)
}

#[test]
fn study_is_deterministic() {
    let a = run_study(&small_study(3.0)).unwrap();
    let b = run_study(&small_study(3.0)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.config_hash, b.config_hash);
    assert_ne!(a.config_hash, small_study(4.0).hash());
    let csv = a.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "level,h,ndofs,err_1ph,err_pot,err_l2,eoc_1ph,eoc_pot,eoc_l2,newton_iters");
    assert_eq!(lines.count(), 3);
    assert!(a.rows[0].eoc.iter().all(|e| e.is_none()));
    assert!(a.rows[2].eoc.iter().all(|e| e.is_some()));
    let script = a.gnuplot_script("run.csv");
    assert!(script.contains("'run.csv'") && script.contains("logscale"));
}

#[test]
fn divergence_is_recorded_and_the_study_continues() {
    let mut cfg = small_study(4.0);
    cfg.newton = NewtonConfig { max_iters: 1, ..NewtonConfig::default() };
    let table = run_study(&cfg).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.diverged());
    assert!(table.rows.iter().all(|r| !r.converged));
}

#[test]
fn empty_study_is_rejected() {
    let cfg = StudyConfig::new(MeshFamily::Cartesian, 1, 2.0, CaseKind::Trigonometric, []);
    assert!(run_study(&cfg).is_err());
}

#[test]
fn linear_case_rates() {
    let table = run_study(&StudyConfig::new(MeshFamily::Triangular, 1, 2.0, CaseKind::Trigonometric, 2..=4)).unwrap();
    assert!(!table.diverged());
    let eoc = table.terminal_eoc().unwrap();
    assert!((eoc - 2.0).abs() <= 0.2, "{eoc}");
}
