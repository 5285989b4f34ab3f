use std::sync::Arc;

use hho_core::geometry::Vec2;
use hho_core::harness::{compute_errors, make_case, run_study, CaseKind, StudyConfig};
use hho_core::law::{Flux, LerayLionsLaw};
use hho_core::mesh::{read_mesh, write_mesh};
use hho_core::solver::{newton_solve, newton_solve_report, Discretization, NewtonConfig, Problem};
use hho_core::{generate, validate, MeshFamily, Point};
use nalgebra::Matrix2;

#[test]
fn mesh_file_round_trip_gives_the_same_solution() {
    let mesh = generate(MeshFamily::LocallyRefined, 2).unwrap();
    let text = write_mesh(&mesh);
    let back = read_mesh(&text).unwrap();
    validate(&back).unwrap();
    let case = make_case(CaseKind::Exponential, 3.0).unwrap();
    let source = case.source();
    let solve = |m| {
        let d = Discretization::new(m, 1, 0).unwrap();
        let problem = Problem { law: &case.law, source: &source, dirichlet: case.dirichlet().map(|g| g as _) };
        let (uh, _) = newton_solve(&d, &problem, &NewtonConfig::default()).unwrap();
        compute_errors(&d, &case, &uh).unwrap()
    };
    assert_eq!(solve(&mesh), solve(&back));
}

#[test]
fn condensed_and_full_newton_agree() {
    let case = make_case(CaseKind::Trigonometric, 3.0).unwrap();
    let source = case.source();
    let d = Discretization::new(&generate(MeshFamily::Hexagonal, 3).unwrap(), 1, 0).unwrap();
    let problem = Problem { law: &case.law, source: &source, dirichlet: None };
    let (a, ra) = newton_solve(&d, &problem, &NewtonConfig::default()).unwrap();
    let (b, rb) = newton_solve(&d, &problem, &NewtonConfig { condense: true, ..NewtonConfig::default() }).unwrap();
    assert!(rb.condensed && !ra.condensed);
    assert!((&a.values - &b.values).amax() <= 1e-9 * a.values.amax());
}

/// `a(x, ξ) = (1 + x) |ξ| ξ`, a `p = 3` law that is not of p-Laplace form.
struct Weighted;

impl Flux for Weighted {
    fn flux(&self, x: &Point, xi: &Vec2, _eps: f64) -> Vec2 {
        xi * ((1.0 + x.x) * xi.norm())
    }

    fn jacobian(&self, x: &Point, xi: &Vec2, eps: f64) -> Matrix2<f64> {
        let r = (xi.norm_squared() + eps * eps).sqrt();
        if r == 0.0 {
            return Matrix2::zeros();
        }
        (Matrix2::identity() * r + xi * xi.transpose() / r) * (1.0 + x.x)
    }
}

#[test]
fn custom_law_solves_without_continuation() {
    let law = LerayLionsLaw::custom("weighted", 3.0, Arc::new(Weighted), 1.0, 2.0).unwrap();
    assert!(!law.is_power_law());
    let one = |_: &Point, _: [usize; 2]| 1.0;
    let d = Discretization::new(&generate(MeshFamily::Triangular, 3).unwrap(), 0, 0).unwrap();
    let (uh, report) = newton_solve_report(&d, &Problem { law: &law, source: &one, dirichlet: None }, &NewtonConfig::default()).unwrap();
    assert!(report.converged());
    assert_eq!(report.stages.len(), 1);
    assert!(uh.values.iter().all(|v| *v >= -1e-12));
}

#[test]
fn potential_error_tracks_the_discrete_error() {
    for family in [MeshFamily::Hexagonal, MeshFamily::LocallyRefined] {
        let table = run_study(&StudyConfig::new(family, 1, 3.0, CaseKind::Trigonometric, 2..=4)).unwrap();
        for r in &table.rows {
            // measured ratio is at most 1.04 on these runs
            assert!(r.errors.potential <= 1.1 * r.errors.discrete + r.h * r.h, "{family}: {:?}", r.errors);
        }
    }
}

#[test]
fn linear_case_rates_on_every_family() {
    for family in MeshFamily::ALL {
        for k in 0..=2 {
            let table = run_study(&StudyConfig::new(family, k, 2.0, CaseKind::Trigonometric, 2..=5)).unwrap();
            assert!(!table.diverged());
            let eoc = table.terminal_eoc().unwrap();
            assert!((eoc - (k + 1) as f64).abs() <= 0.2, "{family} k = {k}: {eoc}");
        }
    }
}
