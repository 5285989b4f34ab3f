use hho_core::polybasis::rates::lp_stability_ratio;
use hho_core::polybasis::{
    elliptic_project, fitted_slope, l2_project_cell, seminorm, CellGeometry, ExpField, ProjectorKind, RateStudy, SeminormSpec, SinProduct,
    SmoothField,
};
use hho_core::{generate, MeshFamily, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Mixed {
    e: ExpField,
    s: SinProduct,
    c: f64,
}

impl SmoothField for Mixed {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        self.e.derivative(x, alpha) + self.c * self.s.derivative(x, alpha)
    }
}

fn random_field(rng: &mut ChaCha8Rng) -> Mixed {
    Mixed {
        e: ExpField { a: rng.random_range(-2.0..2.0), b: rng.random_range(-2.0..2.0) },
        s: SinProduct { wx: rng.random_range(1.0..8.0), wy: rng.random_range(1.0..8.0) },
        c: rng.random_range(-3.0..3.0),
    }
}

#[test]
fn l2_projector_is_lp_bounded_uniformly_in_the_level() {
    // recorded baseline: the largest ratio over all samples is 1.084
    const C: f64 = 1.25;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for family in MeshFamily::ALL {
        for level in 1..=3 {
            let mesh = generate(family, level).unwrap();
            let mut worst = 0f64;
            for _ in 0..200 {
                let cell = CellGeometry::from_mesh(&mesh, rng.random_range(0..mesh.num_elements()));
                let v = random_field(&mut rng);
                let l = rng.random_range(0..=2);
                for p in [1.5, 2.0, 4.0] {
                    worst = worst.max(lp_stability_ratio(&v, ProjectorKind::L2, l, p, &cell).unwrap());
                }
            }
            assert!(worst <= C, "{family} level {level}: {worst}");
        }
    }
}

#[test]
fn projectors_are_bounded_in_their_own_seminorm() {
    // recorded baseline: the largest ratio is 1.134
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mesh = generate(MeshFamily::Hexagonal, 2).unwrap();
    for _ in 0..50 {
        let cell = CellGeometry::from_mesh(&mesh, rng.random_range(0..mesh.num_elements()));
        let v = random_field(&mut rng);
        for l in 1..=3 {
            for s in 1..=l {
                for p in [1.5, 2.0, 4.0] {
                    let spec = SeminormSpec::new(s, p).unwrap();
                    let reference = seminorm(&v, spec, &cell).unwrap();
                    for proj in [l2_project_cell(&v, l, &cell).unwrap(), elliptic_project(&v, l, &cell).unwrap()] {
                        let ratio = seminorm(&proj, spec, &cell).unwrap() / reference;
                        assert!(ratio <= 1.3, "l = {l} s = {s} p = {p}: {ratio}");
                    }
                }
            }
        }
    }
}

#[test]
fn rates_for_every_seminorm_order_and_both_projectors() {
    let v = ExpField { a: 1.0, b: 1.0 };
    let hs: Vec<f64> = (2..=6).map(|j| 2f64.powi(-j)).collect();
    for kind in [ProjectorKind::L2, ProjectorKind::Elliptic] {
        for l in 1..=3 {
            for m in 0..=l + 1 {
                if kind == ProjectorKind::Elliptic && l == 0 {
                    continue;
                }
                for p in [1.5, 2.0, 4.0] {
                    let study = RateStudy { kind, degree: l, spec: SeminormSpec::new(m, p).unwrap(), trace: false };
                    let rows = study.run(&v, &hs).unwrap();
                    let slope = fitted_slope(&hs, &rows.iter().map(|r| r.error).collect::<Vec<_>>());
                    let expected = (l + 1 - m) as f64;
                    assert!((slope - expected).abs() <= 0.2, "{kind:?} l = {l} m = {m} p = {p}: {slope}");
                }
            }
        }
    }
}
