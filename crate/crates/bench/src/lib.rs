//! Shared fixtures for the benchmarks.

use hho_core::harness::{make_case, CaseKind, ManufacturedCase};
use hho_core::solver::{interpolate_global, Discretization, HybridDofVector};
use hho_core::{generate, MeshFamily};

/// Discretization, a manufactured case and its interpolant.
pub fn fixture(family: MeshFamily, level: u32, k: usize, p: f64) -> (Discretization, ManufacturedCase, HybridDofVector) {
    let mesh = generate(family, level).expect("mesh");
    let disc = Discretization::new(&mesh, k, 0).expect("discretization");
    let case = make_case(CaseKind::Trigonometric, p).expect("case");
    let state = interpolate_global(&disc, &case.exact).expect("interpolant");
    (disc, case, state)
}
