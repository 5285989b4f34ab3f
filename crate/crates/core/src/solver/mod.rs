//! Global hybrid unknowns, assembly of the discrete problem and its Newton solver.

mod assembly;
mod dofs;
mod linear;
mod newton;

pub use assembly::{
    assemble_jacobian, assemble_load, assemble_matrix, assemble_residual, element_system, energy, global_norm, load_exactness,
    local_systems, scatter_residual, Problem,
};
pub use dofs::{interpolate_global, Discretization, DofLayout, HybridDofVector};
pub use linear::{back_substitute, newton_update, solve_sparse, static_condense, CondensedSystem, LinearSolverKind};
pub use newton::{continuation_path, initial_state, newton_solve, newton_solve_report, NewtonConfig, SolveReport, StageReport};

/// `(0..n).map(f)` spread over scoped threads; results keep their order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(n);
    if threads <= 1 || n < 32 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> =
            (0..threads).map(|c| s.spawn(move || (c * chunk..((c + 1) * chunk).min(n)).map(f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests;
