use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::assembly::{assemble_load, assemble_residual, local_systems, scatter_residual, Problem};
use super::dofs::{Discretization, HybridDofVector};
use super::linear::{newton_update, LinearSolverKind};
use crate::error::{Error, Result};
use crate::law::{p_laplacian, LerayLionsLaw};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub abs_tol: f64,
    /// Relative to the residual of the initial state (or the load, if larger).
    pub rel_tol: f64,
    pub max_iters: usize,
    /// A stage also stops once a full Newton update is below `step_tol (1 + |u|)`.
    pub step_tol: f64,
    /// Step reduction factor during backtracking.
    pub backtrack: f64,
    pub min_step: f64,
    /// Largest change of `p` between continuation stages; `None` solves at the target directly.
    pub continuation_step: Option<f64>,
    /// Smoothing parameter of the flux and stabilization used in the Jacobian.
    pub regularization: f64,
    pub linear_solver: LinearSolverKind,
    pub condense: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iters: 60,
            step_tol: 1e-11,
            backtrack: 0.5,
            min_step: 1e-4,
            continuation_step: Some(0.5),
            regularization: 1e-14,
            linear_solver: LinearSolverKind::default(),
            condense: false,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.abs_tol, self.rel_tol, self.step_tol, self.min_step, self.regularization];
        if positive.iter().any(|v| !(*v > 0.0)) || !(self.backtrack > 0.0 && self.backtrack < 1.0) || self.max_iters == 0 {
            return Err(Error::Domain(format!("invalid Newton configuration {self:?}")));
        }
        if let Some(s) = self.continuation_step {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("continuation step must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

/// Exponents visited on the way from 2 to `target`.
pub fn continuation_path(target: f64, step: Option<f64>) -> Vec<f64> {
    let Some(step) = step else { return vec![target] };
    let mut path = vec![2.0];
    let mut p = 2.0;
    while (target - p).abs() > 1e-12 {
        p = if target > p { (p + step).min(target) } else { (p - step).max(target) };
        path.push(p);
    }
    path
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub p: f64,
    pub iterations: usize,
    pub residual: f64,
    pub damping_events: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub stages: Vec<StageReport>,
    pub final_residual: f64,
    pub tolerance: f64,
    pub condensed: bool,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn total_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.iterations).sum()
    }

    pub fn converged(&self) -> bool {
        self.stages.iter().all(|s| s.converged)
    }
}

/// Initial state: zero inside, `π^k_F g` on boundary faces.
pub fn initial_state(disc: &Discretization, problem: &Problem) -> Result<HybridDofVector> {
    let mut state = HybridDofVector::zeros(&disc.layout);
    if let Some(g) = problem.dirichlet {
        for f in (0..disc.layout.num_faces).filter(|&f| disc.layout.boundary[f]) {
            let c = disc.face_projection(g, f)?;
            state.values.rows_mut(disc.layout.face_offset(f), c.len()).copy_from(&c);
        }
    }
    Ok(state)
}

/// Damped Newton with continuation in `p`. A stage that exhausts its
/// iterations yields [`Error::Divergence`].
pub fn newton_solve(disc: &Discretization, problem: &Problem, config: &NewtonConfig) -> Result<(HybridDofVector, SolveReport)> {
    let (state, report) = newton_solve_report(disc, problem, config)?;
    if let Some(stage) = report.stages.iter().find(|s| !s.converged) {
        return Err(Error::Divergence { p: stage.p, iterations: stage.iterations, residual: stage.residual });
    }
    Ok((state, report))
}

/// Like [`newton_solve`] but always returns the last state and report.
pub fn newton_solve_report(disc: &Discretization, problem: &Problem, config: &NewtonConfig) -> Result<(HybridDofVector, SolveReport)> {
    config.validate()?;
    let start = Instant::now();
    let target = problem.law.p;
    let path = if problem.law.is_power_law() { continuation_path(target, config.continuation_step) } else { vec![target] };
    let loads = assemble_load(disc, problem.source)?;
    let mut state = initial_state(disc, problem)?;

    let load_norm = loads.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
    let initial = assemble_residual(disc, problem.law, &state, Some(&loads), 0.0).norm();
    let tolerance = config.abs_tol.max(config.rel_tol * load_norm.max(initial));

    let mut stages = Vec::with_capacity(path.len());
    for &p in &path {
        let stage_law = if p == target { problem.law.clone() } else { p_laplacian(p)? };
        let stage = newton_stage(disc, &stage_law, &loads, &mut state, config, tolerance)?;
        let stop = !stage.converged;
        log::info!("p = {p}: {} iterations, residual {:.3e}", stage.iterations, stage.residual);
        stages.push(stage);
        if stop {
            break;
        }
    }
    let final_residual = stages.last().map_or(initial, |s| s.residual);
    Ok((state, SolveReport { stages, final_residual, tolerance, condensed: config.condense, wall_time: start.elapsed().as_secs_f64() }))
}

fn newton_stage(
    disc: &Discretization,
    law: &LerayLionsLaw,
    loads: &[DVector<f64>],
    state: &mut HybridDofVector,
    config: &NewtonConfig,
    tolerance: f64,
) -> Result<StageReport> {
    let residual_at = |s: &HybridDofVector| assemble_residual(disc, law, s, Some(loads), 0.0);
    let mut norm = residual_at(state).norm();
    let mut damping_events = 0;
    let mut iterations = 0;
    while norm > tolerance {
        if iterations == config.max_iters {
            return Ok(StageReport { p: law.p, iterations, residual: norm, damping_events, converged: false });
        }
        iterations += 1;
        let locals = local_systems(disc, law, state, Some(loads), config.regularization);
        let smoothed = scatter_residual(disc, &locals);
        let delta = newton_update(disc, &locals, &smoothed, config.linear_solver, config.condense)?;
        if delta.norm() <= config.step_tol * (1.0 + state.values.norm()) {
            state.values += &delta;
            norm = residual_at(state).norm();
            log::debug!("p = {}: update {:.3e} below the step tolerance, residual {:.3e}", law.p, delta.norm(), norm);
            return Ok(StageReport { p: law.p, iterations, residual: norm, damping_events, converged: norm.is_finite() });
        }

        let mut step = 1.0;
        loop {
            let mut trial = state.clone();
            trial.values.axpy(step, &delta, 1.0);
            let n_trial = residual_at(&trial).norm();
            if n_trial <= (1.0 - 1e-4 * step) * norm || step * config.backtrack < config.min_step {
                if step < 1.0 {
                    damping_events += 1;
                }
                log::debug!("p = {}: step {step}, |delta| {:.3e}, residual {:.3e}", law.p, delta.norm(), n_trial);
                *state = trial;
                norm = n_trial;
                break;
            }
            step *= config.backtrack;
        }
        if !norm.is_finite() {
            return Ok(StageReport { p: law.p, iterations, residual: norm, damping_events, converged: false });
        }
    }
    Ok(StageReport { p: law.p, iterations, residual: norm, damping_events, converged: true })
}
