use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::case::{make_case, CaseKind};
use super::errors::{compute_errors, ErrorBundle};
use crate::error::{Error, Result};
use crate::mesh::{generate, MeshFamily};
use crate::polybasis::compute_eoc;
use crate::solver::{newton_solve_report, Discretization, NewtonConfig, Problem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyConfig {
    pub family: MeshFamily,
    pub degree: usize,
    pub p: f64,
    pub case: CaseKind,
    pub levels: Vec<usize>,
    pub quad_boost: usize,
    pub newton: NewtonConfig,
}

impl StudyConfig {
    pub fn new(family: MeshFamily, degree: usize, p: f64, case: CaseKind, levels: impl IntoIterator<Item = usize>) -> Self {
        StudyConfig { family, degree, p, case, levels: levels.into_iter().collect(), quad_boost: 0, newton: NewtonConfig::default() }
    }

    /// FNV-1a hash of the JSON form, used to tag outputs.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let h = json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub ndofs: usize,
    pub errors: ErrorBundle,
    pub eoc: [Option<f64>; 3],
    pub newton_iters: usize,
    pub converged: bool,
    /// Source evaluations that needed the gradient floor.
    pub regularized_source: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub config: StudyConfig,
    pub config_hash: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn diverged(&self) -> bool {
        self.rows.iter().any(|r| !r.converged)
    }

    /// EOC of the discrete-norm error between the last two levels.
    pub fn terminal_eoc(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.eoc[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,h,ndofs,err_1ph,err_pot,err_l2,eoc_1ph,eoc_pot,eoc_l2,newton_iters\n");
        let fmt_eoc = |e: Option<f64>| e.map(|v| format!("{v:.4}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6e},{},{:.6e},{:.6e},{:.6e},{},{},{},{}",
                r.level,
                r.h,
                r.ndofs,
                r.errors.discrete,
                r.errors.potential,
                r.errors.lp,
                fmt_eoc(r.eoc[0]),
                fmt_eoc(r.eoc[1]),
                fmt_eoc(r.eoc[2]),
                r.newton_iters
            );
        }
        out
    }

    /// Gnuplot script drawing the three errors against `h` from `csv_name`.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        let c = &self.config;
        format!(
            "# {family}, k = {k}, p = {p}, {case} (config {hash})\n\
             set datafile separator ','\n\
             set logscale xy\n\
             set key bottom right\n\
             set xlabel 'h'\n\
             set ylabel 'error'\n\
             set title '{family}, k={k}, p={p}, {case}'\n\
             plot '{csv}' using 2:4 skip 1 with linespoints title 'discrete W^{{1,p}}', \\\n     \
             '{csv}' using 2:5 skip 1 with linespoints title 'potential', \\\n     \
             '{csv}' using 2:6 skip 1 with linespoints title 'L^p'\n",
            family = c.family,
            k = c.degree,
            p = c.p,
            case = c.case,
            hash = self.config_hash,
            csv = csv_name,
        )
    }
}

/// Mesh, solve, errors and EOC for every level. Divergence is recorded in
/// the row and the study moves on.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceTable> {
    if config.levels.is_empty() {
        return Err(Error::Domain("a study needs at least one level".into()));
    }
    let case = make_case(config.case, config.p)?;
    let source = case.source();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(config.levels.len());
    for &level in &config.levels {
        let mesh = generate(config.family, level as u32)?;
        let disc = Discretization::new(&mesh, config.degree, config.quad_boost)?;
        let before = case.regularized_evaluations();
        let problem =
            Problem { law: &case.law, source: &source, dirichlet: case.dirichlet().map(|g| g as &dyn crate::polybasis::SmoothField) };
        let (uh, report) = newton_solve_report(&disc, &problem, &config.newton)?;
        if !report.converged() {
            log::warn!("{} level {level}: Newton did not converge (residual {:.3e})", config.family, report.final_residual);
        }
        let errors = compute_errors(&disc, &case, &uh)?;
        rows.push(ConvergenceRow {
            level,
            h: mesh.h_max,
            ndofs: disc.layout.dim(),
            errors,
            eoc: [None; 3],
            newton_iters: report.total_iterations(),
            converged: report.converged(),
            regularized_source: case.regularized_evaluations() - before,
        });
    }
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let series = [
        compute_eoc(&h, &rows.iter().map(|r| r.errors.discrete).collect::<Vec<_>>()),
        compute_eoc(&h, &rows.iter().map(|r| r.errors.potential).collect::<Vec<_>>()),
        compute_eoc(&h, &rows.iter().map(|r| r.errors.lp).collect::<Vec<_>>()),
    ];
    for (i, row) in rows.iter_mut().enumerate() {
        row.eoc = [series[0][i], series[1][i], series[2][i]];
    }
    Ok(ConvergenceTable { config_hash: config.hash(), config: config.clone(), rows })
}
