use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hho_core::harness::{run_study, CaseKind, StudyConfig};
use hho_core::law::{check_all, p_laplacian, reports_csv};
use hho_core::polybasis::rates::{fitted_slope, rates_csv};
use hho_core::polybasis::{ExpField, ProjectorKind, RateStudy, SeminormSpec};
use hho_core::MeshFamily;

#[derive(Parser)]
#[command(name = "hho", version, about = "Hybrid high-order schemes for the p-Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study on a mesh family; writes CSV and a gnuplot script.
    Run(RunArgs),
    /// Approximation rates of the L2 or elliptic projector on shrinking squares.
    ProjectorRates(RatesArgs),
    /// Check the vector and scalar inequalities of the p-Laplace flux.
    CheckLaws(LawArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    family: MeshFamily,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    case: CaseKind,
    /// Number of refinement levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Level of the coarsest mesh (level n has 2^n cells per side).
    #[arg(long, default_value_t = 2)]
    first_level: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    condense: bool,
    /// Relative Newton tolerance.
    #[arg(long)]
    newton_tol: Option<f64>,
    /// Newton iterations allowed per continuation stage.
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    quad_boost: usize,
    /// Solve directly at the target exponent without continuation.
    #[arg(long)]
    no_continuation: bool,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, default_value = "elliptic")]
    kind: ProjectorKind,
    /// Polynomial degree of the projector.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Seminorm order.
    #[arg(long, default_value_t = 0)]
    order: usize,
    /// Lebesgue index; `inf` is accepted.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Measure the boundary trace instead of the cell seminorm.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 2)]
    j_min: i32,
    #[arg(long, default_value_t = 7)]
    j_max: i32,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Print JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

fn run(args: RunArgs) -> Result<bool> {
    let mut config = StudyConfig::new(args.family, args.degree, args.p, args.case, (0..args.levels).map(|i| args.first_level + i));
    config.quad_boost = args.quad_boost;
    config.newton.condense = args.condense;
    if let Some(t) = args.newton_tol {
        config.newton.rel_tol = t;
    }
    if let Some(n) = args.max_iters {
        config.newton.max_iters = n;
    }
    if args.no_continuation {
        config.newton.continuation_step = None;
    }
    let table = run_study(&config)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let stem = format!("{}_k{}_p{}_{}", args.family, args.degree, args.p, args.case);
    let csv_name = format!("{stem}.csv");
    fs::write(args.out.join(&csv_name), table.to_csv())?;
    fs::write(args.out.join(format!("{stem}.gp")), table.gnuplot_script(&csv_name))?;
    print!("{}", table.to_csv());
    let floored: usize = table.rows.iter().map(|r| r.regularized_source).sum();
    if floored > 0 {
        eprintln!("source evaluated with a regularized flux at {floored} quadrature nodes");
    }
    Ok(!table.diverged())
}

fn projector_rates(args: RatesArgs) -> Result<()> {
    let study = RateStudy { kind: args.kind, degree: args.degree, spec: SeminormSpec::new(args.order, args.p)?, trace: args.trace };
    let hs: Vec<f64> = (args.j_min..=args.j_max).map(|j| 2f64.powi(-j)).collect();
    let rows = study.run(&ExpField { a: 1.0, b: 1.0 }, &hs)?;
    let csv = rates_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    eprintln!("fitted slope {:.4}", fitted_slope(&hs, &errors));
    Ok(())
}

fn check_laws(args: LawArgs) -> Result<bool> {
    let law = p_laplacian(args.p)?;
    let reports = check_all(&law, args.samples, args.seed);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        print!("{}", reports_csv(&reports));
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let outcome = match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::ProjectorRates(a) => projector_rates(a).map(|_| true),
        Command::CheckLaws(a) => check_laws(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
