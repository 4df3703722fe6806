use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vsrc::cli::{self, CliError, ExperimentConfig, GeometryChoice, SolveReport};
use vsrc::geometry::Point2;
use vsrc::operator::OperatorKind;

/// Virtual-source boundary integral solver for the exterior 2D Helmholtz
/// Dirichlet problem, with rotated-Padé on-surface radiation
/// preconditioning and matrix-free GMRES.
#[derive(Parser)]
#[command(name = "vsrc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scattering/radiation problem and report accuracy.
    Solve(SolveArgs),
    /// Assemble the dense operator and write its spectrum.
    Spectrum(SpectrumArgs),
    /// Refinement/β sweep of condition number and relative error.
    Table(TableArgs),
    /// Plane-wave benchmark against the analytic circle series.
    MieCompare(MieArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Boundary geometry: flower | circle:R | file:PATH
    #[arg(long, default_value = "flower")]
    geometry: String,
    /// Wavenumber; accepts plain floats or multiples of pi like "4pi".
    #[arg(long, default_value = "4pi", value_parser = parse_pi_value)]
    k: f64,
    /// Elements per wavelength.
    #[arg(long, default_value_t = 12)]
    nlambda: u32,
    /// Exponent in the displacement rule h = c·λ/N_λ^β.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Scale c in the displacement rule (default: chosen so N_λ = 12 gives
    /// h = λ/12 for every β).
    #[arg(long)]
    h_const: Option<f64>,
    /// Number of Padé terms in the radiation operator.
    #[arg(long, default_value_t = 4)]
    pade_terms: usize,
    /// Padé branch-rotation angle; accepts "pi/2"-style values.
    #[arg(long, default_value = "0.5pi", value_parser = parse_pi_value)]
    pade_angle: f64,
    /// Damping ε in k_ε = k + iε·k^{1/3} (0 disables damping).
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    /// GMRES relative residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// GMRES iteration cap.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// GMRES restart length (full-memory when omitted).
    #[arg(long)]
    restart: Option<usize>,
    /// Output file for the CSV/JSON report (stdout summary always prints).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which problem to solve.
    #[arg(long, value_enum, default_value_t = Problem::Manufactured)]
    problem: Problem,
    /// Also sample the field on a uniform grid: "nx,ny,x0,y0,x1,y1".
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Manufactured,
    Planewave,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Operator to assemble: the preconditioned composition or the bare one.
    #[arg(long, value_enum, default_value_t = Which::Ba)]
    which: Which,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    /// B_N A_N
    Ba,
    /// A_N
    A,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated refinement list.
    #[arg(long, default_value = "12,24,48,96", value_delimiter = ',')]
    nlambda_list: Vec<u32>,
    /// Comma-separated β list.
    #[arg(long, default_value = "0,0.5,1", value_delimiter = ',')]
    beta_list: Vec<f64>,
}

#[derive(Args)]
struct MieArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated refinement list.
    #[arg(long, default_value = "6,12,24", value_delimiter = ',')]
    nlambda_list: Vec<u32>,
}

/// Parses "12.5", "4pi", "0.5pi", or "pi/2".
fn parse_pi_value(text: &str) -> Result<f64, String> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    if let Some(num) = text.strip_suffix("pi") {
        let factor = if num.is_empty() {
            1.0
        } else {
            num.parse::<f64>().map_err(|e| e.to_string())?
        };
        return Ok(factor * std::f64::consts::PI);
    }
    if let Some(den) = text.strip_prefix("pi/") {
        let d: f64 = den
            .parse()
            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
        return Ok(std::f64::consts::PI / d);
    }
    Err(format!("cannot parse `{text}` as a number"))
}

fn config_from(common: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    Ok(ExperimentConfig {
        geometry: GeometryChoice::parse(&common.geometry)?,
        wavenumber: common.k,
        elements_per_wavelength: common.nlambda,
        beta: common.beta,
        h_scale: common.h_const,
        pade_terms: common.pade_terms,
        pade_angle: common.pade_angle,
        damping: common.damping,
        gmres_tolerance: common.tol,
        gmres_max_iterations: common.max_iter,
        gmres_restart: common.restart,
    })
}

fn write_output(
    common: &CommonArgs,
    csv: String,
    json: impl serde::Serialize,
) -> Result<(), CliError> {
    let Some(path) = &common.out else {
        return Ok(());
    };
    let content = match common.format {
        Format::Csv => csv,
        Format::Json => serde_json::to_string_pretty(&json).expect("report serializes"),
    };
    std::fs::write(path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn print_solve_summary(label: &str, report: &SolveReport) {
    println!(
        "{label}: N = {}, h = {:.6}, gmres iterations = {} (converged: {})",
        report.n, report.displacement, report.gmres_iterations, report.gmres_converged
    );
    if let (Some(err), Some(err_sqrt)) = (report.relative_error, report.relative_error_sqrt) {
        println!("  relative error (ratio form) = {err:.3e}, sqrt form = {err_sqrt:.3e}");
    }
    if let Some(cond) = report.condition_number {
        println!("  spectral condition number = {cond:.3e}");
    }
    if let Some(cond_sv) = report.condition_number_sv {
        println!("  singular-value condition number (diagnostic) = {cond_sv:.3e}");
    }
    println!(
        "  timings: build {:.2}s, solve {:.2}s, evaluate {:.2}s, spectrum {:.2}s",
        report.timings.build,
        report.timings.solve,
        report.timings.evaluate,
        report.timings.spectrum
    );
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let config = config_from(&args.common)?;
    let report = match args.problem {
        Problem::Manufactured => cli::run_manufactured(&config)?,
        Problem::Planewave => cli::run_planewave(&config)?,
    };
    print_solve_summary(
        match args.problem {
            Problem::Manufactured => "manufactured",
            Problem::Planewave => "planewave",
        },
        &report,
    );

    if let Some(grid_spec) = &args.grid {
        let parts: Vec<f64> = grid_spec
            .split(',')
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|e| CliError::InvalidConfig(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if parts.len() != 6 {
            return Err(CliError::InvalidConfig(
                "grid spec must be nx,ny,x0,y0,x1,y1".into(),
            ));
        }
        let op = config.build_operator()?;
        let density: Vec<num_complex::Complex64> = report
            .density_re
            .iter()
            .zip(&report.density_im)
            .map(|(&re, &im)| num_complex::Complex64::new(re, im))
            .collect();
        let samples = cli::field_grid(
            &op,
            &density,
            (
                Point2::new(parts[2], parts[3]),
                Point2::new(parts[4], parts[5]),
            ),
            (parts[0] as usize, parts[1] as usize),
        )?;
        let grid_path = args
            .common
            .out
            .clone()
            .map(|p| p.with_extension("field.csv"))
            .unwrap_or_else(|| PathBuf::from("field.csv"));
        std::fs::write(&grid_path, cli::field_csv(&samples))?;
        println!("wrote field grid to {}", grid_path.display());
    }

    // Default CSV payload: probe comparison plus residual history appended
    // as a second table would confuse parsers, so probes take precedence.
    write_output(&args.common, cli::probes_csv(&report), &report)
}

fn run_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let config = config_from(&args.common)?;
    let kind = match args.which {
        Which::Ba => OperatorKind::Preconditioned,
        Which::A => OperatorKind::Plain,
    };
    let report = cli::run_spectrum(&config, kind)?;
    print_solve_summary("spectrum", &report);
    let max = report
        .eigenvalues_re
        .iter()
        .zip(&report.eigenvalues_im)
        .map(|(re, im)| (re * re + im * im).sqrt())
        .fold(0.0_f64, f64::max);
    let min = report
        .eigenvalues_re
        .iter()
        .zip(&report.eigenvalues_im)
        .map(|(re, im)| (re * re + im * im).sqrt())
        .fold(f64::INFINITY, f64::min);
    println!("  spectrum magnitudes: max = {max:.4e}, min = {min:.4e}");
    write_output(&args.common, cli::spectrum_csv(&report), &report)
}

fn run_table(args: TableArgs) -> Result<(), CliError> {
    let config = config_from(&args.common)?;
    let rows = cli::run_table(&config, &args.nlambda_list, &args.beta_list)?;
    println!("n_lambda beta h N cond rel_error gmres_iters seconds");
    for r in &rows {
        println!(
            "{:8} {:4} {:.5} {:5} {:.3e} {:.3e} {:5} {:.2}",
            r.elements_per_wavelength,
            r.beta,
            r.displacement,
            r.n,
            r.condition_number,
            r.relative_error,
            r.gmres_iterations,
            r.seconds
        );
    }
    write_output(&args.common, cli::table_csv(&rows), &rows)
}

fn run_mie(args: MieArgs) -> Result<(), CliError> {
    let config = config_from(&args.common)?;
    if !matches!(config.geometry, GeometryChoice::Circle { .. }) {
        return Err(CliError::InvalidConfig(
            "mie-compare needs --geometry circle:R".into(),
        ));
    }
    let rows = cli::run_mie_compare(&config, &args.nlambda_list)?;
    println!("n_lambda h N rel_error rel_error_sqrt gmres_iters");
    for r in &rows {
        println!(
            "{:8} {:.5} {:5} {:.3e} {:.3e} {:5}",
            r.elements_per_wavelength,
            r.displacement,
            r.n,
            r.relative_error,
            r.relative_error_sqrt,
            r.gmres_iterations
        );
    }
    write_output(&args.common, cli::table_csv(&rows), &rows)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Table(args) => run_table(args),
        Command::MieCompare(args) => run_mie(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
