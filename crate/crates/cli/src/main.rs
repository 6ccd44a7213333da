mod expr;
mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use fnalg::laws::{self, Fault, Suite};
use fnalg::model::{
    fit_transformed, mean_sd, model_record, read_data_csv, require_positive, total_mass_2d,
    transform_model_multivariate, transformed_aom, ContinuousModel, IsotropicNormal, MultivariateModel,
};
use fnalg::{builtins, catalog, CatalogObject, Error, FdConfig, Interval, QuadratureConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::expr::{compile, constant_expr, ExprError};
use crate::format::g17;

const DEFAULT_SEED: u64 = 42;
const DEMO_SAMPLES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "fnalg",
    version,
    about = "Evaluate, differentiate and integrate function expressions"
)]
struct Cli {
    /// Central-difference step for derivatives without a closed form.
    #[arg(long, global = true, env = "FNALG_FD_STEP")]
    fd_step: Option<f64>,

    /// Convergence tolerance of Simpson integration.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,

    /// Initial Simpson panel count (even).
    #[arg(long, global = true)]
    quad_panels: Option<usize>,

    /// Seed for sampling commands.
    #[arg(long, global = true, env = "FNALG_SEED")]
    seed: Option<u64>,

    /// TOML file with fd_step, quad_tol, quad_panels and seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the value of EXPR at X.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Tabulate EXPR at STEPS+1 evenly spaced points of [LO, HI].
    Table {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(allow_hyphen_values = true)]
        lo: String,
        #[arg(allow_hyphen_values = true)]
        hi: String,
        steps: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Run a law-check suite.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Fault::NAMES))]
        inject_fault: Option<String>,
    },
    /// Fit a log-Normal model to a CSV of positive `value[,aom]` rows.
    DemoLognormal { input: PathBuf },
    /// Standard plane Normal viewed in polar coordinates.
    DemoPolar,
    /// List the catalog.
    Catalog,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    fd_step: Option<f64>,
    quad_tol: Option<f64>,
    quad_panels: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{failed} of {total} laws failed")]
    CheckFailed { failed: usize, total: usize },
}

fn usage_like(e: &Error) -> bool {
    matches!(e, Error::NotFound { .. } | Error::InvalidArgument(_))
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed { .. } => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Expr(ExprError::Parse { .. }) => 2,
            CliError::Expr(ExprError::Build { source, .. }) if usage_like(source) => 2,
            CliError::Expr(_) => 3,
            CliError::Core(e) if usage_like(e) => 2,
            CliError::Core(_) => 3,
        }
    }
}

struct Settings {
    quadrature: QuadratureConfig,
    seed: u64,
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            toml::from_str::<FileConfig>(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    if let Some(step) = cli.fd_step.or(file.fd_step) {
        FdConfig::set_global(FdConfig::new(step)?);
    }
    let q = QuadratureConfig::global();
    let q = QuadratureConfig::new(
        cli.quad_panels.or(file.quad_panels).unwrap_or(q.panels),
        q.max_refinements,
        cli.quad_tol.or(file.quad_tol).unwrap_or(q.abs_tol),
    )?;
    QuadratureConfig::set_global(q);
    Ok(Settings {
        quadrature: q,
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let s = settings(cli)?;
    match &cli.command {
        Command::Eval { expr, x } => eval(expr, x, &s),
        Command::Table {
            expr,
            lo,
            hi,
            steps,
            format,
        } => table(expr, lo, hi, *steps, *format, &s),
        Command::Check { suite, inject_fault } => check(suite, inject_fault.as_deref()),
        Command::DemoLognormal { input } => demo_lognormal(input, &s),
        Command::DemoPolar => demo_polar(&s),
        Command::Catalog => {
            for e in catalog().entries() {
                let kind = match &e.object {
                    CatalogObject::Scalar(_) => "real".to_string(),
                    CatalogObject::Vector(v) => format!("R^{} -> R^{}", v.n_in(), v.n_out()),
                    CatalogObject::Permutation(p) => format!("permutation of {}", p.n()),
                    CatalogObject::Text(_) => "text".to_string(),
                };
                println!("{:<16} {:<26} {}", e.key, e.tier, kind);
            }
            Ok(())
        }
    }
}

fn number(src: &str, s: &Settings) -> Result<f64, CliError> {
    let v = constant_expr(src, s.quadrature).map_err(|e| underline(src, e))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{src:?} is not a finite number")));
    }
    Ok(v)
}

/// Prints `src` with the failing span underlined.
fn underline(src: &str, e: ExprError) -> ExprError {
    if let Some(span) = e.span() {
        let width = span.end.saturating_sub(span.start).max(1);
        eprintln!("  {src}\n  {}{}", " ".repeat(span.start), "^".repeat(width));
    }
    e
}

fn eval(src: &str, x: &str, s: &Settings) -> Result<(), CliError> {
    let x = number(x, s)?;
    let (builder, built) = compile(src, s.quadrature).map_err(|e| underline(src, e))?;
    println!("{}", g17(builder.eval(&built, x).map_err(|e| underline(src, e))?));
    Ok(())
}

fn table(src: &str, lo: &str, hi: &str, steps: usize, format: TableFormat, s: &Settings) -> Result<(), CliError> {
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    let (lo, hi) = (number(lo, s)?, number(hi, s)?);
    let (builder, built) = compile(src, s.quadrature).map_err(|e| underline(src, e))?;
    let rows: Vec<(f64, Result<f64, ExprError>)> = (0..=steps)
        .map(|i| {
            let x = if i == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / steps as f64
            };
            (x, builder.eval(&built, x))
        })
        .collect();
    for (x, r) in &rows {
        if let Err(e) = r {
            eprintln!("warning: x = {}: {e}", g17(*x));
        }
    }
    match format {
        TableFormat::Csv => print!("{}", format::csv_table(&rows)),
        TableFormat::Json => println!("{}", format::json_table(&rows)),
    }
    Ok(())
}

fn check(suite: &str, fault: Option<&str>) -> Result<(), CliError> {
    let suite: Suite = suite.parse()?;
    let fault: Option<Fault> = fault.map(str::parse).transpose()?;
    let reports = laws::run(suite, fault);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} laws passed", reports.len() - failed, reports.len());
    if failed > 0 {
        return Err(CliError::CheckFailed {
            failed,
            total: reports.len(),
        });
    }
    Ok(())
}

fn demo_lognormal(path: &Path, s: &Settings) -> Result<(), CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let data = read_data_csv(file)?;
    require_positive(&data)?;
    let log = builtins::log();
    let fitted = fit_transformed(&data, &log)?;
    let params = fitted.params();
    for (k, v) in &params {
        println!("{k} = {}", g17(*v));
    }
    let first = data[0];
    println!(
        "aom of datum 1 (value {}, aom {}) in log space = {}",
        g17(first.value),
        g17(first.aom),
        g17(transformed_aom(&log, &first)?)
    );
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let sample = (0..DEMO_SAMPLES)
        .map(|_| fitted.sample(&mut rng))
        .collect::<Result<Vec<f64>, Error>>()?;
    let (m, sd) = mean_sd(&sample);
    println!(
        "sample of {DEMO_SAMPLES} (seed {}): mean = {}, sd = {}",
        s.seed,
        g17(m),
        g17(sd)
    );
    let record = serde_json::to_string(&model_record(&fitted)).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("model = {record}");
    Ok(())
}

fn demo_polar(s: &Settings) -> Result<(), CliError> {
    let polar = builtins::polar2cartesian();
    let t = transform_model_multivariate(Arc::new(IsotropicNormal::standard(2)), &polar)?;
    println!("density r*exp(-r^2/2)/(2*pi) in (r, theta):");
    for (r, theta) in [(0.5, 0.0), (1.0, 1.0), (2.0, -2.0), (3.0, 3.0)] {
        let got = t.density(&[r, theta])?;
        let want = r * (-0.5 * r * r).exp() / (2.0 * std::f64::consts::PI);
        println!("  r = {r}, theta = {theta}: {} (analytic {})", g17(got), g17(want));
    }
    let cfg = QuadratureConfig::new(64, 8, 1e-6)?;
    let bounds = [
        Interval::new(0.0, 6.0)?,
        Interval::new(-std::f64::consts::PI, std::f64::consts::PI)?,
    ];
    println!(
        "mass over r in (0, 6], theta in (-pi, pi] = {}",
        g17(total_mass_2d(&t, bounds, &cfg)?)
    );
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let radii = (0..DEMO_SAMPLES)
        .map(|_| Ok(t.sample(&mut rng)?[0]))
        .collect::<Result<Vec<f64>, Error>>()?;
    let (m, _) = mean_sd(&radii);
    println!(
        "sample of {DEMO_SAMPLES} (seed {}): mean r = {} (analytic sqrt(pi/2) = {})",
        s.seed,
        g17(m),
        g17((std::f64::consts::PI / 2.0).sqrt())
    );
    Ok(())
}
