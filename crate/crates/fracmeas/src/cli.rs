//! `fracmeas` subcommands.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracmeas_core::constants::ConstantsReport;
use fracmeas_core::xalg::MAX_DIM as MAX_DIMENSION;
use fracmeas_core::mc::{EstimateResult, Estimator, EstimatorConfig};
use fracmeas_core::oracle1d::{finite_set_measure, pair_closed_form, single_closed_form};

use crate::domain::{parse_list, parse_omega};
use crate::error::CliError;
use crate::manifold::load_manifold;
use crate::report::{num, opt_num, Manifest, Table};
use crate::{parallel, selftest};

#[derive(Debug, Parser)]
#[command(name = "fracmeas", version, about = "Fractional k-dimensional sigma-measures by Monte-Carlo")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every closed-form constant for (n, k).
    Constants(ConstantsArgs),
    /// Estimate Meas^k_sigma(M, Omega) for one or more sigma values.
    Estimate(EstimateArgs),
    /// Sweep sigma towards 1 and compare (1 - sigma) Meas with the limit.
    Converge(EstimateArgs),
    /// Exact values for finite subsets of the line.
    Oracle1d(OracleArgs),
    /// Run the built-in verification suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Also write the report as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Manifold description (JSON).
    #[arg(long)]
    pub manifold: PathBuf,
    /// Domain ball as "c1,...,cn;R".
    #[arg(long, allow_hyphen_values = true)]
    pub omega: String,
    /// A value or a comma-separated list in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of random streams; part of the configuration, so it changes
    /// the sample partition (not the expectation).
    #[arg(long, default_value_t = 8)]
    pub streams: u32,
    /// Tail parameter of the radial proposal.
    #[arg(long, default_value_t = 1.0)]
    pub xi_alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub max_degenerate_fraction: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleConfig {
    /// {-1, 1} in (-2, 2).
    Pair,
    /// {-1} in (-2, 2).
    Left,
    /// {1} in (-2, 2).
    Right,
    /// The points of --points in the interval of --omega.
    Custom,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub config: OracleConfig,
    /// A value or a comma-separated list in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: String,
    /// Comma-separated points (custom only).
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Interval as "c;R" (custom only).
    #[arg(long, allow_hyphen_values = true, default_value = "0;2")]
    pub omega: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelftestLevel {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub level: SelftestLevel,
    #[arg(long, default_value_t = 4)]
    pub streams: u32,
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mutate_limit_constant: f64,
}

/// Parses `args` (program name first) and runs the command. Help and version
/// requests are reported as success.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.render().to_string().trim_end().to_owned()));
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Constants(a) => constants(a),
        Command::Estimate(a) => estimate(a, false),
        Command::Converge(a) => estimate(a, true),
        Command::Oracle1d(a) => oracle1d(a),
        Command::Selftest(a) => selftest(a),
    }
}

/// Writes `table` as CSV to `out`, or to stdout when `out` is absent. With a
/// file, stdout gets an aligned copy.
fn emit(table: &Table, manifest: &mut Manifest, out: Option<&PathBuf>) -> Result<(), CliError> {
    manifest.finish();
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(manifest, &mut w)?;
            w.flush()?;
            print!("{}", table.render());
        }
        None => table.write_csv(manifest, std::io::stdout().lock())?,
    }
    Ok(())
}

fn parse_sigmas(s: &str) -> Result<Vec<f64>, CliError> {
    parse_list(s).map_err(|_| CliError::Usage(format!("--sigma {s:?}: expected a number or a comma-separated list")))
}

fn constants(a: ConstantsArgs) -> Result<(), CliError> {
    if !(a.k < a.n && a.n <= MAX_DIMENSION) {
        return Err(CliError::Usage(format!("usage error: constants need 0 <= k < n <= {MAX_DIMENSION}, got n = {}, k = {}", a.n, a.k)));
    }
    let r = ConstantsReport::new(a.n, a.k)?;
    let mut t = Table::new(vec!["quantity", "value"]);
    for (name, v) in [
        ("alpha_n", r.alpha_n),
        ("omega_nm1", r.omega_nm1),
        ("soMeasure", r.so_measure),
        ("stiefelMeasure", r.stiefel_measure),
        ("bladeManifoldMeasure", r.blade_manifold_measure),
        ("wMeasure", r.w_measure),
        ("vfboundConstant", r.vfbound_constant),
        ("limitConstant", r.limit_constant),
        ("consistencyRatio", r.consistency_ratio()),
    ] {
        t.push(vec![name.into(), num(v)]);
    }
    let consistent = r.is_consistent(1e-12);
    t.push(vec!["consistent".into(), consistent.to_string()]);
    let mut m = Manifest::start("constants").arg("n", a.n).arg("k", a.k);
    m.finish();
    print!("{}", t.render());
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(File::create(path)?);
        t.write_csv(&m, &mut w)?;
        w.flush()?;
    }
    if consistent {
        Ok(())
    } else {
        Err(CliError::Validation("limit constant inconsistent with the W integral".into()))
    }
}

fn estimate(a: EstimateArgs, sweep: bool) -> Result<(), CliError> {
    let omega = parse_omega(&a.omega)?;
    let sigmas = parse_sigmas(&a.sigma)?;
    let loaded = load_manifold(&a.manifold)?;
    let mut m = Manifest::start(if sweep { "converge" } else { "estimate" })
        .arg("manifold", a.manifold.display())
        .arg("omega", &a.omega)
        .arg("sigma", &a.sigma)
        .arg("samples", a.samples)
        .arg("streams", a.streams)
        .arg("xi_alpha", a.xi_alpha)
        .arg("max_degenerate_fraction", a.max_degenerate_fraction);
    m.seed = Some(a.seed);
    m.input_sha256 = Some(loaded.sha256);
    let mut cfg = EstimatorConfig::new(sigmas[0], a.samples, a.seed)
        .with_streams(a.streams)
        .with_xi_alpha(a.xi_alpha);
    cfg.max_degenerate_fraction = a.max_degenerate_fraction;
    let results = if sweep {
        parallel::converge(&loaded.shape, &omega, &sigmas, &cfg)?
    } else {
        sigmas
            .iter()
            .enumerate()
            .map(|(i, &sigma)| {
                let c = EstimatorConfig { sigma, ..cfg.clone() };
                parallel::run(&Estimator::for_sweep(&loaded.shape, &omega, &c, i as u32)?)
            })
            .collect::<fracmeas_core::Result<Vec<_>>>()?
    };
    let table = if sweep { sweep_table(&results) } else { estimate_table(&results) };
    emit(&table, &mut m, a.out.as_ref())
}

pub fn sweep_table(results: &[EstimateResult]) -> Table {
    let mut t = Table::new(vec![
        "sigma",
        "mean",
        "stderr",
        "scaledMean",
        "target",
        "relError",
        "scaledStderr",
        "degenerateFraction",
    ]);
    for r in results {
        t.push(vec![
            num(r.sigma),
            num(r.mean),
            num(r.stderr),
            num(r.scaled_mean),
            opt_num(r.target),
            opt_num(r.relative_error()),
            num(r.scaled_stderr),
            num(r.degenerate_fraction()),
        ]);
    }
    t
}

pub fn estimate_table(results: &[EstimateResult]) -> Table {
    let mut t = Table::new(vec![
        "sigma",
        "mean",
        "stderr",
        "scaledMean",
        "scaledStderr",
        "target",
        "relError",
        "samples",
        "accepted",
        "degenerateResampled",
        "degenerateFraction",
        "tangent",
        "manifoldBoundary",
        "diskBoundary",
        "nearSingular",
        "numerical",
        "maxShare",
        "configHash",
    ]);
    for r in results {
        let d = &r.degenerate;
        t.push(vec![
            num(r.sigma),
            num(r.mean),
            num(r.stderr),
            num(r.scaled_mean),
            num(r.scaled_stderr),
            opt_num(r.target),
            opt_num(r.relative_error()),
            r.samples.to_string(),
            r.accepted.to_string(),
            r.degenerate_resampled.to_string(),
            num(r.degenerate_fraction()),
            d.tangent.to_string(),
            d.manifold_boundary.to_string(),
            d.disk_boundary.to_string(),
            d.near_singular.to_string(),
            d.numerical.to_string(),
            num(r.max_share()),
            format!("{:016x}", r.config_hash),
        ]);
    }
    t
}

fn oracle1d(a: OracleArgs) -> Result<(), CliError> {
    let sigmas = parse_sigmas(&a.sigma)?;
    let mut m = Manifest::start("oracle1d")
        .arg("config", format!("{:?}", a.config).to_lowercase())
        .arg("sigma", &a.sigma);
    let custom = match a.config {
        OracleConfig::Custom => {
            let points = a.points.as_deref().ok_or_else(|| CliError::Usage("--config custom needs --points".into()))?;
            let points = parse_list(points).map_err(|_| CliError::Usage(format!("--points {points:?}: bad number")))?;
            let omega = parse_omega(&a.omega)?;
            if omega.dim() != 1 {
                return Err(CliError::Usage("--omega must be an interval \"c;R\"".into()));
            }
            m = m.arg("points", a.points.as_deref().unwrap_or_default()).arg("omega", &a.omega);
            Some((points, omega.center()[0], omega.radius()))
        }
        _ if a.points.is_some() => return Err(CliError::Usage("--points is only used with --config custom".into())),
        _ => None,
    };
    let mut t = Table::new(vec!["config", "sigma", "value", "method"]);
    let name = format!("{:?}", a.config).to_lowercase();
    for sigma in sigmas {
        let (value, method) = match (&custom, a.config) {
            (Some((p, c, r)), _) => (finite_set_measure(p, *c, *r, sigma)?, "quadrature"),
            (None, OracleConfig::Pair) => (pair_closed_form(sigma)?, "closed_form"),
            (None, _) => (single_closed_form(sigma)?, "closed_form"),
        };
        t.push(vec![name.clone(), num(sigma), num(value), method.into()]);
    }
    emit(&t, &mut m, a.out.as_ref())
}

fn selftest(a: SelftestArgs) -> Result<(), CliError> {
    let level = match a.level {
        SelftestLevel::Quick => selftest::Level::Quick,
        SelftestLevel::Full => selftest::Level::Full,
    };
    let opts = selftest::Options {
        level,
        streams: a.streams.max(1),
        limit_constant_perturbation: a.mutate_limit_constant,
    };
    let report = selftest::run(&opts, |c| {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    });
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::SelftestFailed(failed.join(", ")))
    }
}
