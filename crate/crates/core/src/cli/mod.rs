//! Command-line front end: argument parsing, dispatch, and report files.

pub mod config;
pub mod io;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use crate::error::{Error, Result};
use crate::geometry::{inscribed_ball, schwarz_rearrange, PointFn};
use crate::seminorm::{cross_term, seminorm_domain, seminorm_fullspace, Ladder, Region, SeminormRequest};
use crate::theorems::{sample_on_domain, verify_comparison, verify_counterexample, CounterexampleOptions};
use crate::young::{
    beta_curve, classify_theorem2_case, complementary, delta2_constant, exponent_bounds, kernel_conditions_check,
    legendre_identity_residual, log_grid, LambdaProbe,
};

pub use config::{ConfigFile, ExperimentConfig, Overrides, RegionChoice, Subcommand};
pub use io::{emit_curves, fmt_num, read_curves, read_grid, write_grid};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NO_PASS: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "fracsym", version, about = "Rearrangement and fractional Orlicz seminorm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Young-function diagnostics.
    #[command(subcommand)]
    Young(YoungCommand),
    /// Kernel-condition diagnostics.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Schwarz symmetrization of a grid-function CSV.
    Rearrange,
    /// One seminorm of a grid-function CSV.
    Seminorm,
    /// Epsilon scan of the domain counterexample.
    Counterexample,
    /// Comparison ratios over a corpus.
    Compare,
    /// Case classifier for the comparison hypotheses.
    Classify,
}

#[derive(ClapSubcommand, Debug)]
enum YoungCommand {
    /// Exponents, Delta2 constant and conjugate residuals.
    Inspect,
}

#[derive(ClapSubcommand, Debug)]
enum KernelCommand {
    /// Monotonicity, lower bound and integrability of (M, N).
    Check,
}

#[derive(Args, Debug, Default)]
struct SharedArgs {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Union of primitives, e.g. "box(0,1)+box(2,4)" or "ball(0,0,1)".
    #[arg(long, global = true)]
    domain: Option<String>,
    /// tp, power_log, power_over_log, double_phase or tabulated.
    #[arg(long, global = true)]
    young: Option<String>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Two-column (t, G) CSV for `--young tabulated`.
    #[arg(long, global = true)]
    young_table: Option<PathBuf>,
    /// Fractional order in (0,1).
    #[arg(long, global = true)]
    s: Option<f64>,
    /// fractional, constant or linear.
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// Dimension when no domain is given.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Cells along the longest axis (default 256 in 1D, 48 otherwise).
    #[arg(long, global = true)]
    resolution: Option<usize>,
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true)]
    diag_depth: Option<usize>,
    #[arg(long, global = true)]
    truncation_radius: Option<f64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Worker cap; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Comma-separated epsilon scan.
    #[arg(long, global = true)]
    epsilons: Option<String>,
    #[arg(long, global = true)]
    pass_factor: Option<f64>,
    #[arg(long, global = true)]
    ball_case: Option<bool>,
    /// Comparison case 1, 2 or 3.
    #[arg(long, global = true)]
    case: Option<u8>,
    /// Grid-function CSV files (repeatable).
    #[arg(long, global = true)]
    corpus: Vec<PathBuf>,
    /// Grid-function CSV input.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// domain, full or cross.
    #[arg(long, global = true)]
    region: Option<String>,
    /// Upper sampling radius for `kernel check`.
    #[arg(long, global = true)]
    r_max: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl SharedArgs {
    fn into_overrides(self) -> (Option<PathBuf>, Overrides) {
        (
            self.config,
            Overrides {
                domain: self.domain,
                young: self.young,
                p: self.p,
                q: self.q,
                c: self.c,
                young_table: self.young_table,
                s: self.s,
                kernel: self.kernel,
                dim: self.dim,
                resolution: self.resolution,
                levels: self.levels,
                diag_depth: self.diag_depth,
                truncation_radius: self.truncation_radius,
                tolerance: self.tolerance,
                threads: self.threads,
                epsilons: self.epsilons,
                pass_factor: self.pass_factor,
                ball_case: self.ball_case,
                case: self.case,
                corpus: self.corpus,
                input: self.input,
                region: self.region,
                r_max: self.r_max,
                out: self.out,
            },
        )
    }
}

/// Exit code for a pipeline error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::CaseHypothesisFails(_) => exit::INCONCLUSIVE,
        Error::MaximizerDiverged { .. }
        | Error::NonIntegrableSingularity { .. }
        | Error::OnBoundary { .. }
        | Error::OutsideDomain { .. }
        | Error::TooCoarse { .. }
        | Error::Indistinguishable { .. } => exit::NUMERIC,
        Error::NonYoung(_)
        | Error::EmptyDomain
        | Error::Precondition(_)
        | Error::UnsupportedDimension(_)
        | Error::Invalid(_)
        | Error::Io { .. }
        | Error::Csv { .. } => exit::CONFIG,
    }
}

/// Parses arguments, runs the selected pipeline, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let command = match cli.command {
        Command::Young(YoungCommand::Inspect) => Subcommand::YoungInspect,
        Command::Kernel(KernelCommand::Check) => Subcommand::KernelCheck,
        Command::Rearrange => Subcommand::Rearrange,
        Command::Seminorm => Subcommand::Seminorm,
        Command::Counterexample => Subcommand::Counterexample,
        Command::Compare => Subcommand::Compare,
        Command::Classify => Subcommand::Classify,
    };
    let (config_path, overrides) = cli.shared.into_overrides();
    let outcome = config_path
        .as_deref()
        .map_or_else(|| Ok(ConfigFile::default()), ConfigFile::load)
        .and_then(|file| ExperimentConfig::resolve(command, overrides, &file))
        .and_then(|config| run(&config));
    match outcome {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Invalid(_)) && e.to_string().contains("domain is required") {
                eprintln!("usage: fracsym {} --domain \"box(0,1)+box(2,4)\" [OPTIONS]  (see --help)", command.label());
            }
            exit_code(&e)
        }
    }
}

/// Exit code plus the human-readable summary that also went to `report.txt`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

/// Dispatches one configured run and writes `report.csv`, `report.txt` and, where defined, `curves.csv`.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    fs::create_dir_all(&config.out).map_err(|source| Error::Io { path: config.out.clone(), source })?;
    let spec = config.cubature()?;
    let outcome = spec.install(|| match config.command {
        Subcommand::YoungInspect => young_inspect(config),
        Subcommand::KernelCheck => kernel_check(config),
        Subcommand::Rearrange => rearrange(config),
        Subcommand::Seminorm => seminorm(config),
        Subcommand::Counterexample => counterexample(config),
        Subcommand::Compare => compare(config),
        Subcommand::Classify => classify(config),
    })??;
    io::write_summary(&config.out.join("report.txt"), &config.echo(), &outcome.summary)?;
    Ok(outcome)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn young_inspect(config: &ExperimentConfig) -> Result<Outcome> {
    let y = config.young()?;
    let grid = log_grid(1e-6, 1e6, 20);
    let (pm, pp) = exponent_bounds(&y, &grid)?;
    let delta2 = delta2_constant(&y, &grid)?;
    let probe = log_grid(1e-3, 1e3, 16);
    let mut residual: f64 = 0.0;
    let mut curves = Vec::with_capacity(probe.len());
    for &t in &probe {
        residual = residual.max(legendre_identity_residual(&y, t)?);
        curves.push(vec![t, y.eval(t), y.density(t), complementary(&y, t)?]);
    }
    let bound = 2f64.powf(y.p_plus());
    io::write_rows(
        &config.out.join("report.csv"),
        &[
            "young",
            "p_minus_declared",
            "p_plus_declared",
            "p_minus_sampled",
            "p_plus_sampled",
            "delta2",
            "delta2_bound",
            "legendre_residual",
        ],
        &[vec![
            y.to_string(),
            fmt_num(y.p_minus()),
            fmt_num(y.p_plus()),
            fmt_num(pm),
            fmt_num(pp),
            fmt_num(delta2),
            fmt_num(bound),
            fmt_num(residual),
        ]],
    )?;
    io::emit_curves(&config.out.join("curves.csv"), &["t", "G", "g", "G_conjugate"], &curves)?;
    let mut s = String::new();
    writeln!(s, "Young function: {y}").unwrap();
    writeln!(s, "p- = {:.6} (sampled {pm:.6})", y.p_minus()).unwrap();
    writeln!(s, "p+ = {:.6} (sampled {pp:.6})", y.p_plus()).unwrap();
    writeln!(s, "Delta2 constant = {delta2:.6} (bound 2^p+ = {bound:.6}): {}", verdict(delta2 <= bound * (1.0 + 1e-9)))
        .unwrap();
    writeln!(s, "max Legendre residual over [1e-3, 1e3] = {residual:.3e}").unwrap();
    Ok(Outcome { code: exit::OK, summary: s })
}

fn kernel_check(config: &ExperimentConfig) -> Result<Outcome> {
    let y = config.young()?;
    let k = config.kernel()?;
    let r = kernel_conditions_check(&k, y.p_minus(), config.dim, config.r_max)?;
    io::write_rows(
        &config.out.join("report.csv"),
        &[
            "kernel",
            "p_minus",
            "dim",
            "monotone_positive",
            "lower_bound",
            "integrable",
            "near_integral",
            "far_integral",
        ],
        &[vec![
            k.name().to_string(),
            fmt_num(y.p_minus()),
            config.dim.to_string(),
            r.monotone_positive.to_string(),
            r.lower_bound.to_string(),
            r.integrable.to_string(),
            fmt_num(r.near_integral.value),
            fmt_num(r.far_integral.value),
        ]],
    )?;
    let mut s = String::new();
    writeln!(s, "kernel {} with p- = {:.6}, N = {}", k.name(), y.p_minus(), config.dim).unwrap();
    writeln!(s, "monotone and positive: {}", r.monotone_positive).unwrap();
    writeln!(s, "M(r) >= min(1, r): {}", r.lower_bound).unwrap();
    writeln!(
        s,
        "integrability: {} (near {:.6e}, far {:.6e})",
        r.integrable, r.near_integral.value, r.far_integral.value
    )
    .unwrap();
    Ok(Outcome { code: exit::OK, summary: s })
}

fn input_grid(config: &ExperimentConfig) -> Result<crate::geometry::GridFunction> {
    let path = config.input.as_ref().ok_or_else(|| Error::Invalid("--input FILE is required".into()))?;
    read_grid(path)
}

fn rearrange(config: &ExperimentConfig) -> Result<Outcome> {
    let u = input_grid(config)?;
    let v = schwarz_rearrange(&u)?;
    write_grid(&config.out.join("rearranged.csv"), &v)?;
    let sorted = |g: &crate::geometry::GridFunction| {
        let mut xs: Vec<f64> = g.values().iter().copied().filter(|&x| x > 0.0).collect();
        xs.sort_by(f64::total_cmp);
        xs
    };
    let equimeasurable = sorted(&u) == sorted(&v);
    io::write_rows(
        &config.out.join("report.csv"),
        &["cells_in", "cells_out", "support_cells", "max_value", "equimeasurable"],
        &[vec![
            u.len().to_string(),
            v.len().to_string(),
            u.support_cells().len().to_string(),
            fmt_num(u.max_value()),
            equimeasurable.to_string(),
        ]],
    )?;
    let summary = format!(
        "rearranged {} support cells onto {} cells centered at the origin; equimeasurable: {equimeasurable}\n",
        u.support_cells().len(),
        v.len()
    );
    Ok(Outcome { code: exit::OK, summary })
}

fn seminorm(config: &ExperimentConfig) -> Result<Outcome> {
    let u = input_grid(config)?;
    let spec = config.cubature()?;
    let req = SeminormRequest {
        u: Ladder::from_grid(u, config.levels),
        young: config.young()?,
        kernel: config.kernel()?,
        region: match config.region {
            RegionChoice::Domain => Region::Domain(config.require_domain()?.clone()),
            RegionChoice::FullSpace => Region::FullSpace,
            RegionChoice::Cross => Region::Cross(config.require_domain()?.clone()),
        },
        spec,
    };
    let est = match &req.region {
        Region::Domain(_) => seminorm_domain(&req)?,
        Region::FullSpace => seminorm_fullspace(&req)?,
        Region::Cross(_) => cross_term(&req)?,
    };
    let resolution = est.metadata.resolutions.last().copied().unwrap_or(0);
    let rt = est.metadata.truncation_radius.map_or_else(|| "none".to_string(), fmt_num);
    io::write_rows(
        &config.out.join("report.csv"),
        &["value", "error_bound", "resolution", "R_t"],
        &[vec![fmt_num(est.value), fmt_num(est.error_bound), resolution.to_string(), rt.clone()]],
    )?;
    let summary =
        format!("seminorm = {:.12e} +/- {:.3e} (resolution {resolution}, R_t {rt})\n", est.value, est.error_bound);
    Ok(Outcome { code: exit::OK, summary })
}

fn counterexample(config: &ExperimentConfig) -> Result<Outcome> {
    let domain = config.require_domain()?;
    let y = config.young()?;
    let options = CounterexampleOptions {
        bump: None,
        ball_case: config.ball_case,
        epsilons: config.epsilons.clone(),
        pass_factor: config.pass_factor,
    };
    let r = verify_counterexample(domain, &y, config.s, &options, &config.cubature()?)?;
    let header = [
        "epsilon",
        "lhs",
        "lhs_error",
        "rhs",
        "rhs_error",
        "margin",
        "combined_error",
        "verdict",
        "cross",
        "cross_error",
        "cross_star",
        "cross_star_error",
        "full",
        "full_error",
        "full_star",
        "full_star_error",
        "identity_residual",
        "identity_bound",
        "direction_ok",
        "restriction_ok",
    ];
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                fmt_num(row.epsilon),
                fmt_num(row.lhs.value),
                fmt_num(row.lhs.error_bound),
                fmt_num(row.rhs.value),
                fmt_num(row.rhs.error_bound),
                fmt_num(row.margin),
                fmt_num(row.combined_error),
                if row.pass { "PASS" } else { "no-pass" }.to_string(),
                fmt_num(row.cross.value),
                fmt_num(row.cross.error_bound),
                fmt_num(row.cross_star.value),
                fmt_num(row.cross_star.error_bound),
                fmt_num(row.full.value),
                fmt_num(row.full.error_bound),
                fmt_num(row.full_star.value),
                fmt_num(row.full_star.error_bound),
                fmt_num(row.identity_residual),
                fmt_num(row.identity_bound),
                row.direction_ok.to_string(),
                row.restriction_ok.to_string(),
            ]
        })
        .collect();
    io::write_rows(&config.out.join("report.csv"), &header, &rows)?;
    let curves: Vec<Vec<f64>> =
        r.rows.iter().map(|row| vec![row.epsilon, row.lhs.value, row.rhs.value, row.margin]).collect();
    io::emit_curves(&config.out.join("curves.csv"), &["epsilon", "lhs", "rhs", "margin"], &curves)?;

    let mut s = String::new();
    writeln!(s, "domain {} -> symmetrized {}", r.domain, r.symmetrized).unwrap();
    writeln!(
        s,
        "bump center {:?}, outer radius {:.6}, {} branch, {}, s = {}",
        r.bump.center,
        r.bump.outer_radius,
        if r.bump.ball_case { "ball" } else { "inscribed-ball" },
        r.young,
        r.s
    )
    .unwrap();
    for row in &r.rows {
        writeln!(
            s,
            "eps = {:.6e}: I_D = {:.9e}, I_D* = {:.9e}, margin = {:.3e}, error = {:.3e}  {}",
            row.epsilon,
            row.lhs.value,
            row.rhs.value,
            row.margin,
            row.combined_error,
            if row.pass { "PASS" } else { "no pass" }
        )
        .unwrap();
    }
    writeln!(
        s,
        "tail H = {:.6e} +/- {:.1e} vs H* = {:.6e} +/- {:.1e}: {}",
        r.tail.value,
        r.tail.error_bound,
        r.tail_star.value,
        r.tail_star.error_bound,
        if r.tail_distinguished() { "distinguished" } else { "not distinguished" }
    )
    .unwrap();
    writeln!(s, "rearranged bump matches the origin-centered profile exactly: {}", r.rearrangement_exact).unwrap();
    let code = match r.smallest_passing_epsilon() {
        Some(e) => {
            writeln!(s, "verdict: PASS (smallest passing eps = {e:.6e})").unwrap();
            exit::OK
        }
        None => {
            writeln!(s, "verdict: NO PASS").unwrap();
            exit::NO_PASS
        }
    };
    Ok(Outcome { code, summary: s })
}

fn default_corpus(config: &ExperimentConfig) -> Result<Vec<Ladder>> {
    let domain = config.require_domain()?;
    let ball = inscribed_ball(domain, config.resolution)?;
    let mut corpus = Vec::new();
    for (k, width) in [1.0, 0.75, 0.5, 0.25].into_iter().enumerate() {
        let c = ball.center.clone();
        let w = width * ball.radius;
        let power = 1.0 + k as f64 * 0.5;
        let f: PointFn = Arc::new(move |x: &[f64]| {
            let r = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (1.0 - r / w).max(0.0).powf(power)
        });
        corpus.push(sample_on_domain(domain, config.resolution, config.levels, f)?);
    }
    Ok(corpus)
}

fn compare(config: &ExperimentConfig) -> Result<Outcome> {
    let domain = config.require_domain()?;
    let y = config.young()?;
    let corpus = if config.corpus.is_empty() {
        default_corpus(config)?
    } else {
        config
            .corpus
            .iter()
            .map(|p| read_grid(p).map(|u| Ladder::from_grid(u, config.levels)))
            .collect::<Result<Vec<_>>>()?
    };
    let r = verify_comparison(domain, &y, config.s, config.case, &corpus, &config.cubature()?)?;
    let header = [
        "index",
        "domain",
        "domain_error",
        "full",
        "full_error",
        "full_star",
        "full_star_error",
        "rho",
        "polya_szego_ok",
        "cross",
        "cross_error",
        "hardy_a",
        "hardy_ratio",
        "chain_checked",
        "chain_violations",
    ];
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.index.to_string(),
                fmt_num(row.domain.value),
                fmt_num(row.domain.error_bound),
                fmt_num(row.full.value),
                fmt_num(row.full.error_bound),
                fmt_num(row.full_star.value),
                fmt_num(row.full_star.error_bound),
                fmt_num(row.rho),
                row.polya_szego_ok.to_string(),
                fmt_num(row.cross.value),
                fmt_num(row.cross.error_bound),
                fmt_num(row.hardy.a),
                fmt_num(row.hardy.ratio()),
                row.hardy.chain_checked.to_string(),
                row.hardy.chain_violations.to_string(),
            ]
        })
        .collect();
    io::write_rows(&config.out.join("report.csv"), &header, &rows)?;
    let curves: Vec<Vec<f64>> = r.rows.iter().map(|row| vec![row.index as f64, row.rho]).collect();
    io::emit_curves(&config.out.join("curves.csv"), &["index", "rho"], &curves)?;
    let mut s = String::new();
    writeln!(s, "case {} on {} with {}, s = {}", r.case as u8, domain, y, config.s).unwrap();
    for row in &r.rows {
        writeln!(
            s,
            "u[{}]: rho = {:.6e}, Polya-Szego step {}, Hardy ratio {:.6e}",
            row.index,
            row.rho,
            if row.polya_szego_ok { "ok" } else { "VIOLATED" },
            row.hardy.ratio()
        )
        .unwrap();
    }
    writeln!(s, "empirical lower bound for the comparison constant: {:.6e}", r.empirical_lower_bound()).unwrap();
    writeln!(s, "all ratios finite: {}", r.all_finite()).unwrap();
    Ok(Outcome { code: exit::OK, summary: s })
}

fn classify(config: &ExperimentConfig) -> Result<Outcome> {
    let y = config.young()?;
    let grid = log_grid(1e-8, 1e8, 4);
    let probe = LambdaProbe::default();
    let zero = beta_curve(&y, config.s, &probe.toward_zero(), &grid)?;
    let inf = beta_curve(&y, config.s, &probe.toward_infinity(), &grid)?;
    let mut curves: Vec<Vec<f64>> = zero.lambdas.iter().zip(&zero.betas).map(|(&l, &b)| vec![l, b]).collect();
    curves.extend(inf.lambdas.iter().zip(&inf.betas).skip(1).map(|(&l, &b)| vec![l, b]));
    curves.sort_by(|a, b| a[0].total_cmp(&b[0]));
    io::emit_curves(&config.out.join("curves.csv"), &["lambda", "beta"], &curves)?;
    let outcome = classify_theorem2_case(&y, config.s, config.dim, config.case, &probe, &grid);
    let (label, code) = match &outcome {
        Ok(true) => ("true", exit::OK),
        Ok(false) => ("false", exit::OK),
        Err(Error::Inconclusive(_)) => ("inconclusive", exit::INCONCLUSIVE),
        Err(e) => return Err(Error::Invalid(e.to_string())),
    };
    io::write_rows(
        &config.out.join("report.csv"),
        &["young", "s", "dim", "case", "verdict"],
        &[vec![
            y.to_string(),
            fmt_num(config.s),
            config.dim.to_string(),
            (config.case as u8).to_string(),
            label.into(),
        ]],
    )?;
    let summary =
        format!("case {} hypothesis for {y}, s = {}, N = {}: {label}\n", config.case as u8, config.s, config.dim);
    Ok(Outcome { code, summary })
}
