use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vcs_kit::matrixdomain::PolarQuaternion;
use vcs_kit::suite::{dump_state, run_suite, write_reports, ReportFormat, SuiteConfig, SuiteError};
use vcs_kit::vcs::Family;

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "vcs-kit", version, about = "Vector coherent states over matrix domains: construction and certification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the certification battery for one family; exit code = failed checks.
    Verify(CommonArgs),
    /// Write one state's coefficients and its kernel row against the origin.
    DumpState(DumpArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file with SuiteConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = Family::from_name)]
    family: Option<Family>,
    /// Weight parameter κ (2κ must be an integer ≥ 2; ignored by canonical).
    #[arg(long)]
    kappa: Option<f64>,
    /// Internal-space dimension (only n = 2 is implemented).
    #[arg(long)]
    n: Option<usize>,
    /// Fock truncation.
    #[arg(long = "M")]
    modes: Option<usize>,
    /// Highest mode index certified by the quadrature checks.
    #[arg(long = "M-check")]
    m_check: Option<usize>,
    /// Radial quadrature size parameter.
    #[arg(long)]
    grid_r: Option<usize>,
    /// ζ-circle node count.
    #[arg(long)]
    grid_zeta: Option<usize>,
    /// Internal-sphere grid as PHIxPSI, e.g. 32x64.
    #[arg(long, value_parser = parse_sphere)]
    grid_sphere: Option<(usize, usize)>,
    /// Label-radius ceiling for sampled states.
    #[arg(long)]
    rmax: Option<f64>,
    /// Base tolerance applied to every check without an override.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report stream to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<ReportFormat>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Label radius.
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Eigenvalue phase θ.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Internal-axis polar angle φ.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Internal-axis azimuth ψ.
    #[arg(long, default_value_t = 0.0)]
    psi: f64,
    /// Internal component index j.
    #[arg(long, default_value_t = 0)]
    j: usize,
}

fn parse_sphere(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X', ','])
        .ok_or_else(|| format!("expected PHIxPSI, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size `{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn build_config(args: &CommonArgs) -> Result<SuiteConfig, SuiteError> {
    let mut cfg = match &args.config {
        Some(path) => SuiteConfig::from_file(path)?,
        None => SuiteConfig::default(),
    };
    if let Some(f) = args.family {
        cfg.family = f;
    }
    if let Some(k) = args.kappa {
        cfg.kappa = k;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.modes {
        cfg.modes = m;
    }
    if let Some(mc) = args.m_check {
        cfg.m_check = mc;
    }
    if let Some(g) = args.grid_r {
        cfg.grid_r = g;
    }
    if let Some(g) = args.grid_zeta {
        cfg.grid_zeta = g;
    }
    if let Some(g) = args.grid_sphere {
        cfg.grid_sphere = g;
    }
    if args.rmax.is_some() {
        cfg.rmax = args.rmax;
    }
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn verify(args: &CommonArgs) -> Result<u8, SuiteError> {
    let cfg = build_config(args)?;
    let outcome = run_suite(&cfg)?;
    let mut stdout = std::io::stdout().lock();
    write_reports(&outcome.reports, cfg.format, &mut stdout)?;
    stdout.flush()?;
    if let Some(path) = &cfg.out {
        let mut file = File::create(path)?;
        write_reports(&outcome.reports, cfg.format, &mut file)?;
    }
    eprintln!(
        "{}/{} checks passed ({} family, M = {})",
        outcome.reports.len() - outcome.failed,
        outcome.reports.len(),
        cfg.family.name(),
        cfg.modes
    );
    Ok(outcome.failed.min(u8::MAX as usize) as u8)
}

fn dump(args: &DumpArgs) -> Result<u8, SuiteError> {
    let cfg = build_config(&args.common)?;
    let label = PolarQuaternion { r: args.r, theta: args.theta, phi: args.phi, psi: args.psi };
    let doc = dump_state(&cfg, &label, args.j)?;
    let text = serde_json::to_string_pretty(&doc)?;
    match &cfg.out {
        Some(path) => {
            let mut file = File::create(path)?;
            file.write_all(text.as_bytes())?;
            file.write_all(b"\n")?;
        }
        None => println!("{text}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.cmd {
        Cmd::Verify(args) => verify(args),
        Cmd::DumpState(args) => dump(args),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
