//! `dissq` command-line driver.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 configuration error,
//! 3 numerical failure. Every error prints one JSON line on stderr.

mod config;

use std::fs;
use std::io::{IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dissq::bifurcation::{scan, LambdaSign, ScanOptions, ScanResult};
use dissq::io::{self, complex_to_json, matrix_to_json};
use dissq::reproduce::{self, ReproduceOptions, DEFAULT_SEED};
use dissq::stationary::{
    check_margin, count_near_zero, evolve, fock_scan, null_space, spectrum, EvolveOptions, DEFAULT_SVD_TOL,
};
use dissq::{DensityMatrix, FockSpace, LiouvillianModel, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use config::{Format, InitialState, RunConfig, TaskBlock};

const DEFAULT_REPORT_TOL: f64 = 1e-10;
const DEFAULT_SPECTRUM_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "dissq", version, about = "Stationary states of dissipative oscillator systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fock-projector residuals and stationarity-function zeros.
    Report(Common),
    /// Fold normal-form scan over a parameter grid.
    Scan(Common),
    /// Fixed-step RK4 evolution with conservation monitors.
    Evolve(Common),
    /// Numerical kernel of the generator.
    Nullspace(Common),
    /// Eigenvalues of the generator.
    Spectrum(Common),
    /// Run every acceptance check and print a summary.
    ReproducePaper(ReproduceArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON config file; `-` reads standard input.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the task tolerance.
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
    /// Overrides space.dim.
    #[arg(long, value_name = "INT")]
    dim: Option<usize>,
    /// Seed for randomized states and property checks.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated criterion ids, keys or tags (e.g. `fold`, `1,3`).
    #[arg(long, value_name = "LIST")]
    only: Option<String>,
    /// Which λ expression the fold criteria use.
    #[arg(long, value_enum)]
    lambda_sign: Option<SignArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SignArg {
    Corrected,
    Printed,
}

impl From<SignArg> for LambdaSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Corrected => LambdaSign::Corrected,
            SignArg::Printed => LambdaSign::Printed,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Acceptance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Acceptance(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Acceptance(_) => "acceptance",
            Failure::Config(_) => "config",
            Failure::Numerical(_) => "numerical",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Acceptance(m) => m,
        }
    }
}

impl From<dissq::Error> for Failure {
    fn from(e: dissq::Error) -> Self {
        use dissq::Error::*;
        match e {
            NotDiagonal(_) | Decomposition(_) | StepRejected { .. } | NotPotential(_) | Serialization(_) => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            return report_failure(&Failure::Config(first));
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    let line = json!({"error": f.kind(), "exit_code": f.code(), "message": f.message()});
    eprintln!("{line}");
    ExitCode::from(f.code())
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Report(c) => cmd_report(&c, load_config(&c)?),
        Command::Scan(c) => cmd_scan(&c, load_config(&c)?),
        Command::Evolve(c) => cmd_evolve(&c, load_config(&c)?),
        Command::Nullspace(c) => cmd_nullspace(&c, load_config(&c)?),
        Command::Spectrum(c) => cmd_spectrum(&c, load_config(&c)?),
        Command::ReproducePaper(r) => {
            let cfg = load_config(&r.common)?;
            cmd_reproduce_paper(&r, cfg)
        }
    }
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let text = match &c.config {
        Some(p) if p.as_os_str() == "-" => read_stdin()?,
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", p.display())))?,
        None if !std::io::stdin().is_terminal() => read_stdin()?,
        None => String::new(),
    };
    config::parse(&text).map_err(|e| Failure::Config(format!("config: {e}")))
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::Config(format!("cannot read standard input: {e}")))?;
    Ok(s)
}

/// Task block for `expected`, or `None` when the config has none.
fn task_for<'a>(cfg: &'a RunConfig, expected: &str) -> Result<Option<&'a TaskBlock>, Failure> {
    match &cfg.task {
        Some(t) if t.name() != expected => Err(Failure::Config(format!(
            "config task kind '{}' does not match subcommand '{}'",
            t.name(),
            expected
        ))),
        other => Ok(other.as_ref()),
    }
}

fn dim_of(c: &Common, cfg: &RunConfig) -> Result<usize, Failure> {
    c.dim
        .or(cfg.space.as_ref().and_then(|s| s.dim))
        .ok_or_else(|| Failure::Config("space.dim is required (config or --dim)".into()))
}

fn space_of(c: &Common, cfg: &RunConfig) -> Result<FockSpace, Failure> {
    let dim = dim_of(c, cfg)?;
    let b = cfg.space.clone().unwrap_or_default();
    Ok(FockSpace::new(dim, b.hbar.unwrap_or(1.0), b.mass.unwrap_or(1.0), b.omega.unwrap_or(1.0))?)
}

fn model_of(space: FockSpace, cfg: &RunConfig) -> Result<LiouvillianModel, Failure> {
    let params = cfg.model.as_ref().ok_or_else(|| Failure::Config("model block is required".into()))?;
    Ok(LiouvillianModel::build(space, params)?)
}

fn format_of(c: &Common, cfg: &RunConfig) -> Format {
    c.format.or(cfg.output.as_ref().and_then(|o| o.format)).unwrap_or(Format::Csv)
}

fn emit(c: &Common, cfg: &RunConfig, bytes: &[u8]) -> Outcome {
    let path = c.out.clone().or(cfg.output.as_ref().and_then(|o| o.path.as_ref().map(PathBuf::from)));
    match path {
        Some(p) => fs::write(&p, bytes).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Failure::Config(format!("stdout: {e}")))
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Config(format!("{name} must be a positive finite number, got {v}")))
    }
}

fn cmd_report(c: &Common, cfg: RunConfig) -> Outcome {
    let (n_max, tol) = match task_for(&cfg, "report")? {
        Some(TaskBlock::Report { n_max, tol }) => (*n_max, *tol),
        _ => (None, None),
    };
    let dim = dim_of(c, &cfg)?;
    // The margin rule is checked before the space so tiny dims name it.
    let n_max = match n_max {
        Some(n) => n,
        None => dim.checked_sub(5).ok_or(dissq::Error::Margin { n_max: 0, limit: dim as i64 - 5 })?,
    };
    check_margin(dim, n_max)?;
    let tol = positive("tol", c.tol.or(tol).unwrap_or(DEFAULT_REPORT_TOL))?;
    let model = model_of(space_of(c, &cfg)?, &cfg)?;
    let report = fock_scan(&model, n_max, tol)?;
    let bytes = match format_of(c, &cfg) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_report_csv(&report, &mut buf)?;
            buf
        }
        Format::Json => io::to_json_string(&report)?.into_bytes(),
    };
    emit(c, &cfg, &bytes)
}

fn cmd_scan(c: &Common, cfg: RunConfig) -> Outcome {
    if let Some(m) = &cfg.model {
        if !matches!(m, ModelParams::Fold(_)) {
            return Err(Failure::Config(format!("scan requires the fold model family, got '{}'", m.kind())));
        }
    }
    let Some(TaskBlock::Scan { grid, tol, n_max, lambda_sign }) = task_for(&cfg, "scan")? else {
        return Err(Failure::Config("scan needs a task block with kind \"scan\" and a grid".into()));
    };
    let mut opts = ScanOptions::new(*grid);
    opts.n_max = *n_max;
    opts.lambda_sign = lambda_sign.unwrap_or_default();
    if let Some(t) = c.tol.or(*tol) {
        opts.tol = positive("tol", t)?;
    }
    let dim = dim_of(c, &cfg)?;
    if let Some(n) = opts.n_max {
        check_margin(dim, n)?;
    }
    let result: ScanResult = scan(&space_of(c, &cfg)?, &opts)?;
    let bytes = match format_of(c, &cfg) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_scan_csv(&result, &mut buf)?;
            buf
        }
        Format::Json => io::to_json_string(&result)?.into_bytes(),
    };
    emit(c, &cfg, &bytes)
}

fn cmd_evolve(c: &Common, cfg: RunConfig) -> Outcome {
    let Some(TaskBlock::Evolve { t_final, dt, record_every, initial }) = task_for(&cfg, "evolve")? else {
        return Err(Failure::Config("evolve needs a task block with kind \"evolve\", t_final and dt".into()));
    };
    let space = space_of(c, &cfg)?;
    let model = model_of(space, &cfg)?;
    let rho0 = match initial.clone().unwrap_or(InitialState::Fock { n: 0 }) {
        InitialState::Fock { n } => dissq::fock::fock_projector(space, n)?,
        InitialState::Superposition { n, m } => DensityMatrix::superposition(space, n, m)?,
        InitialState::MaximallyMixed { levels } => DensityMatrix::maximally_mixed(space, levels)?,
        InitialState::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed.or(seed).unwrap_or(DEFAULT_SEED));
            DensityMatrix::random(space, &mut rng)
        }
    };
    let opts = EvolveOptions { record_every: record_every.unwrap_or(1), ..EvolveOptions::new(*t_final, *dt) };
    let trace = evolve(&model, &rho0, &opts)?;
    let bytes = match format_of(c, &cfg) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_trace_csv(&trace, &mut buf)?;
            buf
        }
        Format::Json => {
            let mut v = serde_json::to_value(&trace).map_err(dissq::Error::from)?;
            if let Some(fin) = &trace.final_state {
                v["final_state"] = matrix_to_json(fin);
            }
            io::to_json_string(&v)?.into_bytes()
        }
    };
    emit(c, &cfg, &bytes)
}

fn cmd_nullspace(c: &Common, cfg: RunConfig) -> Outcome {
    let svd_tol = match task_for(&cfg, "nullspace")? {
        Some(TaskBlock::Nullspace { svd_tol }) => *svd_tol,
        _ => None,
    };
    let svd_tol = positive("svd_tol", c.tol.or(svd_tol).unwrap_or(DEFAULT_SVD_TOL))?;
    let model = model_of(space_of(c, &cfg)?, &cfg)?;
    let kernel = null_space(&model, svd_tol)?;
    let bytes = match format_of(c, &cfg) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_kernel_csv(&kernel, &mut buf)?;
            buf
        }
        Format::Json => {
            let v = json!({
                "model": model.kind.as_str(),
                "dimension": kernel.dimension(),
                "hermitian": kernel.hermitian,
                "threshold": kernel.threshold,
                "singular_values": kernel.singular_values,
                "elements": kernel.elements.iter().map(matrix_to_json).collect::<Vec<_>>(),
            });
            io::to_json_string(&v)?.into_bytes()
        }
    };
    emit(c, &cfg, &bytes)
}

fn cmd_spectrum(c: &Common, cfg: RunConfig) -> Outcome {
    let tol = match task_for(&cfg, "spectrum")? {
        Some(TaskBlock::Spectrum { tol }) => *tol,
        _ => None,
    };
    let tol = positive("tol", c.tol.or(tol).unwrap_or(DEFAULT_SPECTRUM_TOL))?;
    let model = model_of(space_of(c, &cfg)?, &cfg)?;
    let eig = spectrum(&model)?;
    let bytes = match format_of(c, &cfg) {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_spectrum_csv(&eig, &mut buf)?;
            buf
        }
        Format::Json => {
            let v = json!({
                "model": model.kind.as_str(),
                "near_zero": count_near_zero(&eig, tol),
                "tol": tol,
                "eigenvalues": eig.iter().map(|z| complex_to_json(*z)).collect::<Vec<_>>(),
            });
            io::to_json_string(&v)?.into_bytes()
        }
    };
    emit(c, &cfg, &bytes)
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn cmd_reproduce_paper(r: &ReproduceArgs, cfg: RunConfig) -> Outcome {
    let c = &r.common;
    let (only, sign, seed) = match task_for(&cfg, "reproduce_paper")? {
        Some(TaskBlock::ReproducePaper { only, lambda_sign, seed }) => (only.clone(), *lambda_sign, *seed),
        _ => (None, None, None),
    };
    let only = match r.only.clone().or(only) {
        Some(spec) => reproduce::parse_selection(&spec)?,
        None => Vec::new(),
    };
    let opts = ReproduceOptions {
        only,
        lambda_sign: r.lambda_sign.map(LambdaSign::from).or(sign).unwrap_or_default(),
        seed: c.seed.or(seed).unwrap_or(DEFAULT_SEED),
    };
    let report = reproduce::run(&opts)?;
    let bytes = match c.format.or(cfg.output.as_ref().and_then(|o| o.format)) {
        None => reproduce::render_text(&report).into_bytes(),
        Some(Format::Json) => io::to_json_string(&report)?.into_bytes(),
        Some(Format::Csv) => {
            let mut s = String::from("id,key,passed,measured,expected\n");
            for o in &report.outcomes {
                s.push_str(&format!("{},{},{},{},{}\n", o.id, o.key, o.passed, csv_field(&o.measured), csv_field(&o.expected)));
            }
            s.into_bytes()
        }
    };
    emit(c, &cfg, &bytes)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
        Err(Failure::Acceptance(format!("criteria failed: {}", failed.join(","))))
    }
}
