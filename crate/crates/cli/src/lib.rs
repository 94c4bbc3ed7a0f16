//! `stablecut` command line.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 a requested
//! guarantee was not met, 4 an instance exceeds the exhaustive-search limit.

pub mod bench;
pub mod report;
pub mod solvers;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use stablecut::dual::DualConfig;
use stablecut::generators::{
    amplified_cut, cross_product_amplify, gen_gnp_simple, gen_planted, stabilize_with_jitter,
    WeightDistribution,
};
use stablecut::io::{parse_graph, write_graph, InstanceSidecar};
use stablecut::oracle::{stability_gamma, OracleConfig, DEFAULT_ORACLE_LIMIT};
use stablecut::spectral::{eigenvalues, spectral_partition, SymMatrix};
use stablecut::{Error, WeightedGraph};

use report::{
    Conditions, InstanceInfo, OracleSection, RunReport, SolverResult, SpectrumReport, Tolerances,
    VerifyReport,
};
use solvers::{run_solver, SolverContext, SolverKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARANTEE: i32 = 3;
pub const EXIT_SIZE_LIMIT: i32 = 4;

/// Overrides the exhaustive-search vertex limit.
pub const ORACLE_LIMIT_ENV: &str = "STABLECUT_ORACLE_LIMIT";
/// The oracle runs by default up to this many vertices.
pub const AUTO_ORACLE_N: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "stablecut", version, about = "Generate, certify and solve stable Max-Cut instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph file and its JSON sidecar.
    Gen {
        #[command(subcommand)]
        model: GenCommand,
    },
    /// Run solvers and print a JSON report.
    Solve(SolveArgs),
    /// Exhaustive stability report.
    Verify(VerifyArgs),
    /// Eigenvalues and eigenvalue-based optimality conditions.
    Spectrum(SpectrumArgs),
    /// Recovery sweep over planted instances, as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Balanced planted cut with edges across it scaled by gamma.
    Planted(PlantedArgs),
    /// Unit-weight G(n, p).
    Gnp(GnpArgs),
    /// Scale the maximum-cut edges until the stability equals gamma.
    Scale(ScaleArgs),
    /// Two copies joined by a weighted matching, raising local stability.
    Amplify(AmplifyArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlantedArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub gamma: f64,
    /// constant:c, uniform:a:b or two_point:p:low:high.
    #[arg(long, default_value = "uniform:0.5:1.5")]
    pub dist: WeightDistribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct GnpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    /// Seeds the jitter used when the maximum cut is tied.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct AmplifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub tau: f64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverChoice {
    Greedy,
    Contract,
    Spectral,
    Dual,
    Oracle,
    All,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    /// Relative duality-gap tolerance.
    #[arg(long, default_value_t = stablecut::dual::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = stablecut::dual::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl DualArgs {
    fn config(&self) -> DualConfig {
        DualConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..DualConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverChoice::All)]
    pub solver: SolverChoice,
    /// Exit 3 unless some solver proves its cut maximal.
    #[arg(long)]
    pub require_certified: bool,
    #[command(flatten)]
    pub dual: DualArgs,
    /// Skip the jittered rerun of uncertified dual solves.
    #[arg(long)]
    pub no_jitter: bool,
    /// Record wall-clock times (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Include the greedy merge trace.
    #[arg(long)]
    pub trace: bool,
    /// Write the dual iteration log as CSV.
    #[arg(long)]
    pub dual_log: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub dual: DualArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,3")]
    pub gamma: Vec<f64>,
    #[arg(long, default_value = "uniform:0.5:1.5")]
    pub dist: WeightDistribution,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dual")]
    pub solver: Vec<SolverKind>,
    #[command(flatten)]
    pub dual: DualArgs,
    /// Report mean wall-clock milliseconds instead of `na`.
    #[arg(long)]
    pub timing: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Guarantee(String),
    SizeLimit(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Guarantee(_) => EXIT_GUARANTEE,
            CliError::SizeLimit(_) => EXIT_SIZE_LIMIT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Guarantee(m) | CliError::SizeLimit(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeLimit { .. } => CliError::SizeLimit(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

/// Parse arguments and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn oracle_config() -> CliResult<OracleConfig> {
    let limit = match std::env::var(ORACLE_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{ORACLE_LIMIT_ENV} must be a vertex count, got {v:?}")))?,
        Err(_) => DEFAULT_ORACLE_LIMIT,
    };
    Ok(OracleConfig::with_limit(limit))
}

/// Configuration for oracle work that runs without being asked for.
fn auto_oracle(cfg: &OracleConfig) -> OracleConfig {
    OracleConfig {
        limit: cfg.limit.min(AUTO_ORACLE_N),
        ..cfg.clone()
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let cfg = oracle_config()?;
    match cli.command {
        Command::Gen { model } => cmd_gen(model, &cfg, out),
        Command::Solve(a) => cmd_solve(a, &cfg, out),
        Command::Verify(a) => cmd_verify(a, &cfg, out),
        Command::Spectrum(a) => cmd_spectrum(a, &cfg, out),
        Command::Bench(a) => cmd_bench(a, &cfg, out),
    }
}

fn read_graph(path: &Path) -> CliResult<WeightedGraph> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_graph(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn sidecar_path(graph: &Path) -> PathBuf {
    graph.with_extension("json")
}

/// The sidecar next to `graph`, if one exists and matches it.
fn read_sidecar(graph: &Path, g: &WeightedGraph) -> CliResult<Option<InstanceSidecar>> {
    let p = sidecar_path(graph);
    if !p.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
    let s = InstanceSidecar::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
    s.check_against(g)?;
    Ok(Some(s))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}"))),
    }
}

fn write_instance(
    dir: &Path,
    stem: &str,
    g: &WeightedGraph,
    sidecar: &InstanceSidecar,
    out: &mut dyn Write,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let gp = dir.join(format!("{stem}.graph"));
    write_text(&gp, &write_graph(g))?;
    write_text(&sidecar_path(&gp), &sidecar.to_json())?;
    writeln!(out, "{}", gp.display()).map_err(|e| CliError::Usage(format!("stdout: {e}")))
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

/// Exact stability when the instance is small enough to enumerate quickly.
fn auto_gamma_star(g: &WeightedGraph, cfg: &OracleConfig) -> CliResult<Option<stablecut::ExtReal>> {
    let auto = auto_oracle(cfg);
    if g.n() > auto.limit {
        return Ok(None);
    }
    Ok(Some(stability_gamma(g, &auto)?.gamma_star))
}

fn cmd_gen(model: GenCommand, cfg: &OracleConfig, out: &mut dyn Write) -> CliResult<()> {
    match model {
        GenCommand::Planted(a) => {
            let inst = gen_planted(a.n, a.dist, a.gamma, a.seed)?;
            let sidecar = InstanceSidecar {
                model: "planted".into(),
                seed: Some(a.seed),
                params: [
                    ("n".to_string(), json!(a.n)),
                    ("gamma".to_string(), json!(a.gamma)),
                    ("dist".to_string(), json!(a.dist.to_string())),
                ]
                .into(),
                planted_cut: Some(inst.planted.clone()),
                gamma_star: auto_gamma_star(&inst.graph, cfg)?,
            };
            let stem = format!("planted_n{}_g{}_s{}", a.n, a.gamma, a.seed);
            write_instance(&a.out.output, &stem, &inst.graph, &sidecar, out)
        }
        GenCommand::Gnp(a) => {
            let g = gen_gnp_simple(a.n, a.p, a.seed)?;
            let sidecar = InstanceSidecar {
                model: "gnp".into(),
                seed: Some(a.seed),
                params: [("n".to_string(), json!(a.n)), ("p".to_string(), json!(a.p))].into(),
                planted_cut: None,
                gamma_star: auto_gamma_star(&g, cfg)?,
            };
            let stem = format!("gnp_n{}_p{}_s{}", a.n, a.p, a.seed);
            write_instance(&a.out.output, &stem, &g, &sidecar, out)
        }
        GenCommand::Scale(a) => {
            let g = read_graph(&a.input)?;
            let s = stabilize_with_jitter(&g, a.gamma, a.seed, cfg)?;
            let sidecar = InstanceSidecar {
                model: "scaled".into(),
                seed: Some(a.seed),
                params: [
                    ("source".to_string(), json!(file_stem(&a.input))),
                    ("gamma_target".to_string(), json!(a.gamma)),
                    ("factor".to_string(), json!(s.factor)),
                    ("jittered".to_string(), json!(s.jittered)),
                ]
                .into(),
                planted_cut: Some(s.max_cut.clone()),
                gamma_star: Some(s.gamma_after),
            };
            let stem = format!("{}_scaled", file_stem(&a.input));
            write_instance(&a.out.output, &stem, &s.graph, &sidecar, out)
        }
        GenCommand::Amplify(a) => {
            let g = read_graph(&a.input)?;
            let source = read_sidecar(&a.input, &g)?;
            let amplified = cross_product_amplify(&g, a.tau)?;
            let sidecar = InstanceSidecar {
                model: "amplified".into(),
                seed: source.as_ref().and_then(|s| s.seed),
                params: [
                    ("source".to_string(), json!(file_stem(&a.input))),
                    ("tau".to_string(), json!(a.tau)),
                ]
                .into(),
                planted_cut: source.and_then(|s| s.planted_cut).map(|c| amplified_cut(&c)),
                gamma_star: auto_gamma_star(&amplified, cfg)?,
            };
            let stem = format!("{}_amplified", file_stem(&a.input));
            write_instance(&a.out.output, &stem, &amplified, &sidecar, out)
        }
    }
}

fn cmd_solve(a: SolveArgs, cfg: &OracleConfig, out: &mut dyn Write) -> CliResult<()> {
    let g = read_graph(&a.input)?;
    let sidecar = read_sidecar(&a.input, &g)?;
    let explicit = a.solver != SolverChoice::All;
    let kinds: Vec<SolverKind> = match a.solver {
        SolverChoice::Greedy => vec![SolverKind::Greedy],
        SolverChoice::Contract => vec![SolverKind::Contract],
        SolverChoice::Spectral => vec![SolverKind::Spectral],
        SolverChoice::Dual => vec![SolverKind::Dual],
        SolverChoice::Oracle => vec![SolverKind::Oracle],
        SolverChoice::All => SolverKind::ALL.to_vec(),
    };
    if explicit && kinds[0] == SolverKind::Oracle && g.n() > cfg.limit {
        return Err(Error::SizeLimit { n: g.n(), limit: cfg.limit }.into());
    }
    if explicit && kinds[0] == SolverKind::Contract && !g.is_simple() {
        return Err(CliError::Usage("the contract solver needs a simple graph (all weights 1)".into()));
    }

    let auto = auto_oracle(cfg);
    let oracle = OracleSection::build(&g, &auto)?;
    let stability = oracle.stability();

    let mut dual = a.dual.config();
    dual.log = a.dual_log.is_some();
    let ctx = SolverContext {
        oracle: cfg,
        dual,
        jitter: !a.no_jitter,
        trace: a.trace,
    };

    let n = g.n() as f64;
    let degrees = g.degrees();
    let mut results = Vec::new();
    let mut best: Option<(f64, String, stablecut::Cut)> = None;
    for kind in kinds {
        if kind == SolverKind::Contract && !g.is_simple() {
            results.push(SolverResult::unavailable(kind.name(), "not_applicable", "graph is not simple".into()));
            continue;
        }
        if kind == SolverKind::Oracle && g.n() > cfg.limit {
            let reason = format!("n > limit ({} > {})", g.n(), cfg.limit);
            results.push(SolverResult::unavailable(kind.name(), "skipped", reason));
            continue;
        }
        let start = Instant::now();
        let o = run_solver(kind, &g, &ctx)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if let (Some(path), Some(x)) = (&a.dual_log, &o.dual) {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &x.dual.log {
                w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            fs::write(path, bytes).map_err(|e| io_err(path, e))?;
        }
        let guaranteed = stability.and_then(|s| {
            let gs = s.gamma_star.value();
            match kind {
                SolverKind::Greedy => Some(gs > (degrees.max_simple as f64 * n).sqrt()),
                SolverKind::Contract if degrees.min_simple > 0 => Some(gs >= 2.0 * n / degrees.min_simple as f64),
                SolverKind::Oracle => Some(true),
                _ => None,
            }
        });
        let matches_oracle = stability.map(|s| (o.value - s.max_value).abs() <= cfg.tie_tolerance * s.max_value.abs().max(1.0));
        if best.as_ref().map_or(true, |(v, _, _)| o.value > *v) {
            best = Some((o.value, kind.name().to_string(), o.cut.clone()));
        }
        results.push(SolverResult {
            solver: kind.name(),
            status: "ok",
            reason: None,
            cut: Some(o.cut),
            value: Some(o.value),
            wall_ms: a.timing.then_some(ms),
            certified: o.certified,
            guaranteed,
            matches_oracle,
            details: Some(o.details),
        });
    }

    let reference = match stability {
        Some(s) => Some(("oracle".to_string(), s.max_cut.clone())),
        None => best.map(|(_, name, cut)| (name, cut)),
    };
    let conditions = match reference {
        Some((name, cut)) => Some(Conditions::build(&g, &cut, name, &auto)?),
        None => None,
    };
    let any_certified = results.iter().any(|r| r.certified == Some(true));
    let report = RunReport {
        schema: report::RUN_SCHEMA,
        instance: InstanceInfo::new(a.input.display().to_string(), &g, sidecar),
        tolerances: Tolerances::new(cfg, Some(a.dual.tol)),
        solvers: results,
        oracle,
        conditions,
    };
    emit(&report::to_json(&report), a.output.as_deref(), out)?;
    if a.require_certified && !any_certified {
        return Err(CliError::Guarantee("no solver certified its cut as maximal".into()));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, cfg: &OracleConfig, out: &mut dyn Write) -> CliResult<()> {
    let g = read_graph(&a.input)?;
    if g.n() > cfg.limit {
        return Err(Error::SizeLimit { n: g.n(), limit: cfg.limit }.into());
    }
    let report = VerifyReport {
        schema: report::VERIFY_SCHEMA,
        instance: InstanceInfo::new(a.input.display().to_string(), &g, read_sidecar(&a.input, &g)?),
        tolerances: Tolerances::new(cfg, None),
        oracle: OracleSection::build(&g, cfg)?,
    };
    emit(&report::to_json(&report), a.output.as_deref(), out)
}

fn cmd_spectrum(a: SpectrumArgs, cfg: &OracleConfig, out: &mut dyn Write) -> CliResult<()> {
    let g = read_graph(&a.input)?;
    let auto = auto_oracle(cfg);
    let oracle = OracleSection::build(&g, &auto)?;
    let (name, cut) = match oracle.stability() {
        Some(s) => ("oracle".to_string(), s.max_cut.clone()),
        None => {
            let ctx = SolverContext {
                oracle: cfg,
                dual: a.dual.config(),
                jitter: true,
                trace: false,
            };
            ("dual".to_string(), run_solver(SolverKind::Dual, &g, &ctx)?.cut)
        }
    };
    let report = SpectrumReport {
        schema: report::SPECTRUM_SCHEMA,
        instance: InstanceInfo::new(a.input.display().to_string(), &g, read_sidecar(&a.input, &g)?),
        tolerances: Tolerances::new(cfg, Some(a.dual.tol)),
        eigenvalues: eigenvalues(&SymMatrix::shifted(&g, None)?),
        spectral_cut: spectral_partition(&g, None)?,
        conditions: Conditions::build(&g, &cut, name, &auto)?,
        oracle,
    };
    emit(&report::to_json(&report), a.output.as_deref(), out)
}

fn cmd_bench(a: BenchArgs, cfg: &OracleConfig, out: &mut dyn Write) -> CliResult<()> {
    let spec = bench::BenchSpec {
        ns: a.n,
        gammas: a.gamma,
        dist: a.dist,
        trials: a.trials,
        solvers: a.solver,
        seed: a.dual.seed,
        dual: a.dual.config(),
        timing: a.timing,
        auto_oracle_n: AUTO_ORACLE_N,
    };
    let rows = bench::run_bench(&spec, cfg)?;
    emit(&bench::to_csv(&rows), a.output.as_deref(), out)
}
