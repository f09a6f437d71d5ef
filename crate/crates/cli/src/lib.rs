//! The `irmrta` command line: forward and inverse solves, the grid
//! baseline, scenario generation, the benchmark harness and the HTTP
//! service.
//!
//! Exit status is 0 on success, 2 when the suggestion cannot be realized
//! (structurally invalid, or no parameters reproduce it) and 1 for usage,
//! I/O and malformed-input errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irmrta::bench::{median_normalized, run_bench, write_csv, BenchConfig};
use irmrta::io::{
    parse_instance_file, parse_suggestion_file, FieldError, InputError, InstanceFile, ResultFile,
};
use irmrta::scenario::{derived_geometry, Geometry, ScenarioConfig};
use irmrta::{
    generate_scenario, greedy_solve, grid_inverse, load_fixture_qualitative, solve_inverse,
    verify_forward, GridSpec, InverseConfig, InverseError, ModelError, Pair, RiskParams,
    Suggestion,
};
use irmrta_service::{ServiceConfig, DEFAULT_PORT};
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

/// Nominal parameters used when the instance file carries none.
pub const DEFAULT_NOMINAL: (f64, f64, f64) = (1.0, 1.0, 0.8);

#[derive(Debug, Parser)]
#[command(
    name = "irmrta",
    version,
    about = "Risk-aware task allocation and its inverse"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the greedy allocation and print it with its trace.
    Forward(ForwardArgs),
    /// Recover parameters that reproduce a suggested allocation.
    Inverse(InverseArgs),
    /// Grid-search baseline for the inverse problem.
    Oracle(OracleArgs),
    /// Generate a random scenario or emit the bundled fixture.
    Scenario(ScenarioArgs),
    /// Benchmark the inverse solver across sizes and depths.
    Bench(BenchArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    /// Instance file.
    #[arg(short, long = "instance", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    #[arg(short, long = "instance", value_name = "FILE")]
    pub input: PathBuf,
    /// Suggestion file: `{"pairs": [[robot, target], ...]}`.
    #[arg(short, long, value_name = "FILE")]
    pub suggestion: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Pruning tolerance; defaults to the gap bound at `--depth`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Also require the greedy to stop right after the suggestion.
    #[arg(long)]
    pub strict_stop: bool,
    /// Result file; stdout when absent.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short, long = "instance", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(short, long, value_name = "FILE")]
    pub suggestion: PathBuf,
    /// Grid points per axis as `NA,NB,ND`.
    #[arg(long, default_value = "50,50,50")]
    pub grid: GridArg,
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Qualitative,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub robots: Option<usize>,
    #[arg(long, required_unless_present = "fixture", conflicts_with = "fixture")]
    pub targets: Option<usize>,
    #[arg(long, default_value_t = 0, conflicts_with = "fixture")]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Instance file; the geometry goes next to it as `<stem>.geometry.json`.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    pub sizes: Vec<usize>,
    /// Inclusive range `LO:HI` or a list `D1,D2,...`.
    #[arg(long, default_value = "2:10")]
    pub depths: DepthsArg,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub csv: PathBuf,
    /// Concurrent trials; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value = "50,50,50")]
    pub grid: GridArg,
    /// Skip the grid baseline.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Allowed browser origin; any origin when absent.
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Concurrent inverse solves.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridArg(pub GridSpec);

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let n: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        let spec = match n[..] {
            [a, b, d] => GridSpec::new(a, b, d),
            [a] => GridSpec::cubic(a),
            _ => return Err("expected NA,NB,ND".into()),
        };
        spec.map(GridArg).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthsArg(pub Vec<u32>);

impl FromStr for DepthsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |p: &str| p.trim().parse::<u32>().map_err(|e| format!("`{p}`: {e}"));
        let depths: Vec<u32> = match s.split_once(':') {
            Some((lo, hi)) => (num(lo)?..=num(hi)?).collect(),
            None => s.split(',').map(num).collect::<Result<_, _>>()?,
        };
        if depths.is_empty() {
            return Err("empty depth range".into());
        }
        if let Some(d) = depths.iter().find(|&&d| d < 2) {
            return Err(format!("depths must be at least 2, got {d}"));
        }
        Ok(DepthsArg(depths))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io {
        path: PathBuf,
        source: io::Error,
    },
    Malformed {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Invalid {
        path: PathBuf,
        errors: Vec<FieldError>,
    },
    /// The suggestion names pairs that no allocation can contain.
    InvalidSuggestion {
        path: PathBuf,
        errors: Vec<FieldError>,
    },
    Infeasible(String),
    Model(ModelError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::InvalidSuggestion { .. } | Self::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_FAILURE,
        }
    }

    fn input(path: &Path, err: InputError, suggestion: bool) -> Self {
        let path = path.to_path_buf();
        match err {
            InputError::Malformed {
                line,
                column,
                message,
            } => Self::Malformed {
                path,
                line,
                column,
                message,
            },
            InputError::Invalid(errors) if suggestion => Self::InvalidSuggestion { path, errors },
            InputError::Invalid(errors) => Self::Invalid { path, errors },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) => write!(f, "error: {msg}"),
            Self::Io { path, source } => write!(f, "error: {}: {source}", path.display()),
            Self::Malformed {
                path,
                line,
                column,
                message,
            } => write!(f, "error: {}:{line}:{column}: {message}", path.display()),
            Self::Invalid { path, errors } | Self::InvalidSuggestion { path, errors } => {
                let lines: Vec<String> = errors
                    .iter()
                    .map(|e| format!("error: {}: {}: {}", path.display(), e.field, e.message))
                    .collect();
                write!(f, "{}", lines.join("\n"))
            }
            Self::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Self::Model(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Model(e)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Diagnostics go to stderr.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            };
        }
    };
    let stdout = io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Forward(a) => forward(a, out),
        Command::Inverse(a) => inverse(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Scenario(a) => scenario(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Serve(a) => serve(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => write_file(path, text),
        None => out.write_all(text.as_bytes()).map_err(stdout_err),
    }
}

fn load_instance(path: &Path) -> Result<InstanceFile, CliError> {
    parse_instance_file(&read(path)?).map_err(|e| CliError::input(path, e, false))
}

fn load_suggestion(path: &Path, file: &InstanceFile) -> Result<Suggestion, CliError> {
    parse_suggestion_file(&read(path)?, &file.instance).map_err(|e| CliError::input(path, e, true))
}

fn nominal_of(file: &InstanceFile) -> RiskParams {
    file.params.unwrap_or_else(|| {
        RiskParams::new(DEFAULT_NOMINAL.0, DEFAULT_NOMINAL.1, DEFAULT_NOMINAL.2)
            .expect("valid default")
    })
}

#[derive(Serialize)]
struct ForwardReport {
    params: RiskParams,
    allocation: Vec<Pair>,
    trace: irmrta::GreedyTrace,
    budget_used: f64,
}

fn forward(a: &ForwardArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = load_instance(&a.input)?;
    let base = nominal_of(&file);
    let params = RiskParams::new(
        a.alpha.unwrap_or(base.alpha()),
        a.beta.unwrap_or(base.beta()),
        a.delta.unwrap_or(base.delta()),
    )?;
    let (allocation, trace) = greedy_solve(&file.instance, &params);
    let report = ForwardReport {
        params,
        allocation: allocation.pairs().to_vec(),
        budget_used: trace.budget_used(),
        trace,
    };
    emit(None, &to_json(&report), out)
}

fn inverse(a: &InverseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(eps) = a.epsilon {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(CliError::Usage(format!(
                "--epsilon must be finite and non-negative, got {eps}"
            )));
        }
    }
    let file = load_instance(&a.input)?;
    let suggestion = load_suggestion(&a.suggestion, &file)?;
    let config = InverseConfig {
        max_depth: a.depth,
        epsilon: a.epsilon,
        strict_stop: a.strict_stop,
        ..InverseConfig::default()
    };
    let solution = solve_inverse(
        &file.instance,
        &suggestion,
        &nominal_of(&file),
        &file.weights.unwrap_or_default(),
        &file.bounds.unwrap_or_default(),
        &config,
    )
    .map_err(|e| match e {
        InverseError::Infeasible { stats } => CliError::Infeasible(format!(
            "no ordering of the suggestion is realizable within the bounds ({} nodes expanded)",
            stats.nodes_expanded
        )),
        InverseError::TimedOut { .. } => CliError::Usage("time budget exhausted".into()),
        InverseError::Model(e) => CliError::Model(e),
    })?;
    emit(
        a.output.as_deref(),
        &to_json(&ResultFile::from_inverse(&solution)),
        out,
    )?;
    if a.output.is_some() {
        writeln!(
            out,
            "objective {:.6} at alpha={:.6} beta={:.6} delta={:.6} (epsilon {:.3e}, verified {})",
            solution.objective,
            solution.params.alpha(),
            solution.params.beta(),
            solution.params.delta(),
            solution.epsilon,
            solution.verified
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = load_instance(&a.input)?;
    let suggestion = load_suggestion(&a.suggestion, &file)?;
    let result = grid_inverse(
        &file.instance,
        &suggestion,
        &nominal_of(&file),
        &file.weights.unwrap_or_default(),
        &file.bounds.unwrap_or_default(),
        &a.grid.0,
    )?
    .ok_or_else(|| {
        CliError::Infeasible(format!(
            "no point of the {} grid reproduces the suggestion",
            a.grid.0.points()
        ))
    })?;
    let check = verify_forward(&file.instance, &result.params, &suggestion);
    let record = ResultFile::from_oracle(&result, &check.produced, check.matches);
    emit(a.output.as_deref(), &to_json(&record), out)?;
    if a.output.is_some() {
        writeln!(
            out,
            "objective {:.6} at alpha={:.6} beta={:.6} delta={:.6} ({} points)",
            result.objective,
            result.params.alpha(),
            result.params.beta(),
            result.params.delta(),
            result.evaluated
        )
        .map_err(stdout_err)?;
    }
    Ok(())
}

/// Sidecar consumed by the visualization client.
#[derive(Serialize)]
struct GeometryFile<'a> {
    #[serde(flatten)]
    geometry: &'a Geometry,
    layout: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a ScenarioConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reward_shift: Option<f64>,
}

/// `dir/name.json` becomes `dir/name.geometry.json`.
pub fn geometry_path(instance_path: &Path) -> PathBuf {
    let stem = instance_path
        .file_stem()
        .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    instance_path.with_file_name(format!("{stem}.geometry.json"))
}

fn scenario(a: &ScenarioArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, geometry_json) = match a.fixture {
        Some(Fixture::Qualitative) => {
            let fx = load_fixture_qualitative();
            let geometry = derived_geometry(&fx.instance, ScenarioConfig::default().k);
            let sidecar = to_json(&GeometryFile {
                geometry: &geometry,
                layout: "derived",
                config: None,
                reward_shift: None,
            });
            let file = InstanceFile {
                instance: fx.instance,
                params: Some(fx.nominal),
                bounds: Some(fx.bounds),
                weights: Some(fx.weights),
            };
            (file, sidecar)
        }
        None => {
            let (robots, targets) = a.robots.zip(a.targets).ok_or_else(|| {
                CliError::Usage("--robots and --targets are required without --fixture".into())
            })?;
            let config = ScenarioConfig::new(robots, targets, a.seed);
            let scenario = generate_scenario(&config)?;
            let sidecar = to_json(&GeometryFile {
                geometry: &scenario.geometry,
                layout: "generated",
                config: Some(&scenario.config),
                reward_shift: Some(scenario.reward_shift),
            });
            (InstanceFile::new(scenario.instance), sidecar)
        }
    };
    emit(a.output.as_deref(), &to_json(&file), out)?;
    if let Some(path) = &a.output {
        let sidecar = geometry_path(path);
        write_file(&sidecar, &geometry_json)?;
        writeln!(out, "wrote {} and {}", path.display(), sidecar.display()).map_err(stdout_err)?;
    }
    Ok(())
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes must list positive sizes".into()));
    }
    let config = BenchConfig {
        sizes: a.sizes.clone(),
        depths: a.depths.0.clone(),
        trials: a.trials,
        seed: a.seed,
        oracle: (!a.no_oracle).then_some(a.grid.0),
        jobs: a.jobs,
        ..BenchConfig::default()
    };
    let records = run_bench(&config)?;
    let file = fs::File::create(&a.csv).map_err(|source| CliError::Io {
        path: a.csv.clone(),
        source,
    })?;
    write_csv(&records, io::BufWriter::new(file)).map_err(|e| CliError::Io {
        path: a.csv.clone(),
        source: io::Error::other(e),
    })?;
    writeln!(out, "{} rows written to {}", records.len(), a.csv.display()).map_err(stdout_err)?;
    if config.oracle.is_some() {
        writeln!(out, "depth  median_norm_obj").map_err(stdout_err)?;
        for &d in &config.depths {
            let median = median_normalized(&records, d).map_or("-".into(), |m| format!("{m:.4}"));
            writeln!(out, "{d:>5}  {median}").map_err(stdout_err)?;
        }
    }
    Ok(())
}

fn serve(a: &ServeArgs) -> Result<(), CliError> {
    let mut config = ServiceConfig::from_env().map_err(CliError::Usage)?;
    config.cors_origin = a.cors_origin.clone();
    if let Some(w) = a.workers {
        config.workers = w.max(1);
    }
    config.validate().map_err(CliError::Usage)?;
    let addr = SocketAddr::new(a.host, a.port);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<runtime>"),
            source,
        })?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(irmrta_service::serve(addr, config))
        .map_err(|source| CliError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })
}
