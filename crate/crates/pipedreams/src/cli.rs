//! Command line front end.
//!
//! Subcommands cover sampling (`estimate`), the exact oracles (`exact`), the
//! closed-form prediction (`predict`), the experiment tables (`kappa`,
//! `kiss`, `check`), chain analytics (`chain`), SVG rendering (`render`),
//! and shape diagnostics (`hypotheses`). Every randomized command takes
//! `--seed`; without one a seed is drawn, printed to stderr, and echoed in
//! the output metadata, so every published number can be reproduced.
//!
//! Machine output (JSON or CSV) goes to stdout or `--out`; diagnostics go to
//! stderr. Exit codes: 0 success, 2 argument errors, 3 input validation
//! errors (bad shapes, words, tiles, size limits), 1 anything else. Output
//! files are written atomically: compute, write a sibling temp file, rename.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimate::{
    chernoff_experiment, concentration_experiment, exact_expected_inversions,
    exact_expected_inversions_dp, exact_expected_inversions_enum, first_kiss_experiment,
    half_check, kappa_table, mc_expected_inversions_with_mode, predicted_inversions,
    staircase_limit_ratio, strip_limit_ratio, SamplingMode, Table, BUILD_GIT_DESCRIBE,
};
use crate::pipedream::{render_svg, PipeDream, RenderOptions};
use crate::shape::Shape;
use crate::walk::{sigma2_closed, sigma2_fundamental, stationary, transition_matrix, STATE_NAMES};
use crate::word::Word;

#[derive(Parser)]
#[command(
    name = "pipedream",
    version,
    about = "Random pipe dreams: sampling, inversion statistics, and the walks behind them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of expected inversions, with prediction and ratio
    Estimate(EstimateArgs),
    /// Exact expected inversions of a random subword, by the desk-scale oracles
    Exact(ExactArgs),
    /// Closed-form predicted inversions of a shape
    Predict(PredictArgs),
    /// Staircase ratio table against the limiting constant
    Kappa(KappaArgs),
    /// First-kiss probabilities: pipe pair vs chain hitting time vs normal CDF
    Kiss(KissArgs),
    /// Facing-pair chain: matrix, stationary law, and variance both ways
    Chain(ChainArgs),
    /// Empirical checks of the closed-form bounds
    Check(CheckArgs),
    /// Render a sampled or saved pipe dream as SVG
    Render(RenderArgs),
    /// Shape statistics behind the prediction's hypotheses
    Hypotheses(HypothesesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    PerBox,
    GeometricSkip,
}

impl ModeArg {
    fn mode(self) -> SamplingMode {
        match self {
            ModeArg::PerBox => SamplingMode::PerBox,
            ModeArg::GeometricSkip => SamplingMode::GeometricSkip,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    /// Distribution DP when the rank allows it, else enumeration
    Auto,
    /// Distribution DP over all n! permutations (rank <= 8)
    Dp,
    /// Enumeration of all 2^K subwords (length <= 20)
    #[value(alias = "enum")]
    Enumerate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Chernoff,
    Concentration,
    Half,
    All,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write output here instead of stdout (atomic: temp file then rename)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThreadArgs {
    /// Worker threads for trial-parallel commands; falls back to the
    /// PIPEDREAM_THREADS environment variable, then to one per core.
    /// Results never depend on this value.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Shape spec: staircase:N | strip:N:RHO | word:FILE | boxes:FILE
    #[arg(long)]
    shape: String,
    /// Cross probability
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// RNG seed; drawn and printed if absent
    #[arg(long)]
    seed: Option<u64>,
    /// Tile sampling mode; geometric-skip is flagged in the metadata
    #[arg(long, value_enum, default_value = "per-box")]
    mode: ModeArg,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct ExactArgs {
    /// Word file (JSON with n and letters)
    #[arg(long)]
    word: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    shape: String,
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct KappaArgs {
    /// Staircase sizes, ascending
    #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 200, 400, 800])]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct KissArgs {
    /// Starting gaps (even)
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 4, 8])]
    ells: Vec<u64>,
    /// Step budgets
    #[arg(long, value_delimiter = ',', default_values_t = vec![64u64, 256, 1024, 4096])]
    ks: Vec<u64>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Turn counts for the chernoff suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![10u64, 100])]
    ks: Vec<u64>,
    /// Deviations as fractions of k for the chernoff suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25f64, 0.5])]
    xi_fracs: Vec<f64>,
    /// Deviation distances for the concentration suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![20u64, 40, 80])]
    zs: Vec<u64>,
    /// Step budgets for the concentration suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![100u64, 400])]
    rs: Vec<u64>,
    /// Turn counts for the half suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 10, 50])]
    half_ks: Vec<u64>,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct RenderArgs {
    /// Shape spec to sample a pipe dream on (alternative to --tiles)
    #[arg(long, conflicts_with = "tiles")]
    shape: Option<String>,
    /// Cross probability when sampling
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Saved pipe dream file to render instead of sampling
    #[arg(long)]
    tiles: Option<PathBuf>,
    /// Box side length in pixels
    #[arg(long, default_value_t = 40.0)]
    cell: f64,
    /// Skip the pipe labels
    #[arg(long)]
    no_labels: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct HypothesesArgs {
    #[arg(long)]
    shape: String,
    /// Exponent margin in (0, 0.5) for the diagonal statistics
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Parses argv and runs; returns the process exit code.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // 2 for usage errors; 0 for --help/--version displays.
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) => 2,
        Error::Io(_) | Error::Singular(_) => 1,
        // Shape, word, and tiling validation, malformed files, size limits.
        _ => 3,
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Kappa(args) => cmd_kappa(args),
        Command::Kiss(args) => cmd_kiss(args),
        Command::Chain(args) => cmd_chain(args),
        Command::Check(args) => cmd_check(args),
        Command::Render(args) => cmd_render(args),
        Command::Hypotheses(args) => cmd_hypotheses(args),
    }
}

/// staircase:N | strip:N:RHO | word:FILE | boxes:FILE
fn parse_shape_spec(spec: &str) -> Result<Shape> {
    if let Some(rest) = spec.strip_prefix("staircase:") {
        let n = parse_number(rest, "staircase size")?;
        Shape::staircase(n)
    } else if let Some(rest) = spec.strip_prefix("strip:") {
        let (n_text, rho_text) = rest.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("strip spec needs strip:N:RHO, got {spec:?}"))
        })?;
        let n = parse_number(n_text, "strip size")?;
        let rho = parse_number(rho_text, "strip thickness")?;
        Shape::strip(n, rho)
    } else if let Some(file) = spec.strip_prefix("word:") {
        let word = Word::from_json(&fs::read_to_string(file)?)?;
        Shape::from_word(&word).map(|(shape, _)| shape)
    } else if let Some(file) = spec.strip_prefix("boxes:") {
        Shape::from_json(&fs::read_to_string(file)?)
    } else {
        Err(Error::InvalidArgument(format!(
            "shape spec must be staircase:N, strip:N:RHO, word:FILE, or boxes:FILE; got {spec:?}"
        )))
    }
}

fn parse_number(text: &str, what: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what} must be a number, got {text:?}")))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(seed) => seed,
        None => {
            let seed: u64 = rand::rng().random();
            eprintln!("seed = {seed}");
            seed
        }
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("PIPEDREAM_THREADS") {
        Ok(text) => {
            let n = text.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("PIPEDREAM_THREADS must be a number, got {text:?}"))
            })?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Runs f on a pool of the requested width; results are deterministic either
/// way, the width only sets the parallelism.
fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match threads {
        Some(0) => Err(Error::InvalidArgument("need at least one thread".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(f),
        None => f(),
    }
}

fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let name = path.file_name().ok_or_else(|| {
                Error::InvalidArgument(format!("output path {path:?} has no file name"))
            })?;
            let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
            if let Err(err) = fs::write(&tmp, &text) {
                let _ = fs::remove_file(&tmp);
                return Err(err.into());
            }
            if let Err(err) = fs::rename(&tmp, path) {
                let _ = fs::remove_file(&tmp);
                return Err(err.into());
            }
            Ok(())
        }
    }
}

/// One-row table for scalar results, so CSV output reuses the table format.
fn scalar_table(fields: &[(&str, f64)], meta: BTreeMap<String, String>) -> Table {
    Table {
        columns: fields.iter().map(|(name, _)| name.to_string()).collect(),
        rows: vec![fields.iter().map(|&(_, value)| value).collect()],
        meta,
    }
}

fn emit_table(table: &Table, output: &OutputArgs) -> Result<()> {
    let text = match output.format {
        OutputFormat::Json => table.to_json(),
        OutputFormat::Csv => table.to_csv(),
    };
    write_output(&text, output.out.as_deref())
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let shape = parse_shape_spec(&args.shape)?;
    let seed = resolve_seed(args.seed);
    let threads = resolve_threads(args.threads.threads)?;
    let mode = args.mode.mode();
    let est = with_pool(threads, || {
        mc_expected_inversions_with_mode(&shape, args.p, args.trials, seed, mode)
    })?;
    let text = match args.output.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "command": "estimate",
            "shape": args.shape,
            "p": args.p,
            "sampling_mode": mode.as_str(),
            "build": BUILD_GIT_DESCRIBE,
            "estimate": est,
        }))
        .expect("serializes"),
        OutputFormat::Csv => {
            let mut meta = BTreeMap::new();
            meta.insert("shape".into(), args.shape.clone());
            meta.insert("p".into(), format!("{}", args.p));
            meta.insert("sampling_mode".into(), mode.as_str().into());
            meta.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            scalar_table(
                &[
                    ("mean", est.mean),
                    ("stderr", est.stderr),
                    ("variance", est.variance),
                    ("trials", est.trials as f64),
                    ("seed", est.seed as f64),
                    ("predicted", est.predicted),
                    ("ratio", est.ratio.unwrap_or(f64::NAN)),
                ],
                meta,
            )
            .to_csv()
        }
    };
    write_output(&text, args.output.out.as_deref())
}

fn cmd_exact(args: ExactArgs) -> Result<()> {
    let word = Word::from_json(&fs::read_to_string(&args.word)?)?;
    let (value, route) = match args.route {
        RouteArg::Auto => (
            exact_expected_inversions(&word, args.p)?,
            if word.n <= 8 { "dp" } else { "enumeration" },
        ),
        RouteArg::Dp => (exact_expected_inversions_dp(&word, args.p)?, "dp"),
        RouteArg::Enumerate => (
            exact_expected_inversions_enum(&word, args.p)?,
            "enumeration",
        ),
    };
    let text = match args.output.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "command": "exact",
            "word": args.word.display().to_string(),
            "n": word.n,
            "length": word.len(),
            "p": args.p,
            "route": route,
            "expected_inversions": value,
            "build": BUILD_GIT_DESCRIBE,
        }))
        .expect("serializes"),
        OutputFormat::Csv => {
            let mut meta = BTreeMap::new();
            meta.insert("word".into(), args.word.display().to_string());
            meta.insert("route".into(), route.into());
            meta.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            scalar_table(
                &[
                    ("n", word.n as f64),
                    ("length", word.len() as f64),
                    ("p", args.p),
                    ("expected_inversions", value),
                ],
                meta,
            )
            .to_csv()
        }
    };
    write_output(&text, args.output.out.as_deref())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let shape = parse_shape_spec(&args.shape)?;
    let predicted = predicted_inversions(&shape, args.p)?;
    let text = match args.output.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "command": "predict",
            "shape": args.shape,
            "n": shape.n(),
            "box_count": shape.box_count(),
            "p": args.p,
            "predicted": predicted,
            "build": BUILD_GIT_DESCRIBE,
        }))
        .expect("serializes"),
        OutputFormat::Csv => {
            let mut meta = BTreeMap::new();
            meta.insert("shape".into(), args.shape.clone());
            meta.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            scalar_table(
                &[
                    ("n", shape.n() as f64),
                    ("box_count", shape.box_count() as f64),
                    ("p", args.p),
                    ("predicted", predicted),
                ],
                meta,
            )
            .to_csv()
        }
    };
    write_output(&text, args.output.out.as_deref())
}

fn cmd_kappa(args: KappaArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let threads = resolve_threads(args.threads.threads)?;
    let table = with_pool(threads, || kappa_table(&args.ns, args.p, args.trials, seed))?;
    emit_table(&table, &args.output)
}

fn cmd_kiss(args: KissArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let threads = resolve_threads(args.threads.threads)?;
    let table = with_pool(threads, || {
        first_kiss_experiment(&args.ells, &args.ks, args.p, args.trials, seed)
    })?;
    emit_table(&table, &args.output)
}

fn cmd_chain(args: ChainArgs) -> Result<()> {
    let chain = transition_matrix(args.p)?;
    let pi = stationary(&chain);
    let fundamental = sigma2_fundamental(args.p)?;
    let closed = sigma2_closed(args.p);
    let text = match args.output.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "command": "chain",
            "p": args.p,
            "states": STATE_NAMES,
            "matrix": chain.matrix,
            "nu": chain.nu,
            "stationary": pi,
            "sigma2_closed": closed,
            "sigma2_fundamental": fundamental,
            "build": BUILD_GIT_DESCRIBE,
        }))
        .expect("serializes"),
        OutputFormat::Csv => {
            let mut meta = BTreeMap::new();
            meta.insert("p".into(), format!("{}", args.p));
            meta.insert("states".into(), STATE_NAMES.join("|"));
            meta.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            let mut fields: Vec<(String, f64)> = Vec::new();
            for (i, from) in STATE_NAMES.iter().enumerate() {
                for (j, to) in STATE_NAMES.iter().enumerate() {
                    fields.push((format!("P_{from}_{to}"), chain.matrix[i][j]));
                }
            }
            for (i, name) in STATE_NAMES.iter().enumerate() {
                fields.push((format!("pi_{name}"), pi[i]));
            }
            for (i, name) in STATE_NAMES.iter().enumerate() {
                fields.push((format!("nu_{name}"), chain.nu[i]));
            }
            fields.push(("sigma2_closed".into(), closed));
            fields.push(("sigma2_fundamental".into(), fundamental));
            let borrowed: Vec<(&str, f64)> =
                fields.iter().map(|(name, v)| (name.as_str(), *v)).collect();
            scalar_table(&borrowed, meta).to_csv()
        }
    };
    write_output(&text, args.output.out.as_deref())
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let threads = resolve_threads(args.threads.threads)?;
    let suites: Vec<(&str, Table)> = with_pool(threads, || {
        let mut suites = Vec::new();
        if matches!(args.suite, SuiteArg::Chernoff | SuiteArg::All) {
            suites.push((
                "chernoff",
                chernoff_experiment(&args.ks, &args.xi_fracs, args.p, args.trials, seed)?,
            ));
        }
        if matches!(args.suite, SuiteArg::Concentration | SuiteArg::All) {
            suites.push((
                "concentration",
                concentration_experiment(&args.zs, &args.rs, args.p, args.trials, seed)?,
            ));
        }
        if matches!(args.suite, SuiteArg::Half | SuiteArg::All) {
            suites.push(("half", half_check(&args.half_ks, args.p, args.trials, seed)?));
        }
        Ok(suites)
    })?;
    let text = match args.output.format {
        OutputFormat::Json => {
            let mut object = serde_json::Map::new();
            object.insert("command".into(), "check".into());
            object.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            for (name, table) in &suites {
                object.insert(
                    name.to_string(),
                    serde_json::to_value(table).expect("serializes"),
                );
            }
            serde_json::to_string_pretty(&serde_json::Value::Object(object)).expect("serializes")
        }
        OutputFormat::Csv => {
            let mut blocks = Vec::new();
            for (name, table) in &suites {
                blocks.push(format!("# suite = {name}\n{}", table.to_csv()));
            }
            blocks.join("\n")
        }
    };
    write_output(&text, args.output.out.as_deref())
}

fn cmd_render(args: RenderArgs) -> Result<()> {
    let pd = match (&args.tiles, &args.shape) {
        (Some(file), _) => PipeDream::from_json(&fs::read_to_string(file)?)?,
        (None, Some(spec)) => {
            let shape = parse_shape_spec(spec)?;
            let seed = resolve_seed(args.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            PipeDream::sample(&shape, args.p, &mut rng)?
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "render needs --shape (to sample) or --tiles (to load)".into(),
            ))
        }
    };
    let routing = pd.trace()?;
    let svg = render_svg(
        &pd,
        &routing,
        &RenderOptions {
            unit: args.cell,
            labels: !args.no_labels,
        },
    );
    write_output(&svg, args.output.out.as_deref())
}

fn cmd_hypotheses(args: HypothesesArgs) -> Result<()> {
    let shape = parse_shape_spec(&args.shape)?;
    let report = shape.hypothesis_report(args.epsilon)?;
    let text = match args.output.format {
        OutputFormat::Json => serde_json::to_string_pretty(&serde_json::json!({
            "command": "hypotheses",
            "shape": args.shape,
            "diagnostics": report,
            "staircase_limit_ratio": staircase_limit_ratio(),
            "strip_limit_ratio": strip_limit_ratio(),
            "build": BUILD_GIT_DESCRIBE,
        }))
        .expect("serializes"),
        OutputFormat::Csv => {
            let mut meta = BTreeMap::new();
            meta.insert("shape".into(), args.shape.clone());
            meta.insert("build".into(), BUILD_GIT_DESCRIBE.into());
            scalar_table(
                &[
                    ("n", report.n as f64),
                    ("epsilon", report.epsilon),
                    ("box_count", report.box_count as f64),
                    ("max_diagonal_count", report.max_diagonal_count as f64),
                    ("small_cutoff", report.small_cutoff),
                    ("small_diagonals", report.small_diagonals as f64),
                    ("ratio_max", report.ratio_max),
                ],
                meta,
            )
            .to_csv()
        }
    };
    write_output(&text, args.output.out.as_deref())
}
