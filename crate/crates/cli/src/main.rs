//! `phidiv`: batch front end for the phi-divergence goodness-of-fit library.

mod null;

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phidiv::asymptotic::{pvalue_asymptotic, tn_pvalue_asymptotic, AdDrawCache, DEFAULT_TRUNCATION};
use phidiv::bands::{band_with, critical_value, Method};
use phidiv::exact::{pvalue_exact, ExactConfig, QuantileCache};
use phidiv::montecarlo::{self, ExperimentPlan, ExperimentResult, HistogramStatistic};
use phidiv::statistics::{hc_star, sn, sn_plus, sn_unrestricted, sn_ur_minus, sn_ur_plus, tn};
use phidiv::{DivergenceOrder, Sample, StatValue};
use serde::Serialize;
use serde_json::{json, Value};

use crate::null::NullSpec;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<phidiv::Error> for CliError {
    fn from(e: phidiv::Error) -> Self {
        use phidiv::Error as E;
        let msg = e.to_string();
        match e {
            E::Domain(_) => CliError::Usage(msg),
            E::Numeric(_) => CliError::Numeric(msg),
            E::InvalidSample(_) | E::SizeOutOfRange { .. } | E::Parse(_) | E::Io(_) => CliError::Data(msg),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "phidiv", version, about = "Phi-divergence goodness-of-fit statistics, p-values, quantiles and bands")]
struct Cli {
    /// Write CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    /// Directory for quantile and limit-law caches.
    #[arg(long, global = true, env = "PHIDIV_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a statistic.
    Stat(StatArgs),
    /// Statistic with its null p-value.
    Pvalue(PvalueArgs),
    /// Null critical value q_n(s, alpha).
    Quantile(QuantileArgs),
    /// Simultaneous confidence band for the d.f.
    Band(BandArgs),
    /// Run a Monte Carlo experiment plan (JSON).
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Input file with one value per line (`#` starts a comment); `-` reads stdin.
    input: Option<PathBuf>,
    /// Inline values separated by commas or whitespace.
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    data: Option<String>,
    /// Null d.f. applied as a probability integral transform: uniform, normal:MU,SIGMA,
    /// logistic:MU,S, cauchy:X0,G, laplace:MU,B, exponential:LOC,SCALE, lognormal:MU,SIGMA,
    /// uniform:LO,HI or grid:PATH (rows `y,p`).
    #[arg(long, default_value = "uniform")]
    null: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    /// Two-sided supremum S_n(s).
    Sup,
    /// One-sided supremum S_n+(s) on [X_(1), x-cap].
    Plus,
    /// Integral statistic T_n(s).
    Integral,
    /// Higher criticism HC*.
    Hc,
    /// Unrestricted supremum.
    Ur,
    UrPlus,
    UrMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Exact,
    Asymptotic,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Asymptotic => Method::Asymptotic,
        }
    }
}

#[derive(Args, Debug)]
struct StatArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Divergence order; not used by `--kind hc`.
    #[arg(long, short, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, value_enum, default_value = "sup")]
    kind: Kind,
    /// Upper end of the range of the one-sided statistic.
    #[arg(long, default_value_t = 1.0)]
    x_cap: f64,
    /// Range fraction of higher criticism.
    #[arg(long, default_value_t = 0.5)]
    alpha0: f64,
}

#[derive(Args, Debug)]
struct PvalueArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Divergence order s (recommended range [-1, 2]).
    #[arg(long, short, allow_negative_numbers = true)]
    s: f64,
    /// `sup` (exact or asymptotic) or `integral` (asymptotic, Monte Carlo limit law).
    #[arg(long, value_enum, default_value = "sup")]
    kind: Kind,
    /// Null law; defaults to exact for `sup` and to the limit law for `integral`.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Shorthand for `--method asymptotic`.
    #[arg(long, conflicts_with = "method")]
    asymptotic: bool,
    /// Seed of the limit-law draws used for `integral`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of limit-law draws used for `integral`.
    #[arg(long, default_value_t = 100_000)]
    mc_draws: usize,
}

#[derive(Args, Debug)]
struct QuantileArgs {
    /// Sample size.
    #[arg(long, short)]
    n: usize,
    /// Divergence order s (recommended range [-1, 2]).
    #[arg(long, short, allow_negative_numbers = true)]
    s: f64,
    /// Significance level.
    #[arg(long, short, default_value_t = 0.05)]
    alpha: f64,
    /// Null law of the statistic: exact finite-n law or the limit law.
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Shorthand for `--method asymptotic`.
    #[arg(long, conflicts_with = "method")]
    asymptotic: bool,
}

#[derive(Args, Debug)]
struct BandArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Divergence order s (recommended range [-1, 2]).
    #[arg(long, short, allow_negative_numbers = true)]
    s: f64,
    /// Significance level.
    #[arg(long, short, default_value_t = 0.05)]
    alpha: f64,
    /// Null law of the statistic: exact finite-n law or the limit law.
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Shorthand for `--method asymptotic`.
    #[arg(long, conflicts_with = "method")]
    asymptotic: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Experiment plan (JSON).
    plan: PathBuf,
    /// Directory receiving result.json and CSV exports.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the plan's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the plan's replication count.
    #[arg(long)]
    reps: Option<usize>,
}

/// The fully resolved settings of a run, echoed into every output.
#[derive(Debug, Default, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null: Option<NullSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_dir: Option<PathBuf>,
    format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache_dir: Option<PathBuf>,
}

/// What a command produced, before formatting.
struct Report {
    config: RunConfig,
    /// Provenance of any distributional result: `exact`, `asymptotic`, `asymptotic-monte-carlo`, `monte-carlo` or `none`.
    method: String,
    warnings: Vec<String>,
    result: Value,
    csv_header: String,
    csv_rows: Vec<String>,
}

impl Report {
    fn render(&self, csv: bool) -> String {
        let config = serde_json::to_value(&self.config).expect("config serializes");
        if !csv {
            let envelope = json!({
                "tool": "phidiv",
                "version": VERSION,
                "config": config,
                "method": self.method,
                "warnings": self.warnings,
                "result": self.result,
            });
            return serde_json::to_string_pretty(&envelope).expect("json") + "\n";
        }
        let mut out = String::new();
        writeln!(out, "# phidiv {VERSION}").unwrap();
        writeln!(out, "# config {config}").unwrap();
        writeln!(out, "# method {}", self.method).unwrap();
        for w in &self.warnings {
            writeln!(out, "# warning {w}").unwrap();
        }
        writeln!(out, "{}", self.csv_header).unwrap();
        for row in &self.csv_rows {
            writeln!(out, "{row}").unwrap();
        }
        out
    }
}

fn parse_values(text: &str, source: &str) -> CliResult<Vec<f64>> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v: f64 = token
                .parse()
                .map_err(|_| CliError::Data(format!("{source}:{}: not a number: '{token}'", lineno + 1)))?;
            if !v.is_finite() {
                return Err(CliError::Data(format!("{source}:{}: non-finite value '{token}'", lineno + 1)));
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{source}: no data values")));
    }
    Ok(values)
}

/// Reads the data, applies the null transform and builds the sample.
fn load_sample(args: &DataArgs, config: &mut RunConfig) -> CliResult<Sample> {
    let (text, source) = match (&args.data, &args.input) {
        (Some(inline), _) => (inline.clone(), "--data".to_string()),
        (None, Some(path)) if path == Path::new("-") => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Data(format!("stdin: {e}")))?;
            (text, "stdin".to_string())
        }
        (None, Some(path)) => (
            std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
            path.display().to_string(),
        ),
        (None, None) => return Err(CliError::Usage("no data: give an input file, '-' for stdin, or --data".into())),
    };
    let null: NullSpec = args.null.parse()?;
    let raw = parse_values(&text, &source)?;
    let transformed: Vec<f64> = raw.iter().map(|&y| null.cdf(y)).collect();
    if let Some((i, (&y, &u))) = raw.iter().zip(&transformed).enumerate().find(|(_, (_, &u))| !(u > 0.0 && u < 1.0)) {
        return Err(CliError::Data(format!(
            "value #{} ({y}) maps to {u} under the null '{null}'; transformed data must lie strictly inside (0, 1)",
            i + 1
        )));
    }
    config.input = Some(source);
    config.null = Some(null);
    Ok(Sample::new(transformed)?)
}

fn order(s: f64, warnings: &mut Vec<String>) -> CliResult<DivergenceOrder> {
    if !(-1.0..=2.0).contains(&s) {
        let w = format!("s = {s} lies outside [-1, 2]: asymptotic p-values are unavailable; the statistic is still computed");
        log::warn!("{w}");
        warnings.push(w);
    }
    Ok(DivergenceOrder::new(s)?)
}

fn resolve_method(method: MethodArg, asymptotic: bool, n: usize) -> CliResult<Method> {
    let method = if asymptotic { Method::Asymptotic } else { method.into() };
    let limit = ExactConfig::default().n_max;
    if method == Method::Exact && n > limit {
        return Err(CliError::Usage(format!(
            "n = {n} exceeds the exact engine's limit {limit}; rerun with --method asymptotic"
        )));
    }
    Ok(method)
}

fn quantile_cache(dir: &Option<PathBuf>) -> CliResult<Option<(PathBuf, QuantileCache)>> {
    let Some(dir) = dir else { return Ok(None) };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let path = dir.join("quantiles.csv");
    let cache = if path.exists() { QuantileCache::load(&path)? } else { QuantileCache::new() };
    Ok(Some((path, cache)))
}

fn with_quantile_cache<T>(
    dir: &Option<PathBuf>,
    f: impl FnOnce(Option<&mut QuantileCache>) -> CliResult<T>,
) -> CliResult<T> {
    match quantile_cache(dir)? {
        Some((path, mut cache)) => {
            let before = cache.len();
            let out = f(Some(&mut cache))?;
            if cache.len() != before {
                cache.save(&path)?;
            }
            Ok(out)
        }
        None => f(None),
    }
}

fn stat_row(v: &StatValue) -> String {
    let s = v.s.map(|s| s.to_string()).unwrap_or_default();
    format!("{},{},{},{},{}", serde_json::to_value(v.kind).unwrap().as_str().unwrap(), s, v.n, v.statistic, v.scaled())
}

fn cmd_stat(args: &StatArgs, config: &mut RunConfig) -> CliResult<Report> {
    let mut warnings = Vec::new();
    let sample = load_sample(&args.data, config)?;
    config.kind = Some(args.kind);
    let value = if args.kind == Kind::Hc {
        config.alpha0 = Some(args.alpha0);
        hc_star(&sample, args.alpha0)?
    } else {
        let s = args.s.ok_or_else(|| CliError::Usage("--s is required for this kind".into()))?;
        config.s = Some(s);
        let o = order(s, &mut warnings)?;
        match args.kind {
            Kind::Sup => sn(o, &sample),
            Kind::Plus => {
                config.x_cap = Some(args.x_cap);
                sn_plus(o, &sample, args.x_cap)?
            }
            Kind::Integral => tn(o, &sample)?,
            Kind::Ur => sn_unrestricted(o, &sample)?,
            Kind::UrPlus => sn_ur_plus(o, &sample)?,
            Kind::UrMinus => sn_ur_minus(o, &sample)?,
            Kind::Hc => unreachable!(),
        }
    };
    config.n = Some(sample.n());
    Ok(Report {
        config: std::mem::take(config),
        method: "none".into(),
        warnings,
        result: json!({ "statistic": value, "scaled": value.scaled() }),
        csv_header: "kind,s,n,statistic,scaled".into(),
        csv_rows: vec![stat_row(&value)],
    })
}

fn cmd_pvalue(args: &PvalueArgs, config: &mut RunConfig, cache_dir: &Option<PathBuf>) -> CliResult<Report> {
    let mut warnings = Vec::new();
    let sample = load_sample(&args.data, config)?;
    let n = sample.n();
    let o = order(args.s, &mut warnings)?;
    config.s = Some(args.s);
    config.n = Some(n);
    config.kind = Some(args.kind);
    let requested = if args.asymptotic { Some(MethodArg::Asymptotic) } else { args.method };
    let (value, p, se, method) = match args.kind {
        Kind::Sup => {
            let method = resolve_method(requested.unwrap_or(MethodArg::Exact), false, n)?;
            config.method = Some(method);
            let value = sn(o, &sample);
            let p = match method {
                Method::Exact => pvalue_exact(n, o, value.statistic)?,
                Method::Asymptotic => pvalue_asymptotic(&value)?,
            };
            (value, p, None, method.to_string())
        }
        Kind::Integral => {
            if requested == Some(MethodArg::Exact) {
                return Err(CliError::Usage("no exact null distribution for the integral statistic; use --method asymptotic".into()));
            }
            config.method = Some(Method::Asymptotic);
            config.seed = Some(args.seed);
            config.mc_draws = Some(args.mc_draws);
            let value = tn(o, &sample)?;
            let draws = match cache_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
                    let path = dir.join(format!("a2_seed{}_j{}_m{}.bin", args.seed, DEFAULT_TRUNCATION, args.mc_draws));
                    AdDrawCache::load_or_generate(&path, args.seed, DEFAULT_TRUNCATION, args.mc_draws)?
                }
                None => AdDrawCache::generate(args.seed, DEFAULT_TRUNCATION, args.mc_draws)?,
            };
            let (p, se) = tn_pvalue_asymptotic(&value, &draws)?;
            (value, p, Some(se), "asymptotic-monte-carlo".to_string())
        }
        other => {
            return Err(CliError::Usage(format!(
                "p-values are available for --kind sup or integral, not {}",
                serde_json::to_value(other).unwrap().as_str().unwrap()
            )))
        }
    };
    let se_text = se.map(|v| v.to_string()).unwrap_or_default();
    Ok(Report {
        config: std::mem::take(config),
        method: method.clone(),
        warnings,
        result: json!({ "statistic": value, "scaled": value.scaled(), "p_value": p, "p_value_se": se }),
        csv_header: "kind,s,n,statistic,scaled,p_value,p_value_se".into(),
        csv_rows: vec![format!("{},{p},{se_text}", stat_row(&value))],
    })
}

fn cmd_quantile(args: &QuantileArgs, config: &mut RunConfig, cache_dir: &Option<PathBuf>) -> CliResult<Report> {
    let mut warnings = Vec::new();
    let o = order(args.s, &mut warnings)?;
    if args.n == 0 {
        return Err(CliError::Usage("n must be positive".into()));
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let method = resolve_method(args.method, args.asymptotic, args.n)?;
    config.n = Some(args.n);
    config.s = Some(args.s);
    config.alpha = Some(args.alpha);
    config.method = Some(method);
    let (q, used) =
        with_quantile_cache(cache_dir, |cache| Ok(critical_value(args.n, o, args.alpha, method, &ExactConfig::default(), cache)?))?;
    Ok(Report {
        config: std::mem::take(config),
        method: used.to_string(),
        warnings,
        result: json!({ "n": args.n, "s": args.s, "alpha": args.alpha, "q": q, "scaled": args.n as f64 * q }),
        csv_header: "n,s,alpha,method,q".into(),
        csv_rows: vec![format!("{},{},{},{used},{q}", args.n, args.s, args.alpha)],
    })
}

fn cmd_band(args: &BandArgs, config: &mut RunConfig, cache_dir: &Option<PathBuf>) -> CliResult<Report> {
    let mut warnings = Vec::new();
    let sample = load_sample(&args.data, config)?;
    let o = order(args.s, &mut warnings)?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {}", args.alpha)));
    }
    let method = resolve_method(args.method, args.asymptotic, sample.n())?;
    config.n = Some(sample.n());
    config.s = Some(args.s);
    config.alpha = Some(args.alpha);
    config.method = Some(method);
    let band =
        with_quantile_cache(cache_dir, |cache| Ok(band_with(&sample, o, args.alpha, method, &ExactConfig::default(), cache)?))?;
    let csv = band.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or_default().to_string();
    Ok(Report {
        config: std::mem::take(config),
        method: band.method.to_string(),
        warnings,
        result: serde_json::to_value(&band).expect("band serializes"),
        csv_header: header,
        csv_rows: lines.map(str::to_string).collect(),
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn summary_rows(result: &ExperimentResult) -> Vec<String> {
    let mut rows = Vec::new();
    for s in &result.summaries {
        let (beta, r) = s.cell.map(|c| (c.beta.to_string(), c.r.to_string())).unwrap_or_default();
        let mut push = |metric: &str, value: f64, se: Option<f64>| {
            rows.push(format!("{},{beta},{r},{metric},{value},{}", s.s, se.map(|v| v.to_string()).unwrap_or_default()));
        };
        for (name, rate) in [
            ("rejection_exact", s.rejection_exact),
            ("rejection_asymptotic", s.rejection_asymptotic),
            ("coverage", s.coverage),
            ("size", s.size),
            ("power", s.power),
        ] {
            if let Some(rate) = rate {
                push(name, rate.rate, Some(rate.se));
            }
        }
        for (name, mean) in [("mean_centered", s.mean_centered), ("mean_scaled_integral", s.mean_scaled_integral)] {
            if let Some(m) = mean {
                push(name, m.mean, Some(m.se));
            }
        }
        for (name, v) in [
            ("critical_exact", s.critical_exact),
            ("critical_asymptotic", s.critical_asymptotic),
            ("threshold", s.threshold),
            ("ks_distance", s.ks_distance),
            ("min_draw", s.min_draw),
        ] {
            if let Some(v) = v {
                push(name, v, None);
            }
        }
        for t in &s.tails {
            push(&format!("tail_empirical@{}", t.x), t.empirical.rate, Some(t.empirical.se));
            push(&format!("tail_reference@{}", t.x), t.reference, None);
        }
    }
    rows
}

fn cmd_simulate(args: &SimulateArgs, config: &mut RunConfig) -> CliResult<Report> {
    let text = std::fs::read_to_string(&args.plan).map_err(|e| CliError::Data(format!("{}: {e}", args.plan.display())))?;
    let mut plan: ExperimentPlan =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: invalid plan: {e}", args.plan.display())))?;
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(reps) = args.reps {
        plan.reps = reps;
    }
    plan.validate()?;
    config.plan = Some(args.plan.clone());
    config.out_dir = Some(args.out_dir.clone());
    config.seed = Some(plan.seed);
    config.n = Some(plan.n);
    config.alpha = Some(plan.alpha);
    config.method = Some(plan.method);
    let result = montecarlo::run(&plan)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", args.out_dir.display())))?;
    let mut files = vec![args.out_dir.join("result.json")];
    write_file(&files[0], &result.to_json())?;
    if !result.histograms.is_empty() {
        for (name, stat) in [("histogram_centered.csv", HistogramStatistic::Centered), ("histogram_raw.csv", HistogramStatistic::RawPlus)] {
            let path = args.out_dir.join(name);
            write_file(&path, &result.histogram_csv(stat))?;
            files.push(path);
        }
    }
    if plan.keep_draws {
        let path = args.out_dir.join("draws.csv");
        write_file(&path, &result.draws_csv())?;
        files.push(path);
    }
    Ok(Report {
        config: std::mem::take(config),
        method: "monte-carlo".into(),
        warnings: Vec::new(),
        result: json!({ "files": files, "experiment": result }),
        csv_header: "s,beta,r,metric,value,se".into(),
        csv_rows: summary_rows(&result),
    })
}

fn run(cli: &Cli) -> CliResult<String> {
    let mut config = RunConfig {
        format: if cli.csv { "csv" } else { "json" },
        cache_dir: cli.cache_dir.clone(),
        ..RunConfig::default()
    };
    let report = match &cli.command {
        Command::Stat(a) => {
            config.subcommand = "stat";
            cmd_stat(a, &mut config)?
        }
        Command::Pvalue(a) => {
            config.subcommand = "pvalue";
            cmd_pvalue(a, &mut config, &cli.cache_dir)?
        }
        Command::Quantile(a) => {
            config.subcommand = "quantile";
            cmd_quantile(a, &mut config, &cli.cache_dir)?
        }
        Command::Band(a) => {
            config.subcommand = "band";
            cmd_band(a, &mut config, &cli.cache_dir)?
        }
        Command::Simulate(a) => {
            config.subcommand = "simulate";
            cmd_simulate(a, &mut config)?
        }
    };
    Ok(report.render(cli.csv))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("phidiv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
