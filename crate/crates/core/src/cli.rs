//! Command-line front end. `dispatch` parses arguments, runs one command
//! and maps errors to exit statuses with machine-readable codes on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::compression::trials::{run_scheme_trials, SchemeKind, TrialSettings};
use crate::concept_class::{generate_class, ClassFamily, ConceptClass, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::learners::{
    algorithm_a, algorithm_a_erm, erm, AlgorithmA, AlgorithmAErm, Erm, Learner, TargetOracle,
};
use crate::parameters::{dual_helly_number, parameter_report, ReportOptions, SearchCaps};
use crate::simulation::{
    coupon_collector, estimate_sample_complexity, hard_class_experiment, hollow_star_experiment,
    run_pac, svm_bench, DiscreteDistribution, ExperimentConfig, ExperimentResult, PacInstance,
    SvmBenchConfig,
};
use crate::svm::hard_margin_svm;

pub const SEED_ENV: &str = "HELLYLAB_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "hellylab",
    version,
    about = "Proper PAC learning laboratory for finite concept classes"
)]
struct Cli {
    /// Write the result here (and a manifest next to it) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; falls back to HELLYLAB_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a concept class file.
    GenClass(GenClassArgs),
    /// Compute VC, star, hollow star and dual Helly numbers.
    Params(ParamsArgs),
    /// Run a proper learner on a sample.
    Learn(LearnArgs),
    /// Compression scheme checks.
    #[command(subcommand)]
    Compress(CompressCommand),
    /// Hard-margin SVM.
    #[command(subcommand)]
    Svm(SvmCommand),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyKind {
    Singletons,
    Thresholds,
    Intervals,
    Hard,
    Halfspaces,
    Random,
}

#[derive(Args, Debug)]
struct GenClassArgs {
    #[arg(long, value_enum)]
    kind: FamilyKind,
    /// Number of points for singletons, or grid `1..=n` for thresholds and intervals.
    #[arg(long)]
    n: Option<usize>,
    /// Explicit grid values, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Append the all-negative classifier (singletons, thresholds).
    #[arg(long)]
    augment: bool,
    /// Include the empty interval.
    #[arg(long)]
    include_empty: bool,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k_w: Option<usize>,
    /// CSV of coordinates for halfspace dichotomies.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Row count for random classes.
    #[arg(long)]
    hypotheses: Option<usize>,
}

#[derive(Args, Debug)]
struct ParamsArgs {
    #[arg(long)]
    class: PathBuf,
    #[arg(long, default_value_t = SearchCaps::default().max_points)]
    max_points: usize,
    #[arg(long, default_value_t = 12)]
    star_cap: usize,
    /// Random multisets tried by the projection check.
    #[arg(long, default_value_t = 200)]
    budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    #[serde(rename = "erm")]
    Erm,
    #[serde(rename = "A")]
    A,
    #[serde(rename = "A_ERM")]
    AErm,
    #[serde(rename = "oracle")]
    Oracle,
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erm" | "ERM" => Ok(LearnerKind::Erm),
            "A" | "a" => Ok(LearnerKind::A),
            "A_ERM" | "a_erm" => Ok(LearnerKind::AErm),
            "oracle" => Ok(LearnerKind::Oracle),
            other => Err(Error::invalid(format!("unknown learner '{other}'"))),
        }
    }
}

/// Projection parameter: a number, or the class's dual Helly number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KSpec {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for KSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(KSpec::Auto);
        }
        s.parse()
            .map(KSpec::Fixed)
            .map_err(|_| Error::invalid(format!("k must be 'auto' or an integer, got '{s}'")))
    }
}

impl<'de> Deserialize<'de> for KSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(KSpec::Fixed(k)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_learner(s: &str) -> std::result::Result<LearnerKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_k(s: &str) -> std::result::Result<KSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[arg(long, value_parser = parse_learner)]
    algo: LearnerKind,
    #[arg(long)]
    class: PathBuf,
    #[arg(long)]
    sample: PathBuf,
    /// Extra sample `T` that the randomized learner must fit exactly.
    #[arg(long)]
    t_sample: Option<PathBuf>,
    #[arg(long, value_parser = parse_k, default_value = "auto")]
    k: KSpec,
    #[arg(long, default_value_t = SearchCaps::default().max_points)]
    max_points: usize,
}

#[derive(Subcommand, Debug)]
enum CompressCommand {
    /// Validity and stability over seeded random realizable samples.
    Check(CompressCheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Svm,
    Singleton,
    Closure,
}

#[derive(Args, Debug)]
struct CompressCheckArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = TrialSettings::default().max_sample)]
    max_sample: usize,
    /// Dimension for the SVM scheme.
    #[arg(long, default_value_t = TrialSettings::default().svm_dim)]
    dim: usize,
}

#[derive(Subcommand, Debug)]
enum SvmCommand {
    /// Maximum-margin separator of a labeled CSV.
    Solve {
        /// CSV: coordinate columns followed by a -1/1 label column.
        #[arg(long)]
        points: PathBuf,
    },
    /// Exact-error benchmark against the compression bound.
    Bench(SvmBenchArgs),
}

#[derive(Args, Debug)]
struct SvmBenchArgs {
    #[arg(long, default_value_t = 2)]
    dimension: usize,
    #[arg(long, default_value_t = 200)]
    support_size: usize,
    #[arg(long, default_value_t = 300)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum SimulateCommand {
    /// Failure rates of a learner on an instance described by a JSON config.
    Pac {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Hollow-star instance on singletons.
    LowerBound(LowerBoundArgs),
    /// Instance on the class with given VC dimension and dual Helly number.
    HardClass(HardClassArgs),
    /// Draws needed to collect k - m distinct coupons.
    Coupon {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 4000)]
        trials: usize,
    },
    SvmBench(SvmBenchArgs),
}

#[derive(Args, Debug)]
struct LowerBoundArgs {
    #[arg(long, default_value_t = 32)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, value_parser = parse_learner, default_value = "erm")]
    learner: LearnerKind,
    /// Projection parameter for the recursive learners.
    #[arg(long, value_parser = parse_k, default_value = "auto")]
    k_p: KSpec,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct HardClassArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k_w: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_parser = parse_learner, default_value = "erm")]
    learner: LearnerKind,
    #[arg(long, value_parser = parse_k, default_value = "auto")]
    k_p: KSpec,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// JSON configuration for `simulate pac`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacConfig {
    /// Class file, relative to the config file.
    pub class: PathBuf,
    pub target: usize,
    /// Masses over the domain in order; uniform when absent.
    #[serde(default)]
    pub distribution: Option<Vec<f64>>,
    pub learner: LearnerKind,
    #[serde(default)]
    pub k: KSpec,
    pub epsilon: f64,
    pub delta: f64,
    pub n: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Also search for the empirical sample complexity.
    #[serde(default)]
    pub estimate: bool,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
}

fn default_n_cap() -> usize {
    4096
}

/// Provenance record written next to every result.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: u64,
    pub version: &'static str,
    pub input_digests: Vec<(String, String)>,
    pub duration_seconds: f64,
}

/// Per-invocation state: seed and the inputs read so far.
struct Context {
    seed: u64,
    inputs: Vec<(String, String)>,
}

impl Context {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes =
            std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push((path.display().to_string(), hex));
        String::from_utf8(bytes)
            .map_err(|_| Error::invalid(format!("{} is not UTF-8", path.display())))
    }

    fn class(&mut self, path: &Path) -> Result<ConceptClass> {
        ConceptClass::from_json_str(&self.read(path)?)
    }

    fn sample(&mut self, path: &Path, class: &ConceptClass) -> Result<LabeledSample> {
        let s: LabeledSample = serde_json::from_str(&self.read(path)?)?;
        s.validate(class)?;
        Ok(s)
    }
}

enum Output {
    Json(Value),
    Csv(String),
}

/// Rounds to 12 significant digits so outputs are stable to print.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(round_value(serde_json::to_value(v)?))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::invalid(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))
        }),
        Err(_) => Ok(0),
    }
}

/// Reads a numeric CSV, skipping a header row if the first row is not numeric.
pub fn read_numeric_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::invalid(format!("CSV: {e}")))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(f64::from_str).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::invalid(format!("CSV row {} is not numeric", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::invalid("CSV has no data rows"));
    }
    Ok(rows)
}

/// Labeled points from a CSV whose last column is the -1/1 label.
pub fn read_labeled_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<Label>)> {
    let rows = read_numeric_csv(text)?;
    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for mut row in rows {
        let raw = row
            .pop()
            .filter(|_| !row.is_empty())
            .ok_or_else(|| Error::invalid("CSV rows need coordinates and a label"))?;
        if raw.fract() != 0.0 {
            return Err(Error::invalid(format!("label {raw} is not -1 or 1")));
        }
        labels.push(Label::from_int(raw as i64)?);
        points.push(row);
    }
    Ok((points, labels))
}

fn resolve_k(k: KSpec, class: &ConceptClass, caps: &SearchCaps) -> Result<usize> {
    match k {
        KSpec::Fixed(k) => Ok(k),
        KSpec::Auto => Ok(dual_helly_number(class, caps)?.max(2)),
    }
}

fn make_learner(kind: LearnerKind, k: usize) -> Box<dyn Learner> {
    match kind {
        LearnerKind::Erm => Box::new(Erm),
        LearnerKind::A => Box::new(AlgorithmA { k }),
        LearnerKind::AErm => Box::new(AlgorithmAErm { k }),
        LearnerKind::Oracle => Box::new(TargetOracle),
    }
}

fn results_csv(results: &[ExperimentResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["learner", "n", "failure_rate", "wilson_lo", "wilson_hi"])
        .expect("in-memory CSV");
    for r in results {
        w.write_record([
            r.learner.clone(),
            r.n.to_string(),
            round_sig(r.failure_rate).to_string(),
            round_sig(r.wilson_95.0).to_string(),
            round_sig(r.wilson_95.1).to_string(),
        ])
        .expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

fn experiment_output(
    results: Vec<ExperimentResult>,
    format: Format,
    extra: Value,
) -> Result<Output> {
    Ok(match format {
        Format::Csv => Output::Csv(results_csv(&results)),
        Format::Json => {
            let mut v = json!({ "results": to_json(&results)? });
            if let (Value::Object(o), Value::Object(e)) = (&mut v, extra) {
                o.extend(e);
            }
            Output::Json(v)
        }
    })
}

fn gen_class(a: &GenClassArgs, ctx: &mut Context) -> Result<Output> {
    let grid = || -> Result<Vec<f64>> {
        match (&a.grid, a.n) {
            (Some(g), _) => Ok(g.clone()),
            (None, Some(n)) => Ok((1..=n).map(|v| v as f64).collect()),
            (None, None) => Err(Error::invalid("need --grid or --n")),
        }
    };
    let need =
        |v: Option<usize>, flag: &str| v.ok_or_else(|| Error::invalid(format!("missing --{flag}")));
    let family = match a.kind {
        FamilyKind::Singletons => ClassFamily::Singletons {
            n: need(a.n, "n")?,
            augment_all_negative: a.augment,
        },
        FamilyKind::Thresholds => ClassFamily::Thresholds {
            grid: grid()?,
            augment_all_negative: a.augment,
        },
        FamilyKind::Intervals => ClassFamily::Intervals {
            grid: grid()?,
            include_empty: a.include_empty,
        },
        FamilyKind::Hard => ClassFamily::Hard {
            d: need(a.d, "d")?,
            k_w: need(a.k_w, "k-w")?,
        },
        FamilyKind::Halfspaces => {
            let path = a
                .points
                .as_ref()
                .ok_or_else(|| Error::invalid("missing --points"))?;
            ClassFamily::HalfspaceDichotomies {
                points: read_numeric_csv(&ctx.read(path)?)?,
            }
        }
        FamilyKind::Random => ClassFamily::Random {
            points: need(a.n, "n")?,
            hypotheses: need(a.hypotheses, "hypotheses")?,
            seed: ctx.seed,
        },
    };
    Ok(Output::Json(generate_class(&family)?.to_json()))
}

fn params(a: &ParamsArgs, ctx: &mut Context) -> Result<Output> {
    let class = ctx.class(&a.class)?;
    let opts = ReportOptions {
        caps: SearchCaps::with_points(a.max_points),
        star_cap: a.star_cap,
        projection_budget: a.budget,
        seed: ctx.seed,
    };
    Ok(Output::Json(to_json(&parameter_report(&class, &opts)?)?))
}

fn learn(a: &LearnArgs, ctx: &mut Context) -> Result<Output> {
    let class = ctx.class(&a.class)?;
    let sample = ctx.sample(&a.sample, &class)?;
    let t = match &a.t_sample {
        Some(p) => ctx.sample(p, &class)?,
        None => LabeledSample::empty(),
    };
    let caps = SearchCaps::with_points(a.max_points);
    let (h, k) = match a.algo {
        LearnerKind::Erm => (erm(&class, &sample.concat(&t))?, None),
        LearnerKind::A => {
            let k = resolve_k(a.k, &class, &caps)?;
            (algorithm_a(&class, &sample, &t, k, ctx.seed)?, Some(k))
        }
        LearnerKind::AErm => {
            let k = resolve_k(a.k, &class, &caps)?;
            (algorithm_a_erm(&class, &sample.concat(&t), k)?, Some(k))
        }
        LearnerKind::Oracle => {
            return Err(Error::invalid(
                "the oracle learner needs a target; use simulate",
            ))
        }
    };
    Ok(Output::Json(json!({
        "hypothesis": h,
        "k": k,
        "row": class.row(h),
    })))
}

fn compress_check(a: &CompressCheckArgs, ctx: &mut Context) -> Result<Output> {
    let kind = match a.scheme {
        SchemeArg::Svm => SchemeKind::Svm,
        SchemeArg::Singleton => SchemeKind::Singleton,
        SchemeArg::Closure => SchemeKind::Closure,
    };
    let settings = TrialSettings {
        svm_dim: a.dim,
        max_sample: a.max_sample,
        ..TrialSettings::default()
    };
    Ok(Output::Json(to_json(&run_scheme_trials(
        kind, a.trials, ctx.seed, &settings,
    )?)?))
}

fn svm_solve(points: &Path, ctx: &mut Context) -> Result<Output> {
    let (xs, ys) = read_labeled_csv(&ctx.read(points)?)?;
    let sol = hard_margin_svm(&xs, &ys)?;
    Ok(Output::Json(round_value(json!({
        "w": sol.hypothesis.weights,
        "v": sol.hypothesis.threshold,
        "margin": sol.margin,
        "support_indices": sol.support_indices,
    }))))
}

fn bench(a: &SvmBenchArgs, ctx: &Context) -> Result<Output> {
    let cfg = SvmBenchConfig {
        dimension: a.dimension,
        support_size: a.support_size,
        m: a.m,
        delta: a.delta,
        trials: a.trials,
        seed: ctx.seed,
    };
    Ok(Output::Json(to_json(&svm_bench(&cfg)?)?))
}

fn simulate_pac(
    config: &Path,
    format: Format,
    ctx: &mut Context,
    seed_flag: Option<u64>,
) -> Result<Output> {
    let cfg: PacConfig = serde_json::from_str(&ctx.read(config)?)?;
    let class_path = config.parent().unwrap_or(Path::new(".")).join(&cfg.class);
    let class = ctx.class(&class_path)?;
    let dist = match cfg.distribution {
        Some(masses) => DiscreteDistribution::over_domain(masses)?,
        None => DiscreteDistribution::uniform(class.domain_size())?,
    };
    if seed_flag.is_none() {
        if let Some(s) = cfg.seed {
            ctx.seed = s;
        }
    }
    let k = match cfg.learner {
        LearnerKind::A | LearnerKind::AErm => resolve_k(cfg.k, &class, &SearchCaps::default())?,
        _ => 0,
    };
    let learner = make_learner(cfg.learner, k);
    let instance = PacInstance::new(class, dist, cfg.target)?;
    let results = cfg
        .n
        .iter()
        .map(|&n| {
            let ec = ExperimentConfig {
                epsilon: cfg.epsilon,
                delta: cfg.delta,
                n,
                trials: cfg.trials,
                seed: ctx.seed,
            };
            run_pac(learner.as_ref(), &instance, &ec)
        })
        .collect::<Result<Vec<_>>>()?;
    let estimate = if cfg.estimate {
        Some(estimate_sample_complexity(
            learner.as_ref(),
            &instance,
            cfg.epsilon,
            cfg.delta,
            cfg.trials,
            ctx.seed,
            cfg.n_cap,
        )?)
    } else {
        None
    };
    experiment_output(results, format, json!({ "estimate": to_json(&estimate)? }))
}

fn lower_bound(a: &LowerBoundArgs, ctx: &Context) -> Result<Output> {
    // singletons over k points have dual Helly number k
    let k_p = match a.k_p {
        KSpec::Auto => a.k,
        KSpec::Fixed(k) => k,
    };
    let learner = make_learner(a.learner, k_p);
    let results = a
        .n
        .iter()
        .map(|&n| hollow_star_experiment(a.k, a.epsilon, n, a.trials, ctx.seed, learner.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let threshold = crate::simulation::hollow_star_sample_threshold(a.k, a.epsilon);
    experiment_output(
        results,
        a.format,
        json!({ "sample_threshold": round_sig(threshold) }),
    )
}

fn hard_class(a: &HardClassArgs, ctx: &Context) -> Result<Output> {
    let k_p = match a.k_p {
        KSpec::Auto => a.k_w,
        KSpec::Fixed(k) => k,
    };
    let learner = make_learner(a.learner, k_p);
    let results =
        a.n.iter()
            .map(|&n| {
                hard_class_experiment(
                    a.d,
                    a.k_w,
                    a.epsilon,
                    n,
                    a.trials,
                    ctx.seed,
                    learner.as_ref(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
    let level = crate::simulation::hard_class_level(a.d, a.k_w, a.epsilon)?;
    experiment_output(results, a.format, json!({ "level": level }))
}

fn run(cli: &Cli, ctx: &mut Context) -> Result<Output> {
    match &cli.command {
        Command::GenClass(a) => gen_class(a, ctx),
        Command::Params(a) => params(a, ctx),
        Command::Learn(a) => learn(a, ctx),
        Command::Compress(CompressCommand::Check(a)) => compress_check(a, ctx),
        Command::Svm(SvmCommand::Solve { points }) => svm_solve(points, ctx),
        Command::Svm(SvmCommand::Bench(a)) => bench(a, ctx),
        Command::Simulate(s) => match s {
            SimulateCommand::Pac { config, format } => simulate_pac(config, *format, ctx, cli.seed),
            SimulateCommand::LowerBound(a) => lower_bound(a, ctx),
            SimulateCommand::HardClass(a) => hard_class(a, ctx),
            SimulateCommand::Coupon { k, m, trials } => Ok(Output::Json(to_json(
                &coupon_collector(*k, *m, *trials, ctx.seed)?,
            )?)),
            SimulateCommand::SvmBench(a) => bench(a, ctx),
        },
    }
}

fn render(out: &Output) -> Result<String> {
    Ok(match out {
        Output::Json(v) => serde_json::to_string_pretty(v)? + "\n",
        Output::Csv(s) => s.clone(),
    })
}

fn report_error(e: &Error) {
    let body = json!({ "error": { "code": e.code(), "message": e.to_string() } });
    eprintln!("{body}");
}

fn execute(cli: &Cli, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let mut ctx = Context {
        seed: resolve_seed(cli.seed)?,
        inputs: Vec::new(),
    };
    let output = match cli.threads {
        Some(0) => return Err(Error::invalid("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(|| run(cli, &mut ctx))?,
        None => run(cli, &mut ctx)?,
    };
    let text = render(&output)?;
    let manifest = RunManifest {
        command_line: argv,
        seed: ctx.seed,
        version: env!("CARGO_PKG_VERSION"),
        input_digests: ctx.inputs,
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut mpath = path.clone().into_os_string();
            mpath.push(".manifest.json");
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            eprintln!("{}", json!({ "manifest": manifest }));
        }
    }
    Ok(())
}

/// Runs the command line and returns the process exit status: 0 on success,
/// 2 for invalid input, 3 for violated preconditions.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return status;
        }
    };
    match execute(&cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            e.exit_status()
        }
    }
}
