//! Command-line front end. Every command is a pure function of its flags
//! (plus an optional flat config file) and returns a process exit code:
//! 0 success, 1 configuration or precondition error, 2 partial trial
//! failures, 3 invariant breach.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use pamlab_core::oracle::MAX_ENUMERATED_PATHS;
use pamlab_core::path::{EventFlags, PathClassifier};
use pamlab_core::rng::{derive_seed, stream, PATH_STREAM};
use pamlab_core::scenario::{default_eta, detect_switch_with_retries};
use pamlab_core::stats::median;
use pamlab_core::{
    compare_dp_vs_oracle, endpoint_law, enumerate_ball, forward_recursion, h_n, make_kernel, modified_field_stats,
    sample_pareto_field, viterbi_path, Error, FieldRealization, PathSampler, WalkKernel,
};
use serde::Serialize;

use crate::experiments::{
    ordered_parallel, run_trials, summarize, w_over_n_histogram, TrialConfig, TrialRecord, HISTOGRAM_BINS,
};
use crate::format::{f17, f17_opt};
use crate::io::{
    read_flat_config, write_field_csv, write_histogram_csv, write_json_line, write_jsonl, write_law_csv,
    write_path_csv, write_records_csv, write_scan_csv,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_BREACH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pamlab", version, about = "Discrete-time parabolic Anderson polymer lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Disorder-averaged batch: one Pareto field per trial, exact endpoint law.
    Simulate(Opts),
    /// Transfer recursion against brute-force path enumeration.
    OracleCheck(Opts),
    /// Path-event frequencies under the quenched measure.
    PathStats(Opts),
    /// The deterministic two-peak field and its switching time.
    ScenarioD(Opts),
    /// Field, endpoint law and paths of one realization as CSV.
    Snapshot(Opts),
}

/// Flags shared by all commands; each command reads the ones it needs.
#[derive(Args, Debug, Default, Clone)]
pub struct Opts {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of steps.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Path samples per field.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed; required by stochastic commands.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `uniform`, or 2d+1 weights in lexicographic step order
    /// (d=1: left,hold,right; d=2: (-1,0),(0,-1),(0,0),(0,1),(1,0)).
    #[arg(long)]
    pub kernel: Option<String>,
    /// Output directory; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `jsonl` or `csv`.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Omit wall-clock fields so reruns are byte-identical.
    #[arg(long)]
    pub canonical: bool,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Event for path-stats: c, a1, a2, w1, w2, tw1, tw2, d1, d2, k1, k2, origin.
    #[arg(long)]
    pub event: Option<String>,
    /// Use the potential xi = 0 (path-stats debugging aid).
    #[arg(long)]
    pub zero_field: bool,
    /// Scenario scale n.
    #[arg(long = "n")]
    pub small_n: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn breach(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BREACH,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Corrupt(_) | Error::ProvenanceMismatch(_) => Failure::breach(e.to_string()),
            _ => Failure::config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::config(format!("io: {}", e))
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::config(format!("{:#}", e))
    }
}

type CmdResult = Result<i32, Failure>;

const KNOWN_KEYS: &[&str] = &[
    "alpha", "d", "N", "trials", "samples", "seed", "master_seed", "kernel", "out", "format", "threads",
    "canonical", "event", "zero_field", "n", "epsilon", "eta",
];

/// Fills unset flags from the config file.
fn merge_config(mut o: Opts) -> Result<Opts, Failure> {
    let Some(path) = o.config.clone() else {
        return Ok(o);
    };
    let map = read_flat_config(&path)?;
    for k in map.keys() {
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(Failure::config(format!("config: unknown key `{}`", k)));
        }
    }
    fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, Failure> {
        map.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Failure::config(format!("config: invalid value `{}` for `{}`", v, key)))
            })
            .transpose()
    }
    o.alpha = o.alpha.or(get(&map, "alpha")?);
    o.d = o.d.or(get(&map, "d")?);
    o.big_n = o.big_n.or(get(&map, "N")?);
    o.trials = o.trials.or(get(&map, "trials")?);
    o.samples = o.samples.or(get(&map, "samples")?);
    o.seed = o.seed.or(get(&map, "seed")?).or(get(&map, "master_seed")?);
    o.kernel = o.kernel.or(get(&map, "kernel")?);
    o.out = o.out.or(get::<String>(&map, "out")?.map(PathBuf::from));
    o.format = o.format.or(get(&map, "format")?);
    o.threads = o.threads.or(get(&map, "threads")?);
    o.canonical |= get(&map, "canonical")?.unwrap_or(false);
    o.event = o.event.or(get(&map, "event")?);
    o.zero_field |= get(&map, "zero_field")?.unwrap_or(false);
    o.small_n = o.small_n.or(get(&map, "n")?);
    o.epsilon = o.epsilon.or(get(&map, "epsilon")?);
    o.eta = o.eta.or(get(&map, "eta")?);
    Ok(o)
}

fn require<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::config(format!("missing required parameter `{}`", name)))
}

fn alpha_of(o: &Opts) -> Result<f64, Failure> {
    let a = require(o.alpha, "alpha")?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Failure::config(format!("invalid parameter `alpha`: must be positive and finite, got {}", a)));
    }
    Ok(a)
}

fn dim_of(o: &Opts) -> Result<usize, Failure> {
    let d = o.d.unwrap_or(1);
    if !(1..=3).contains(&d) {
        return Err(Failure::config(format!("invalid parameter `d`: expected 1, 2 or 3, got {}", d)));
    }
    Ok(d)
}

fn positive(v: Option<usize>, name: &str, default: Option<usize>) -> Result<usize, Failure> {
    let v = match (v, default) {
        (Some(v), _) => v,
        (None, Some(d)) => d,
        (None, None) => require(None, name)?,
    };
    if v == 0 {
        return Err(Failure::config(format!("invalid parameter `{}`: must be at least 1", name)));
    }
    Ok(v)
}

/// `uniform` or comma-separated weights in canonical step order.
pub fn parse_kernel(spec: Option<&str>, d: usize) -> Result<WalkKernel, Failure> {
    match spec.map(str::trim) {
        None | Some("uniform") => Ok(WalkKernel::uniform(d)?),
        Some(list) => {
            let w: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let w = w.map_err(|_| Failure::config(format!("invalid parameter `kernel`: cannot parse `{}`", list)))?;
            Ok(make_kernel(d, &w)?)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Format {
    Jsonl,
    Csv,
}

fn format_of(o: &Opts) -> Result<Format, Failure> {
    match o.format.as_deref().unwrap_or("jsonl") {
        "jsonl" | "json-lines" => Ok(Format::Jsonl),
        "csv" => Ok(Format::Csv),
        f => Err(Failure::config(format!("invalid parameter `format`: `{}` (jsonl or csv)", f))),
    }
}

fn threads_of(o: &Opts) -> Result<Option<usize>, Failure> {
    match o.threads {
        Some(0) => Err(Failure::config("invalid parameter `threads`: must be at least 1")),
        t => Ok(t),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Where primary output goes: a named file in `--out`, or stdout.
fn sink(o: &Opts, name: &str) -> Result<Box<dyn Write>, Failure> {
    Ok(match &o.out {
        Some(dir) => Box::new(create(dir, name)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Simulate(o) => merge_config(o).and_then(cmd_simulate),
        Command::OracleCheck(o) => merge_config(o).and_then(cmd_oracle_check),
        Command::PathStats(o) => merge_config(o).and_then(cmd_path_stats),
        Command::ScenarioD(o) => merge_config(o).and_then(cmd_scenario_d),
        Command::Snapshot(o) => merge_config(o).and_then(cmd_snapshot),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (program name first) and runs; clap errors exit with 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn cmd_simulate(o: Opts) -> CmdResult {
    let alpha = alpha_of(&o)?;
    let d = dim_of(&o)?;
    let n = require(o.big_n, "N")?;
    let trials = positive(o.trials, "trials", None)?;
    let seed = require(o.seed, "seed")?;
    let format = format_of(&o)?;
    let threads = threads_of(&o)?;
    let mut cfg = TrialConfig::new(alpha, d, n, trials, seed)?;
    cfg.kernel = parse_kernel(o.kernel.as_deref(), d)?;
    cfg.path_samples = o.samples.unwrap_or(0);
    cfg.validate()?;

    let outcomes = run_trials(&cfg, threads)?;
    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    for outcome in outcomes {
        match outcome {
            Ok(mut r) => {
                if o.canonical {
                    r.canonicalize();
                }
                records.push(r);
            }
            Err(f) => {
                failures += 1;
                eprintln!("trial failed: {}", f);
            }
        }
    }
    let ext = if format == Format::Csv { "csv" } else { "jsonl" };
    let mut out = sink(&o, &format!("records.{}", ext))?;
    match format {
        Format::Jsonl => write_jsonl(&mut out, &records)?,
        Format::Csv => write_records_csv(&mut out, &records)?,
    }
    out.flush()?;
    if !records.is_empty() {
        let summary = summarize(&records)?;
        match &o.out {
            Some(dir) => {
                let mut s = create(dir, "summary.json")?;
                write_json_line(&mut s, &summary)?;
                s.flush()?;
                if d == 1 {
                    let mut h = create(dir, "w_over_N_hist.csv")?;
                    write_histogram_csv(&mut h, &w_over_n_histogram(&records, HISTOGRAM_BINS))?;
                    h.flush()?;
                }
            }
            None => eprintln!("{}", serde_json::to_string(&summary).map_err(|e| Failure::config(e.to_string()))?),
        }
    }
    for r in &records {
        if let Err(m) = r.check_invariants() {
            return Err(Failure::breach(m));
        }
    }
    Ok(if failures > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

#[derive(Serialize)]
struct OracleLine {
    trial: u64,
    seed: u64,
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    path_count: u64,
    #[serde(serialize_with = "f17")]
    log_u_abs: f64,
    #[serde(serialize_with = "f17")]
    log_p_abs: f64,
    #[serde(serialize_with = "f17")]
    relative: f64,
    #[serde(serialize_with = "f17")]
    viterbi_gap: f64,
    pass: bool,
}

pub const ORACLE_TOLERANCE: f64 = 1e-10;

pub fn cmd_oracle_check(o: Opts) -> CmdResult {
    let alpha = alpha_of(&o)?;
    let d = dim_of(&o)?;
    let n = require(o.big_n, "N")?;
    let trials = positive(o.trials, "trials", Some(1))?;
    let seed = require(o.seed, "seed")?;
    let kernel = parse_kernel(o.kernel.as_deref(), d)?;
    let count = ((2 * d + 1) as u128).checked_pow(n as u32);
    if count.is_none_or(|c| c > MAX_ENUMERATED_PATHS) {
        return Err(Failure::config(format!(
            "path count {}^{} exceeds the enumeration cap of {} paths",
            2 * d + 1,
            n,
            MAX_ENUMERATED_PATHS
        )));
    }
    let ball = std::sync::Arc::new(enumerate_ball(d, n)?);
    let mut out = sink(&o, "oracle.jsonl")?;
    let mut all = true;
    for i in 0..trials as u64 {
        let s = derive_seed(seed, i);
        let field = sample_pareto_field(s, alpha, ball.clone())?;
        let r = compare_dp_vs_oracle(&field, &kernel, n)?;
        let pass = r.within(ORACLE_TOLERANCE);
        all &= pass;
        write_json_line(
            &mut out,
            &OracleLine {
                trial: i,
                seed: s,
                d,
                n,
                path_count: count.unwrap_or(0) as u64,
                log_u_abs: r.log_u_abs,
                log_p_abs: r.log_p_abs,
                relative: r.relative,
                viterbi_gap: r.viterbi_gap,
                pass,
            },
        )?;
    }
    out.flush()?;
    Ok(if all { EXIT_OK } else { EXIT_BREACH })
}

/// Selects one flag of a classified path.
pub fn event_selector(name: &str) -> Option<fn(&EventFlags) -> bool> {
    Some(match name.to_ascii_lowercase().as_str() {
        "c" => |f| f.in_c,
        "a1" => |f| f.in_a[0],
        "a2" => |f| f.in_a[1],
        "w1" => |f| f.in_w[0],
        "w2" => |f| f.in_w[1],
        "tw1" => |f| f.in_tilde_w[0],
        "tw2" => |f| f.in_tilde_w[1],
        "d1" => |f| f.in_d[0],
        "d2" => |f| f.in_d[1],
        "k1" => |f| f.in_k[0],
        "k2" => |f| f.in_k[1],
        _ => return None,
    })
}

#[derive(Serialize, Clone)]
struct EventLine {
    trial: u64,
    seed: u64,
    event: String,
    hits: usize,
    samples: usize,
    #[serde(serialize_with = "f17")]
    estimate: f64,
    #[serde(serialize_with = "f17")]
    ci_low: f64,
    #[serde(serialize_with = "f17")]
    ci_high: f64,
    nesting_violations: usize,
}

#[derive(Serialize)]
struct EventSummary {
    event: String,
    fields: usize,
    #[serde(serialize_with = "f17_opt")]
    median_estimate: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    mean_estimate: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    min_estimate: Option<f64>,
}

pub fn cmd_path_stats(o: Opts) -> CmdResult {
    let alpha = alpha_of(&o)?;
    let d = dim_of(&o)?;
    let n = require(o.big_n, "N")?;
    let trials = positive(o.trials, "trials", Some(1))?;
    let seed = require(o.seed, "seed")?;
    let samples = o.samples.unwrap_or(10_000);
    if samples < pamlab_core::path::MIN_EVENT_SAMPLES {
        return Err(Failure::config(format!(
            "invalid parameter `samples`: must be at least {}",
            pamlab_core::path::MIN_EVENT_SAMPLES
        )));
    }
    let kernel = parse_kernel(o.kernel.as_deref(), d)?;
    let threads = threads_of(&o)?;
    let event = o.event.clone().unwrap_or_else(|| "c".into());
    let origin = event.eq_ignore_ascii_case("origin");
    let select = match event_selector(&event) {
        Some(s) => Some(s),
        None if origin => None,
        None => return Err(Failure::config(format!("invalid parameter `event`: unknown event `{}`", event))),
    };
    let h = h_n(n, alpha)?;
    let ball = std::sync::Arc::new(enumerate_ball(d, n)?);

    let lines = ordered_parallel(trials, threads, |i| -> Result<EventLine, Error> {
        let s = derive_seed(seed, i as u64);
        let field = if o.zero_field {
            FieldRealization::constant(ball.clone(), 0.0)?
        } else {
            sample_pareto_field(s, alpha, ball.clone())?
        };
        let fronts = forward_recursion(&field, &kernel, n)?;
        let law = endpoint_law(&fronts)?;
        let modified = modified_field_stats(&field, n)?;
        let mut classifier = PathClassifier::with_h(&field, &modified, &law, h)?;
        let sampler = PathSampler::new(&fronts, &field, &kernel)?;
        let mut rng = stream(s, PATH_STREAM);
        let (mut hits, mut violations) = (0, 0);
        for _ in 0..samples {
            let p = sampler.sample(&mut rng);
            let flags = classifier.classify(&p)?;
            if !flags.nesting_holds() {
                violations += 1;
            }
            let hit = match select {
                Some(f) => f(&flags),
                None => p.endpoint().is_origin(),
            };
            hits += hit as usize;
        }
        let est = pamlab_core::EventEstimate::from_counts(hits, samples);
        Ok(EventLine {
            trial: i as u64,
            seed: s,
            event: event.to_ascii_lowercase(),
            hits,
            samples,
            estimate: est.estimate,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            nesting_violations: violations,
        })
    });
    let mut ok = Vec::new();
    let mut failures = 0;
    for (i, l) in lines.into_iter().enumerate() {
        match l {
            Ok(l) => ok.push(l),
            Err(e) => {
                failures += 1;
                eprintln!("trial {} failed: {}", i, e);
            }
        }
    }
    let mut out = sink(&o, "path_stats.jsonl")?;
    write_jsonl(&mut out, &ok)?;
    let est: Vec<f64> = ok.iter().map(|l| l.estimate).collect();
    let summary = EventSummary {
        event: event.to_ascii_lowercase(),
        fields: ok.len(),
        median_estimate: median(&est),
        mean_estimate: pamlab_core::stats::mean(&est),
        min_estimate: est.iter().cloned().reduce(f64::min),
    };
    match &o.out {
        Some(dir) => {
            let mut s = create(dir, "summary.json")?;
            write_json_line(&mut s, &summary)?;
            s.flush()?;
        }
        None => write_json_line(&mut out, &summary)?,
    }
    out.flush()?;
    let violations: usize = ok.iter().map(|l| l.nesting_violations).sum();
    if violations > 0 {
        return Err(Failure::breach(format!("{} paths violate event nesting", violations)));
    }
    Ok(if failures > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

#[derive(Serialize)]
struct ScenarioSummary {
    n: usize,
    #[serde(serialize_with = "f17")]
    epsilon: f64,
    #[serde(serialize_with = "f17")]
    eta: f64,
    #[serde(serialize_with = "f17")]
    alpha: f64,
    attempts: usize,
    x: i32,
    y: i32,
    #[serde(serialize_with = "f17")]
    xi_x: f64,
    #[serde(serialize_with = "f17")]
    xi_y: f64,
    clauses_hold: bool,
    #[serde(rename = "N_star")]
    n_star: usize,
    window_lo: usize,
    window_hi: usize,
    w_at_n_star: i32,
    z1_at_n_star: i32,
    z2_at_n_star: i32,
    w_is_z2_at_n_star: bool,
    #[serde(serialize_with = "f17")]
    p_w_at_n_star: f64,
    comparator_chose_z1: bool,
    any_w_is_z2: bool,
}

pub fn cmd_scenario_d(o: Opts) -> CmdResult {
    if let Some(d) = o.d {
        if d != 1 {
            return Err(Failure::config("scenario precondition violated: the construction is one-dimensional (d = 1)"));
        }
    }
    let alpha = o.alpha.unwrap_or(2.0);
    let n = positive(o.small_n, "n", Some(400))?;
    let epsilon = o.epsilon.unwrap_or(0.05);
    let kernel = parse_kernel(o.kernel.as_deref(), 1)?;
    let eta = match o.eta {
        Some(e) => e,
        None => default_eta(&kernel, alpha)?,
    };
    let (scenario, report, attempts) = detect_switch_with_retries(n, epsilon, eta, &kernel, alpha)?;
    let mut out = sink(&o, "scenario_scan.csv")?;
    write_scan_csv(&mut out, &report)?;
    out.flush()?;
    let summary = ScenarioSummary {
        n,
        epsilon: scenario.epsilon,
        eta,
        alpha,
        attempts,
        x: scenario.x,
        y: scenario.y,
        xi_x: scenario.xi_x(),
        xi_y: scenario.xi_y(),
        clauses_hold: scenario.clauses.all_hold(),
        n_star: report.n_star,
        window_lo: report.lo,
        window_hi: report.hi,
        w_at_n_star: report.w_at_n_star.x(),
        z1_at_n_star: report.z1_at_n_star.x(),
        z2_at_n_star: report.z2_at_n_star.x(),
        w_is_z2_at_n_star: report.w_is_z2_at_n_star,
        p_w_at_n_star: report.p_w_at_n_star,
        comparator_chose_z1: report.comparator_at_n_star.chose_z1,
        any_w_is_z2: report.any_w_is_z2,
    };
    match &o.out {
        Some(dir) => {
            let mut s = create(dir, "scenario.json")?;
            write_json_line(&mut s, &summary)?;
            s.flush()?;
        }
        None => eprintln!("{}", serde_json::to_string(&summary).map_err(|e| Failure::config(e.to_string()))?),
    }
    Ok(EXIT_OK)
}

pub fn cmd_snapshot(o: Opts) -> CmdResult {
    let alpha = alpha_of(&o)?;
    let d = dim_of(&o)?;
    let n = require(o.big_n, "N")?;
    let seed = require(o.seed, "seed")?;
    let dir = require(o.out.clone(), "out")?;
    let kernel = parse_kernel(o.kernel.as_deref(), d)?;
    let s = derive_seed(seed, 0);
    let field = sample_pareto_field(s, alpha, std::sync::Arc::new(enumerate_ball(d, n)?))?;
    let fronts = forward_recursion(&field, &kernel, n)?;
    let law = endpoint_law(&fronts)?;
    let best = viterbi_path(&field, &kernel, n)?;
    let sample = PathSampler::new(&fronts, &field, &kernel)?.sample(&mut stream(s, PATH_STREAM));
    let mut f = create(&dir, "field.csv")?;
    write_field_csv(&mut f, &field, n)?;
    f.flush()?;
    let mut f = create(&dir, "law.csv")?;
    write_law_csv(&mut f, &law)?;
    f.flush()?;
    let mut f = create(&dir, "viterbi_path.csv")?;
    write_path_csv(&mut f, &best)?;
    f.flush()?;
    let mut f = create(&dir, "sample_path.csv")?;
    write_path_csv(&mut f, &sample)?;
    f.flush()?;
    Ok(EXIT_OK)
}

/// Re-exported for tests that drive a command without the parser.
pub fn records_from(outcomes: Vec<crate::experiments::TrialOutcome>) -> Vec<TrialRecord> {
    outcomes.into_iter().filter_map(Result::ok).collect()
}
