//! The `submemo` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use submemo::bounds::{subgradient_at, supergradient_grow, supergradient_shrink};
use submemo::constrained::{ds_minimize, scsc_solve, scsk_solve, DsVariant, DEFAULT_MAX_ITERATIONS};
use submemo::maximize::{
    bidirectional_greedy, distributed_greedy, greedy_lazy, greedy_naive, greedy_stochastic, local_search_usm,
    minorize_maximize, randomized_greedy, sieve_streaming, Constraint, SigmaRule, DEFAULT_LOCAL_SEARCH_EPS,
};
use submemo::minimize::{
    lovasz_default_iterations, lovasz_subgradient_min, min_norm_point, mmin_constrained, MinFamily, MnpOptions,
};
use submemo::{FunctionInstance, FunctionSpec, OracleMode, Permutation, Subset};

use crate::experiment::{budget_size, gradient_set, run_experiment, write_report, BenchAlgorithm, ExperimentConfig};
use crate::io::resolve_function;
use crate::{input_error, BenchError};

#[derive(Parser, Debug)]
#[command(
    name = "submemo",
    version,
    about = "Submodular optimization with memoized statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Pm,
    Vo,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// A spec file (.json function spec or set system, .csv dense matrix) or
    /// `synthetic:<kind>,n=<n>,seed=<seed>[,key=value...]`.
    #[arg(long, required = true)]
    pub function: Vec<String>,
    /// Class for dense-matrix files.
    #[arg(long, default_value = "facility_location")]
    pub class: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Pm)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for result / report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
}

#[derive(Args, Debug, Clone)]
pub struct Budget {
    /// Cardinality budget.
    #[arg(long, conflicts_with = "budget_frac")]
    pub k: Option<usize>,
    /// Cardinality budget as a fraction of n (rounded up).
    #[arg(long)]
    pub budget_frac: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MaxAlgorithm {
    NaiveGreedy,
    LazyGreedy,
    StochasticGreedy,
    Sieve,
    Distributed,
    LocalSearch,
    Bidirectional,
    RandomizedGreedy,
    MmRandom,
    MmGreedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MinAlgorithm {
    MinNorm,
    Lovasz,
    Mmin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    SubSup,
    SupSub,
    ModMod,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Maximize f under a cardinality budget (or unconstrained).
    Maximize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, value_enum, default_value_t = MaxAlgorithm::LazyGreedy)]
        algorithm: MaxAlgorithm,
        /// Accuracy parameter of stochastic greedy and sieve streaming.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        machines: usize,
    },
    /// Minimize f (unconstrained, or |X| >= k for mmin).
    Minimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, value_enum, default_value_t = MinAlgorithm::MinNorm)]
        algorithm: MinAlgorithm,
        /// Subgradient iterations (default ceil(1 / eps^2)).
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Cap on minimum-norm-point major cycles.
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
    },
    /// min f(X) subject to g(X) >= c.
    Scsc {
        #[command(flatten)]
        common: Common,
        /// The constraint function g.
        #[arg(long)]
        g: String,
        /// Cover target c.
        #[arg(long, conflicts_with = "bound_frac")]
        bound: Option<f64>,
        /// Cover target as a fraction of g(V).
        #[arg(long)]
        bound_frac: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
    },
    /// max g(X) subject to f(X) <= b.
    Scsk {
        #[command(flatten)]
        common: Common,
        /// The objective g.
        #[arg(long)]
        g: String,
        /// Budget b on f.
        #[arg(long, conflicts_with = "bound_frac")]
        bound: Option<f64>,
        /// Budget as a fraction of f(V).
        #[arg(long)]
        bound_frac: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
    },
    /// min f(X) - g(X).
    DsMin {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value_t = VariantArg::ModMod)]
        variant: VariantArg,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
    },
    /// Subgradient and both supergradients at a seeded random set.
    Gradients {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budget: Budget,
    },
    /// Timed PM / VO comparison; writes report.csv and report.json.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BenchAlgorithm::LazyGreedy)]
        algorithm: BenchAlgorithm,
        /// Budgets as fractions of n; repeat or comma-separate.
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.15, 0.30])]
        budget_frac: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        /// Run cells sequentially (no thread pool) for cleaner timings.
        #[arg(long)]
        timing_strict: bool,
    },
    /// Statistic consistency, oracle equivalence and randomized
    /// submodularity / monotonicity audits; prints a pass/fail table.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

/// Parses `args` (program name first), runs the command, writes output to
/// `out`, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn single_function(common: &Common) -> Result<FunctionSpec, BenchError> {
    if common.function.len() != 1 {
        return input_error("this command takes exactly one --function");
    }
    resolve_function(&common.function[0], &common.class)
}

fn instance(spec: &FunctionSpec, mode: ModeArg) -> Result<FunctionInstance, BenchError> {
    let f = spec.build()?;
    match mode {
        ModeArg::Pm => Ok(f),
        ModeArg::Vo => Ok(f.to_value_oracle()),
        ModeArg::Both => input_error("--mode both is only available for bench"),
    }
}

fn cardinality(budget: &Budget, n: usize) -> Result<Option<usize>, BenchError> {
    match (budget.k, budget.budget_frac) {
        (Some(k), _) => Ok(Some(k)),
        (None, Some(frac)) if frac > 0.0 && frac <= 1.0 => Ok(Some(budget_size(frac, n))),
        (None, Some(frac)) => input_error(format!("--budget-frac {} outside (0, 1]", frac)),
        (None, None) => Ok(None),
    }
}

fn require_k(budget: &Budget, n: usize) -> Result<usize, BenchError> {
    match cardinality(budget, n)? {
        Some(k) => Ok(k),
        None => input_error("this algorithm needs --k or --budget-frac"),
    }
}

/// Flattens a JSON object into `field,value` rows; arrays become
/// space-separated lists and nested objects dotted names.
fn flat_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{}.{}", prefix, k)
                    };
                    walk(&key, v, rows);
                }
            }
            Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                rows.push((prefix.to_string(), parts.join(" ")));
            }
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    walk(&format!("{}.{}", prefix, i), item, rows);
                }
            }
            other => rows.push((prefix.to_string(), scalar(other))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn emit(common: &Common, value: &Value, out: &mut dyn Write) -> Result<(), BenchError> {
    let text = match common.report {
        ReportFormat::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        ReportFormat::Csv => flat_csv(value),
    };
    if let Some(dir) = &common.out {
        let io = |source| BenchError::Io {
            path: dir.display().to_string(),
            source,
        };
        fs::create_dir_all(dir).map_err(io)?;
        let name = match common.report {
            ReportFormat::Json => "result.json",
            ReportFormat::Csv => "result.csv",
        };
        fs::write(dir.join(name), &text).map_err(io)?;
    }
    out.write_all(text.as_bytes()).map_err(|source| BenchError::Io {
        path: "<stdout>".to_string(),
        source,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn header(spec: &FunctionSpec, mode: ModeArg, algorithm: &str) -> Value {
    json!({
        "class": spec.class_name(),
        "n": spec.n(),
        "mode": match mode { ModeArg::Pm => "PM", ModeArg::Vo => "VO", ModeArg::Both => "both" },
        "algorithm": algorithm,
    })
}

fn with_result(mut head: Value, result: Value) -> Value {
    head.as_object_mut()
        .expect("object")
        .insert("result".to_string(), result);
    head
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, BenchError> {
    match command {
        Command::Maximize {
            common,
            budget,
            algorithm,
            eps,
            machines,
        } => {
            let spec = single_function(&common)?;
            let mut f = instance(&spec, common.mode)?;
            let n = f.n();
            let seed = common.seed;
            let r = match algorithm {
                MaxAlgorithm::NaiveGreedy => greedy_naive(&mut f, &Constraint::Cardinality(require_k(&budget, n)?))?,
                MaxAlgorithm::LazyGreedy => greedy_lazy(&mut f, &Constraint::Cardinality(require_k(&budget, n)?))?,
                MaxAlgorithm::StochasticGreedy => greedy_stochastic(&mut f, require_k(&budget, n)?, eps, seed)?,
                MaxAlgorithm::Sieve => {
                    let mut stream: Vec<usize> = (0..n).collect();
                    stream.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                    sieve_streaming(&f, &stream, require_k(&budget, n)?, eps)?
                }
                MaxAlgorithm::Distributed => distributed_greedy(&f, require_k(&budget, n)?, machines, seed)?,
                MaxAlgorithm::LocalSearch => local_search_usm(&mut f, DEFAULT_LOCAL_SEARCH_EPS)?,
                MaxAlgorithm::Bidirectional => bidirectional_greedy(&mut f, &Permutation::identity(n))?,
                MaxAlgorithm::RandomizedGreedy => randomized_greedy(&mut f, require_k(&budget, n)?, seed)?,
                MaxAlgorithm::MmRandom => minorize_maximize(
                    &mut f,
                    &Constraint::Cardinality(require_k(&budget, n)?),
                    SigmaRule::Random(seed),
                )?,
                MaxAlgorithm::MmGreedy => minorize_maximize(
                    &mut f,
                    &Constraint::Cardinality(require_k(&budget, n)?),
                    SigmaRule::GreedyOrder,
                )?,
            };
            let name = algorithm.to_possible_value().expect("named").get_name().to_string();
            emit(
                &common,
                &with_result(header(&spec, common.mode, &name), to_value(&r)),
                out,
            )?;
            Ok(0)
        }
        Command::Minimize {
            common,
            budget,
            algorithm,
            iterations,
            eps,
            step,
            max_iterations,
        } => {
            let spec = single_function(&common)?;
            let mut f = instance(&spec, common.mode)?;
            let n = f.n();
            let r = match algorithm {
                MinAlgorithm::MinNorm => min_norm_point(
                    &mut f,
                    &MnpOptions {
                        tol: None,
                        max_iterations,
                    },
                )?,
                MinAlgorithm::Lovasz => {
                    if !(eps > 0.0 && eps < 1.0) {
                        return input_error(format!("--eps {} outside (0, 1)", eps));
                    }
                    let t = iterations.unwrap_or_else(|| lovasz_default_iterations(eps));
                    lovasz_subgradient_min(&mut f, t, step)?
                }
                MinAlgorithm::Mmin => {
                    let family = match cardinality(&budget, n)? {
                        Some(k) => MinFamily::CardinalityAtLeast(k),
                        None => MinFamily::Unconstrained,
                    };
                    mmin_constrained(&mut f, &family)?
                }
            };
            let name = algorithm.to_possible_value().expect("named").get_name().to_string();
            emit(
                &common,
                &with_result(header(&spec, common.mode, &name), to_value(&r)),
                out,
            )?;
            Ok(0)
        }
        Command::Scsc {
            common,
            g,
            bound,
            bound_frac,
            max_iterations,
        } => {
            let spec = single_function(&common)?;
            let g_spec = resolve_function(&g, &common.class)?;
            let mut f = instance(&spec, common.mode)?;
            let mut g = instance(&g_spec, common.mode)?;
            let c = match (bound, bound_frac) {
                (Some(c), _) => c,
                (None, Some(frac)) => frac * g_spec.build()?.evaluate(&(0..g.n()).collect::<Vec<_>>())?,
                (None, None) => return input_error("scsc needs --bound or --bound-frac"),
            };
            let r = scsc_solve(&mut f, &mut g, c, max_iterations)?;
            let mut head = header(&spec, common.mode, "scsc");
            head["bound"] = json!(c);
            emit(&common, &with_result(head, to_value(&r)), out)?;
            Ok(0)
        }
        Command::Scsk {
            common,
            g,
            bound,
            bound_frac,
            max_iterations,
        } => {
            let spec = single_function(&common)?;
            let g_spec = resolve_function(&g, &common.class)?;
            let mut f = instance(&spec, common.mode)?;
            let mut g = instance(&g_spec, common.mode)?;
            let b = match (bound, bound_frac) {
                (Some(b), _) => b,
                (None, Some(frac)) => frac * spec.build()?.evaluate(&(0..f.n()).collect::<Vec<_>>())?,
                (None, None) => return input_error("scsk needs --bound or --bound-frac"),
            };
            let r = scsk_solve(&mut f, &mut g, b, max_iterations)?;
            let mut head = header(&spec, common.mode, "scsk");
            head["bound"] = json!(b);
            emit(&common, &with_result(head, to_value(&r)), out)?;
            Ok(0)
        }
        Command::DsMin {
            common,
            g,
            variant,
            max_iterations,
        } => {
            let spec = single_function(&common)?;
            let g_spec = resolve_function(&g, &common.class)?;
            let mut f = instance(&spec, common.mode)?;
            let mut g = instance(&g_spec, common.mode)?;
            let v = match variant {
                VariantArg::SubSup => DsVariant::SubSup,
                VariantArg::SupSub => DsVariant::SupSub,
                VariantArg::ModMod => DsVariant::ModMod,
            };
            let r = ds_minimize(&mut f, &mut g, v, max_iterations)?;
            let name = variant.to_possible_value().expect("named").get_name().to_string();
            emit(
                &common,
                &with_result(header(&spec, common.mode, &name), to_value(&r)),
                out,
            )?;
            Ok(0)
        }
        Command::Gradients { common, budget } => {
            let spec = single_function(&common)?;
            let mut f = instance(&spec, common.mode)?;
            let n = f.n();
            let k = cardinality(&budget, n)?.unwrap_or(n.div_ceil(2));
            if k > n {
                return input_error(format!("set size {} exceeds n = {}", k, n));
            }
            let at = gradient_set(n, k, common.seed);
            let x = Subset::from_ids(n, &at)?;
            let section = |which: &str, f: &mut FunctionInstance| -> Result<Value, BenchError> {
                let before = f.counters();
                let m = match which {
                    "subgradient" => subgradient_at(f, &x, &Permutation::identity(n))?,
                    "supergradient_grow" => supergradient_grow(f, &x)?,
                    _ => supergradient_shrink(f, &x)?,
                };
                Ok(json!({
                    "offset": m.offset,
                    "weights": m.weights,
                    "counters": to_value(&(f.counters() - before)),
                }))
            };
            let mut result = json!({ "set": at });
            for which in ["subgradient", "supergradient_grow", "supergradient_shrink"] {
                result[which] = section(which, &mut f)?;
            }
            emit(
                &common,
                &with_result(header(&spec, common.mode, "gradients"), result),
                out,
            )?;
            Ok(0)
        }
        Command::Bench {
            common,
            algorithm,
            budget_frac,
            repetitions,
            timing_strict,
        } => {
            let mut functions = Vec::new();
            for arg in &common.function {
                functions.push((arg.clone(), resolve_function(arg, &common.class)?));
            }
            let modes = match common.mode {
                ModeArg::Pm => vec![OracleMode::Memoized],
                ModeArg::Vo => vec![OracleMode::ValueOracle],
                ModeArg::Both => vec![OracleMode::Memoized, OracleMode::ValueOracle],
            };
            let cfg = ExperimentConfig {
                functions,
                algorithm,
                modes,
                budgets: budget_frac,
                repetitions,
                seed: common.seed,
                timing_strict,
                threads: None,
            };
            let report = run_experiment(&cfg)?;
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
            write_report(&report, &dir)?;
            let text = match common.report {
                ReportFormat::Json => crate::experiment::report_json(&report) + "\n",
                ReportFormat::Csv => crate::experiment::report_csv(&report),
            };
            out.write_all(text.as_bytes()).map_err(|source| BenchError::Io {
                path: "<stdout>".to_string(),
                source,
            })?;
            Ok(0)
        }
        Command::Validate { common, trials } => {
            let spec = single_function(&common)?;
            let f = instance(&spec, common.mode)?;
            let checks = validate_function(&f, common.seed, trials)?;
            let mut table = format!("{:<20} {:<6} {}\n", "check", "result", "detail");
            for c in &checks {
                table.push_str(&format!("{:<20} {:<6} {}\n", c.name, c.status.label(), c.detail));
            }
            out.write_all(table.as_bytes()).map_err(|source| BenchError::Io {
                path: "<stdout>".to_string(),
                source,
            })?;
            if let Some(dir) = &common.out {
                fs::create_dir_all(dir)
                    .and_then(|_| {
                        fs::write(
                            dir.join("validate.json"),
                            serde_json::to_string_pretty(&checks).expect("json"),
                        )
                    })
                    .map_err(|source| BenchError::Io {
                        path: dir.display().to_string(),
                        source,
                    })?;
            }
            Ok(if checks.iter().any(|c| c.status == Status::Fail) {
                1
            } else {
                0
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen::<f64>() < p).collect()
}

/// The checks behind `validate`. Works on a detached copy; `f` is untouched.
pub fn validate_function(f: &FunctionInstance, seed: u64, trials: usize) -> Result<Vec<Check>, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = f.clone_detached();
    let n = g.n();
    let traits = g.traits();
    let stat_tol = g.verify_statistic().tolerance;
    let tol = |v: f64| stat_tol * v.abs().max(1.0);
    let mut checks = Vec::new();

    let empty = g.evaluate(&[])?;
    checks.push(Check {
        name: "normalization",
        status: if empty == 0.0 { Status::Pass } else { Status::Fail },
        detail: format!("f(empty) = {}", empty),
    });

    // random walk of updates, downdates and rebuilds
    let mut worst: f64 = 0.0;
    g.clear_memo();
    for _ in 0..trials {
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..10) {
            0 => g.set_memo(&random_subset(&mut rng, n, 0.5))?,
            _ if g.memo_set().contains(j) => g.downdate(j)?,
            _ => g.update(j)?,
        }
        worst = worst.max(g.verify_statistic().max_deviation);
    }
    checks.push(Check {
        name: "statistic",
        status: if worst <= stat_tol { Status::Pass } else { Status::Fail },
        detail: format!(
            "max deviation {:.3e} over {} steps (tol {:.0e})",
            worst, trials, stat_tol
        ),
    });

    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..trials {
        let p = rng.gen::<f64>();
        let x = random_subset(&mut rng, n, p);
        g.set_memo(&x)?;
        let fx = g.evaluate(&x)?;
        let j = rng.gen_range(0..n);
        let (gain, truth, scale) = if g.memo_set().contains(j) {
            let rest: Vec<usize> = x.iter().copied().filter(|&e| e != j).collect();
            (g.gain_remove(j)?, fx - g.evaluate(&rest)?, fx)
        } else {
            let mut more = x.clone();
            more.push(j);
            let fxj = g.evaluate(&more)?;
            (g.gain_add(j)?, fxj - fx, fxj)
        };
        let err = (gain - truth).abs();
        worst = worst.max(err / scale.abs().max(1.0));
        if err > tol(scale) {
            bad += 1;
        }
    }
    checks.push(Check {
        name: "oracle-equivalence",
        status: if bad == 0 { Status::Pass } else { Status::Fail },
        detail: format!("{} of {} probes off, max relative error {:.3e}", bad, trials, worst),
    });

    let mut violations = 0;
    let mut mono = 0;
    for _ in 0..trials {
        let t = random_subset(&mut rng, n, 0.5);
        let s: Vec<usize> = t.iter().copied().filter(|_| rng.gen::<bool>()).collect();
        let outside: Vec<usize> = (0..n).filter(|j| !t.contains(j)).collect();
        let Some(&j) = outside.choose(&mut rng) else { continue };
        let gain = |set: &[usize]| -> Result<f64, BenchError> {
            let mut more = set.to_vec();
            more.push(j);
            Ok(g.evaluate(&more)? - g.evaluate(set)?)
        };
        let (gs, gt) = (gain(&s)?, gain(&t)?);
        if gs < gt - tol(gt) {
            violations += 1;
        }
        if gt < -tol(gt) || gs < -tol(gs) {
            mono += 1;
        }
    }
    let audit = |claimed: bool, count: usize, what: &str| Check {
        name: if what == "submodular" {
            "submodularity"
        } else {
            "monotonicity"
        },
        status: match (claimed, count) {
            (false, _) => Status::Skip,
            (true, 0) => Status::Pass,
            _ => Status::Fail,
        },
        detail: if claimed {
            format!("{} violations in {} random probes", count, trials)
        } else {
            format!("class is not {} ({} violations observed)", what, count)
        },
    };
    checks.push(audit(traits.submodular, violations, "submodular"));
    checks.push(audit(traits.monotone, mono, "monotone"));
    Ok(checks)
}
