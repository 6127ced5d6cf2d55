//! Timing harness: runs every (function, task, budget, mode) cell, records
//! wall time and counters, and writes `report.csv` / `report.json`.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use submemo::bounds::{subgradient_at, supergradient_grow, supergradient_shrink};
use submemo::maximize::{greedy_lazy, greedy_naive, greedy_stochastic, Constraint};
use submemo::{EvalCounters, FunctionInstance, FunctionSpec, OracleMode, Permutation, Subset};

use crate::{input_error, BenchError};

/// What a bench run measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgorithm {
    LazyGreedy,
    NaiveGreedy,
    StochasticGreedy,
    /// Subgradient plus both supergradients, each timed separately.
    Gradients,
}

/// One timed operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    LazyGreedy,
    NaiveGreedy,
    StochasticGreedy,
    Subgradient,
    SupergradientGrow,
    SupergradientShrink,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::LazyGreedy => "lazy-greedy",
            Task::NaiveGreedy => "naive-greedy",
            Task::StochasticGreedy => "stochastic-greedy",
            Task::Subgradient => "subgradient",
            Task::SupergradientGrow => "supergradient-grow",
            Task::SupergradientShrink => "supergradient-shrink",
        }
    }
}

impl BenchAlgorithm {
    pub fn tasks(self) -> Vec<Task> {
        match self {
            BenchAlgorithm::LazyGreedy => vec![Task::LazyGreedy],
            BenchAlgorithm::NaiveGreedy => vec![Task::NaiveGreedy],
            BenchAlgorithm::StochasticGreedy => vec![Task::StochasticGreedy],
            BenchAlgorithm::Gradients => vec![Task::Subgradient, Task::SupergradientGrow, Task::SupergradientShrink],
        }
    }
}

pub fn mode_label(mode: OracleMode) -> &'static str {
    match mode {
        OracleMode::Memoized => "PM",
        OracleMode::ValueOracle => "VO",
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// `(label, spec)` pairs; labels become report rows.
    pub functions: Vec<(String, FunctionSpec)>,
    pub algorithm: BenchAlgorithm,
    pub modes: Vec<OracleMode>,
    /// Budgets as fractions of `n`, each in `(0, 1]`.
    pub budgets: Vec<f64>,
    pub repetitions: usize,
    pub seed: u64,
    /// Run cells one after another instead of on the pool.
    pub timing_strict: bool,
    /// Pool size; `None` reads `SUBMEMO_THREADS`, then falls back to rayon's default.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.functions.is_empty() {
            return input_error("experiment needs at least one function");
        }
        if self.modes.is_empty() {
            return input_error("experiment needs at least one mode");
        }
        if self.budgets.is_empty() {
            return input_error("experiment needs at least one budget");
        }
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
            return input_error(format!("budget fraction {} outside (0, 1]", b));
        }
        if self.repetitions == 0 {
            return input_error("repetitions must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TimingRecord {
    pub function: String,
    pub class: String,
    pub n: usize,
    pub algorithm: String,
    pub mode: String,
    pub budget: f64,
    pub k: usize,
    pub wall_min: f64,
    pub wall_mean: f64,
    pub counters: EvalCounters,
    pub value: Option<f64>,
    pub selected: Vec<usize>,
    /// Gradient weights (empty for maximization tasks).
    pub weights: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Speedup {
    pub function: String,
    pub algorithm: String,
    pub budget: f64,
    pub pm_wall_min: f64,
    pub vo_wall_min: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub repetitions: usize,
    pub records: Vec<TimingRecord>,
    pub speedups: Vec<Speedup>,
}

/// `ceil(frac * n)`, at least 1 and at most `n`.
pub fn budget_size(frac: f64, n: usize) -> usize {
    ((frac * n as f64).ceil() as usize).clamp(1, n.max(1))
}

/// The set gradients are taken at: the first `k` elements of a seeded
/// random order, ids ascending.
pub fn gradient_set(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ids.truncate(k);
    ids.sort_unstable();
    ids
}

/// What a timed task produced.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOutcome {
    pub value: Option<f64>,
    pub selected: Vec<usize>,
    pub weights: Vec<f64>,
}

fn run_task(f: &mut FunctionInstance, task: Task, k: usize, seed: u64) -> Result<FunctionOutcome, BenchError> {
    let n = f.n();
    let at = || Subset::from_ids(n, &gradient_set(n, k, seed));
    let maximized = |r: submemo::maximize::MaximizationResult| FunctionOutcome {
        value: Some(r.value),
        selected: r.selected,
        weights: Vec::new(),
    };
    let gradient = |m: submemo::ModularFunction| FunctionOutcome {
        value: None,
        selected: Vec::new(),
        weights: m.weights,
    };
    Ok(match task {
        Task::LazyGreedy => maximized(greedy_lazy(f, &Constraint::Cardinality(k))?),
        Task::NaiveGreedy => maximized(greedy_naive(f, &Constraint::Cardinality(k))?),
        Task::StochasticGreedy => maximized(greedy_stochastic(f, k, 0.1, seed)?),
        Task::Subgradient => gradient(subgradient_at(f, &at()?, &Permutation::identity(n))?),
        Task::SupergradientGrow => gradient(supergradient_grow(f, &at()?)?),
        Task::SupergradientShrink => gradient(supergradient_shrink(f, &at()?)?),
    })
}

/// Builds the instance for `mode`, then times `repetitions` runs of `task`
/// on fresh copies (construction is not timed). The counters are those of
/// one run.
pub fn time_task(
    base: &FunctionInstance,
    task: Task,
    mode: OracleMode,
    k: usize,
    repetitions: usize,
    seed: u64,
) -> Result<(f64, f64, EvalCounters, FunctionOutcome), BenchError> {
    let proto = match mode {
        OracleMode::Memoized => base.to_memoized(),
        OracleMode::ValueOracle => base.to_memoized().to_value_oracle(),
    };
    let mut walls = Vec::with_capacity(repetitions);
    let mut last = None;
    for _ in 0..repetitions.max(1) {
        let mut f = proto.fresh();
        let t = Instant::now();
        let out = run_task(&mut f, task, k, seed)?;
        walls.push(t.elapsed().as_secs_f64());
        last = Some((f.counters(), out));
    }
    let (counters, out) = last.expect("at least one repetition");
    let min = walls.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = walls.iter().sum::<f64>() / walls.len() as f64;
    Ok((min, mean, counters, out))
}

struct Cell {
    function: usize,
    task: Task,
    budget: f64,
    mode: OracleMode,
}

fn pool_size(cfg: &ExperimentConfig) -> Option<usize> {
    cfg.threads
        .or_else(|| std::env::var("SUBMEMO_THREADS").ok()?.trim().parse().ok())
        .filter(|&t| t > 0)
}

/// Runs every cell. Solver errors are recorded in the cell, not returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, BenchError> {
    cfg.validate()?;
    // instances are single-owner, so each cell builds its own from the spec
    let mut meta = Vec::with_capacity(cfg.functions.len());
    for (_, spec) in &cfg.functions {
        let f = spec.build()?;
        meta.push((f.n(), f.class_name()));
    }
    let mut cells = Vec::new();
    for function in 0..cfg.functions.len() {
        for task in cfg.algorithm.tasks() {
            for &budget in &cfg.budgets {
                for &mode in &cfg.modes {
                    cells.push(Cell {
                        function,
                        task,
                        budget,
                        mode,
                    });
                }
            }
        }
    }
    let run_cell = |c: &Cell| {
        let (n, class) = meta[c.function];
        let k = budget_size(c.budget, n);
        let mut rec = TimingRecord {
            function: cfg.functions[c.function].0.clone(),
            class: class.to_string(),
            n,
            algorithm: c.task.name().to_string(),
            mode: mode_label(c.mode).to_string(),
            budget: c.budget,
            k,
            wall_min: f64::NAN,
            wall_mean: f64::NAN,
            counters: EvalCounters::default(),
            value: None,
            selected: Vec::new(),
            weights: Vec::new(),
            error: None,
        };
        let timed = cfg.functions[c.function]
            .1
            .build()
            .map_err(BenchError::from)
            .and_then(|base| time_task(&base, c.task, c.mode, k, cfg.repetitions, cfg.seed));
        match timed {
            Ok((min, mean, counters, out)) => {
                rec.wall_min = min;
                rec.wall_mean = mean;
                rec.counters = counters;
                rec.value = out.value;
                rec.selected = out.selected;
                rec.weights = out.weights;
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec
    };
    let records: Vec<TimingRecord> = if cfg.timing_strict {
        cells.iter().map(run_cell).collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = pool_size(cfg) {
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| BenchError::Input(format!("thread pool: {}", e)))?;
        pool.install(|| cells.par_iter().map(run_cell).collect())
    };
    let speedups = speedups(&records);
    Ok(Report {
        seed: cfg.seed,
        repetitions: cfg.repetitions,
        records,
        speedups,
    })
}

fn speedups(records: &[TimingRecord]) -> Vec<Speedup> {
    let mut out = Vec::new();
    for pm in records.iter().filter(|r| r.mode == "PM" && r.error.is_none()) {
        let vo = records.iter().find(|r| {
            r.mode == "VO"
                && r.error.is_none()
                && r.function == pm.function
                && r.algorithm == pm.algorithm
                && r.budget == pm.budget
        });
        if let Some(vo) = vo {
            out.push(Speedup {
                function: pm.function.clone(),
                algorithm: pm.algorithm.clone(),
                budget: pm.budget,
                pm_wall_min: pm.wall_min,
                vo_wall_min: vo.wall_min,
                speedup: vo.wall_min / pm.wall_min,
            });
        }
    }
    out
}

fn pct(b: f64) -> String {
    format!("{}%", (b * 1000.0).round() / 10.0)
}

/// Table layout: one row per (function, algorithm), one column per
/// (budget, mode) holding the min wall seconds, then per-budget speedups.
pub fn report_csv(report: &Report) -> String {
    let mut budgets: Vec<f64> = Vec::new();
    let mut modes: Vec<String> = Vec::new();
    let mut rows: Vec<(String, String)> = Vec::new();
    for r in &report.records {
        if !budgets.contains(&r.budget) {
            budgets.push(r.budget);
        }
        if !modes.contains(&r.mode) {
            modes.push(r.mode.clone());
        }
        let key = (r.function.clone(), r.algorithm.clone());
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["function".to_string(), "algorithm".to_string()];
    for &b in &budgets {
        for m in &modes {
            header.push(format!("{} {}", pct(b), m));
        }
    }
    let both = modes.len() == 2;
    if both {
        for &b in &budgets {
            header.push(format!("{} speedup", pct(b)));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for (function, algorithm) in &rows {
        let mut line = vec![function.clone(), algorithm.clone()];
        for &b in &budgets {
            for m in &modes {
                let cell = report
                    .records
                    .iter()
                    .find(|r| &r.function == function && &r.algorithm == algorithm && r.budget == b && &r.mode == m);
                line.push(match cell {
                    Some(r) if r.error.is_none() => format!("{:.6}", r.wall_min),
                    Some(_) => "error".to_string(),
                    None => String::new(),
                });
            }
        }
        if both {
            for &b in &budgets {
                let s = report
                    .speedups
                    .iter()
                    .find(|s| &s.function == function && &s.algorithm == algorithm && s.budget == b);
                line.push(s.map_or(String::new(), |s| format!("{:.2}", s.speedup)));
            }
        }
        w.write_record(&line).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("serializable report")
}

/// Writes `report.csv` and `report.json` into `dir` (created if missing).
pub fn write_report(report: &Report, dir: &Path) -> Result<(), BenchError> {
    let io = |source: std::io::Error| BenchError::Io {
        path: dir.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("report.csv"), report_csv(report)).map_err(io)?;
    fs::write(dir.join("report.json"), report_json(report)).map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{Kind, Synthetic};

    fn cfg(algorithm: BenchAlgorithm) -> ExperimentConfig {
        ExperimentConfig {
            functions: vec![(
                "fl".to_string(),
                Synthetic::new(Kind::FacilityLocation, 30, 1).generate().unwrap(),
            )],
            algorithm,
            modes: vec![OracleMode::Memoized, OracleMode::ValueOracle],
            budgets: vec![0.05, 0.15, 0.30],
            repetitions: 1,
            seed: 5,
            timing_strict: true,
            threads: None,
        }
    }

    #[test]
    fn table_structure_and_mode_contract() {
        let report = run_experiment(&cfg(BenchAlgorithm::LazyGreedy)).unwrap();
        assert_eq!(report.records.len(), 6);
        assert_eq!(report.speedups.len(), 3);
        for r in &report.records {
            assert!(r.error.is_none());
            if r.mode == "PM" {
                assert_eq!(r.counters.oracle_evals, 0);
            } else {
                assert_eq!(r.counters.gain_evals, 0);
            }
        }
        let csv = report_csv(&report);
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "function,algorithm,5% PM,5% VO,15% PM,15% VO,30% PM,30% VO,5% speedup,15% speedup,30% speedup"
        );
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn gradient_rows_agree_across_modes() {
        let report = run_experiment(&cfg(BenchAlgorithm::Gradients)).unwrap();
        assert_eq!(report.records.len(), 18);
        for pm in report.records.iter().filter(|r| r.mode == "PM") {
            let vo = report
                .records
                .iter()
                .find(|r| r.mode == "VO" && r.algorithm == pm.algorithm && r.budget == pm.budget)
                .unwrap();
            for (a, b) in pm.weights.iter().zip(&vo.weights) {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn bad_budgets_rejected() {
        let mut c = cfg(BenchAlgorithm::LazyGreedy);
        c.budgets = vec![0.0];
        assert!(run_experiment(&c).is_err());
        c.budgets = vec![1.5];
        assert!(run_experiment(&c).is_err());
    }
}
