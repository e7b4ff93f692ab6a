//! Seeded repetitions of several methods over one or more benchmark tables,
//! aggregated into mean ± std rows.

use std::io::{Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchgen::{self, CurveModel};
use crate::error::{Error, Result};
use crate::scheduler::{SchedulerConfig, SchedulerMode};
use crate::simulator::{simulate, speedup_ratio, LearningCurveTable, SimResult};

/// Runtimes at or above this many seconds are printed in hours.
const HOURS_THRESHOLD_SECONDS: f64 = 360.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    /// Row label in the report.
    pub name: String,
    /// The per-run seed is overridden by each scheduler seed.
    pub config: SchedulerConfig,
}

impl MethodSpec {
    pub fn new(name: impl Into<String>, config: SchedulerConfig) -> Self {
        Self { name: name.into(), config }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BenchmarkSource {
    /// One file per benchmark seed. Candidates missing from some files are
    /// imputed from the others.
    Files(Vec<PathBuf>),
    Generated {
        n_configs: usize,
        units: u64,
        model: CurveModel,
        seeds: Vec<u64>,
    },
    /// Already loaded tables, labelled by benchmark seed.
    Tables(Vec<(u64, LearningCurveTable)>),
}

impl BenchmarkSource {
    /// Loads or generates the tables, labelled by benchmark seed. Files are
    /// labelled by their position in the list.
    pub fn resolve(&self) -> Result<Vec<(u64, LearningCurveTable)>> {
        match self {
            BenchmarkSource::Files(paths) => {
                let mut tables = paths
                    .iter()
                    .map(|p| {
                        benchgen::load(p).map_err(|e| Error::Cell {
                            context: format!("benchmark {}", p.display()),
                            source: Box::new(e),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if tables.len() > 1 {
                    benchgen::impute_missing(&mut tables)?;
                }
                Ok((0..).zip(tables).collect())
            }
            BenchmarkSource::Generated { n_configs, units, model, seeds } => {
                seeds.iter().map(|&s| Ok((s, benchgen::generate(*n_configs, *units, model, s)?))).collect()
            }
            BenchmarkSource::Tables(tables) => Ok(tables.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub benchmark: BenchmarkSource,
    pub methods: Vec<MethodSpec>,
    pub workers: usize,
    pub scheduler_seeds: Vec<u64>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("an experiment needs at least one method".into()));
        }
        if self.scheduler_seeds.is_empty() {
            return Err(Error::InvalidArgument("an experiment needs at least one seed".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("at least one worker is required".into()));
        }
        let mut names: Vec<&str> = self.methods.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("method `{}` is listed twice", w[0])));
        }
        self.methods.iter().try_for_each(|m| m.config.validate())
    }
}

/// One simulated run, as stored in `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub mode: SchedulerMode,
    pub benchmark_seed: u64,
    pub scheduler_seed: u64,
    pub chosen_candidate: u64,
    /// Full-fidelity metric of the chosen config, in the table's orientation.
    pub metric: f64,
    pub runtime_seconds: f64,
    pub max_resources: u64,
    pub resource_units: u64,
    pub jobs: usize,
    pub growth_events: u32,
}

pub struct CellResult {
    pub record: RunRecord,
    pub sim: SimResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub metric_mean: f64,
    pub metric_std: f64,
    pub runtime_mean: f64,
    pub runtime_std: f64,
    /// Reference mean runtime over this method's mean runtime.
    pub speedup: f64,
    pub max_resources_mean: f64,
    pub max_resources_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub reference: String,
    pub methods: Vec<MethodSummary>,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown report format `{other}`"))),
        }
    }
}

/// Runs every (method, benchmark seed, scheduler seed) cell. Results are in
/// that lexicographic order regardless of scheduling.
pub fn run_cells(spec: &ExperimentSpec) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let tables = spec.benchmark.resolve()?;
    let cells: Vec<(&MethodSpec, u64, &LearningCurveTable, u64)> = spec
        .methods
        .iter()
        .flat_map(|m| {
            tables
                .iter()
                .flat_map(move |(bseed, table)| spec.scheduler_seeds.iter().map(move |&s| (m, *bseed, table, s)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(method, bseed, table, sseed)| {
            let config = method.config.clone().with_seed(sseed);
            let sim = simulate(&config, table, spec.workers).map_err(|e| Error::Cell {
                context: format!("method `{}`, benchmark seed {bseed}, scheduler seed {sseed}", method.name),
                source: Box::new(e),
            })?;
            let record = RunRecord {
                method: method.name.clone(),
                mode: config.mode,
                benchmark_seed: bseed,
                scheduler_seed: sseed,
                chosen_candidate: sim.chosen.candidate,
                metric: table.direction.denormalize(sim.chosen_metric_full),
                runtime_seconds: sim.wall_clock,
                max_resources: sim.max_resources,
                resource_units: sim.resource_units,
                jobs: sim.jobs_executed,
                growth_events: sim.growth_events,
            };
            Ok(CellResult { record, sim })
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let runs = run_cells(spec)?.into_iter().map(|c| c.record).collect();
    aggregate(runs)
}

/// `(mean, sample std)`; the std of a single value is 0.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups runs by method in order of first appearance. The reference is the
/// first ASHA method, else the first method.
pub fn aggregate(mut runs: Vec<RunRecord>) -> Result<ExperimentReport> {
    if runs.is_empty() {
        return Err(Error::InvalidArgument("no runs to aggregate".into()));
    }
    let mut order: Vec<String> = Vec::new();
    for r in &runs {
        if !order.contains(&r.method) {
            order.push(r.method.clone());
        }
    }
    let rank = |m: &str| order.iter().position(|o| o == m).expect("collected above");
    runs.sort_by(|a, b| {
        rank(&a.method)
            .cmp(&rank(&b.method))
            .then(a.benchmark_seed.cmp(&b.benchmark_seed))
            .then(a.scheduler_seed.cmp(&b.scheduler_seed))
    });
    let reference = runs
        .iter()
        .find(|r| r.mode == SchedulerMode::Asha)
        .map(|r| r.method.clone())
        .unwrap_or_else(|| order[0].clone());

    let mut methods: Vec<MethodSummary> = order
        .iter()
        .map(|name| {
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| &r.method == name).collect();
            let col = |f: fn(&RunRecord) -> f64| mine.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (metric_mean, metric_std) = mean_std(&col(|r| r.metric));
            let (runtime_mean, runtime_std) = mean_std(&col(|r| r.runtime_seconds));
            let (max_resources_mean, max_resources_std) = mean_std(&col(|r| r.max_resources as f64));
            MethodSummary {
                method: name.clone(),
                runs: mine.len(),
                metric_mean,
                metric_std,
                runtime_mean,
                runtime_std,
                speedup: 1.0,
                max_resources_mean,
                max_resources_std,
            }
        })
        .collect();
    let reference_runtime = methods[rank(&reference)].runtime_mean;
    for m in &mut methods {
        if m.method != reference {
            m.speedup = speedup_ratio(reference_runtime, m.runtime_mean);
        }
    }
    Ok(ExperimentReport { reference, methods, runs })
}

fn format_runtime(mean: f64, std: f64) -> String {
    if mean >= HOURS_THRESHOLD_SECONDS {
        format!("{:.1}h ± {:.1}h", mean / 3600.0, std / 3600.0)
    } else {
        format!("{mean:.1}s ± {std:.1}s")
    }
}

fn format_speedup(speedup: f64) -> String {
    if speedup.is_finite() {
        format!("{speedup:.1}x")
    } else {
        "--".to_owned()
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| Method | Accuracy | Runtime | Speedup factor | Max resources |\n\
                 |---|---|---|---|---|\n",
            );
            for m in &report.methods {
                out.push_str(&format!(
                    "| {} | {:.4} ± {:.4} | {} | {} | {:.1} ± {:.1} |\n",
                    m.method,
                    m.metric_mean,
                    m.metric_std,
                    format_runtime(m.runtime_mean, m.runtime_std),
                    format_speedup(m.speedup),
                    m.max_resources_mean,
                    m.max_resources_std
                ));
            }
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "method",
                "runs",
                "metric_mean",
                "metric_std",
                "runtime_seconds_mean",
                "runtime_seconds_std",
                "runtime",
                "speedup",
                "max_resources_mean",
                "max_resources_std",
            ])?;
            for m in &report.methods {
                w.write_record([
                    m.method.clone(),
                    m.runs.to_string(),
                    m.metric_mean.to_string(),
                    m.metric_std.to_string(),
                    m.runtime_mean.to_string(),
                    m.runtime_std.to_string(),
                    format_runtime(m.runtime_mean, m.runtime_std),
                    m.speedup.to_string(),
                    m.max_resources_mean.to_string(),
                    m.max_resources_std.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn write_runs<W: Write>(runs: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in runs {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}
