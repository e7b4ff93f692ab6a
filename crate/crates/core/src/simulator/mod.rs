//! Deterministic discrete-event simulation of `W` asynchronous workers
//! running scheduler jobs against a tabulated benchmark.
//!
//! Whenever a worker is free it asks the scheduler for a job. A job that
//! promotes a config resumes from that config's last evaluated resource and
//! only pays for the additional units. Completions are processed in
//! `(time, worker)` order; after each one every idle worker is polled again
//! in index order.

mod table;
mod trace;

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::RungLadder;
use crate::resource::{ConfigId, ConfigRecord};
use crate::scheduler::{random_baseline, Job, RandomSearcher, Scheduler, SchedulerConfig, SchedulerMode};

pub use table::{CurveRow, LearningCurveTable};
pub use trace::{read_trace, write_trace, EventKind, TraceRecord, TRACE_HEADER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Latest completion time over all workers, in simulated seconds.
    pub wall_clock: f64,
    pub chosen: ConfigRecord,
    /// Metric of the chosen config at the rung it was selected from.
    pub chosen_metric: f64,
    /// Full-fidelity metric of the chosen config, looked up in the table.
    pub chosen_metric_full: f64,
    pub max_resources: u64,
    pub jobs_executed: usize,
    /// Resource units actually trained, summed over jobs.
    pub resource_units: u64,
    pub growth_events: u32,
    /// Resource of the highest rung the scheduler allowed at the end.
    pub final_cap: u64,
    pub trace: Vec<TraceRecord>,
    pub ladder: RungLadder,
}

#[derive(Debug, Clone, Copy)]
struct Completion {
    time: f64,
    worker: usize,
}

impl PartialEq for Completion {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Completion {}

impl PartialOrd for Completion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Completion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.worker.cmp(&other.worker))
    }
}

struct Running {
    job: Job,
    metric: f64,
}

struct Engine<'a> {
    table: &'a LearningCurveTable,
    scheduler: Scheduler,
    checkpoints: HashMap<ConfigId, u64>,
    workers: Vec<Option<Running>>,
    last_completion: Vec<f64>,
    queue: BinaryHeap<Reverse<Completion>>,
    trace: Vec<TraceRecord>,
    jobs: usize,
    units: u64,
}

impl Engine<'_> {
    fn start(&mut self, worker: usize, job: Job, now: f64) -> Result<()> {
        let record = self.scheduler.record(job.config).expect("scheduler issued a job for an unknown config");
        let row = self.table.row(record.candidate).ok_or(Error::UnknownCandidate(record.candidate))?;
        if job.target_resource > row.units() {
            return Err(Error::CurveTooShort {
                config: job.config,
                candidate: record.candidate,
                requested: job.target_resource,
                available: row.units(),
            });
        }
        let from = self.checkpoints.get(&job.config).copied().unwrap_or(0);
        let duration = row.cost_between(from, job.target_resource);
        let metric = row.metric_at(job.target_resource).expect("target checked against curve length");
        self.checkpoints.insert(job.config, job.target_resource);
        self.units += job.target_resource - from;
        self.jobs += 1;
        self.trace.push(TraceRecord {
            time: now,
            worker,
            config: job.config,
            rung: job.rung,
            resource: job.target_resource,
            metric: None,
            kind: EventKind::Start,
        });
        self.queue.push(Reverse(Completion { time: now + duration, worker }));
        self.workers[worker] = Some(Running { job, metric });
        Ok(())
    }

    fn poll_idle(&mut self, now: f64) -> Result<()> {
        for worker in 0..self.workers.len() {
            if self.workers[worker].is_some() {
                continue;
            }
            match self.scheduler.get_job()? {
                Some(job) => self.start(worker, job, now)?,
                None => break,
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        self.poll_idle(0.0)?;
        while let Some(Reverse(Completion { time, worker })) = self.queue.pop() {
            let Running { job, metric } = self.workers[worker].take().expect("completion for an idle worker");
            self.scheduler.report(&job, metric)?;
            self.trace.push(TraceRecord {
                time,
                worker,
                config: job.config,
                rung: job.rung,
                resource: job.target_resource,
                metric: Some(metric),
                kind: EventKind::Complete,
            });
            self.last_completion[worker] = time;
            self.poll_idle(time)?;
        }
        debug_assert!(self.scheduler.should_stop());
        Ok(())
    }
}

fn new_scheduler(config: &SchedulerConfig, table: &LearningCurveTable) -> Result<Scheduler> {
    let searcher = RandomSearcher::new(table.candidates(), config.seed);
    Scheduler::new(config.clone(), Box::new(searcher))
}

/// Runs one tuning job to completion on `workers` simulated workers.
pub fn simulate(config: &SchedulerConfig, table: &LearningCurveTable, workers: usize) -> Result<SimResult> {
    if workers == 0 {
        return Err(Error::InvalidArgument("at least one worker is required".into()));
    }
    if config.mode == SchedulerMode::Random {
        return random_baseline(table, config);
    }
    let mut engine = Engine {
        table,
        scheduler: new_scheduler(config, table)?,
        checkpoints: HashMap::new(),
        workers: (0..workers).map(|_| None).collect(),
        last_completion: vec![0.0; workers],
        queue: BinaryHeap::new(),
        trace: Vec::new(),
        jobs: 0,
        units: 0,
    };
    engine.run()?;

    let scheduler = &engine.scheduler;
    let best = scheduler.best_config()?;
    let row = table.row(best.config.candidate).ok_or(Error::UnknownCandidate(best.config.candidate))?;
    Ok(SimResult {
        wall_clock: engine.last_completion.iter().copied().fold(0.0, f64::max),
        chosen: best.config,
        chosen_metric: best.metric,
        chosen_metric_full: row.full_fidelity_metric(),
        max_resources: best.max_resources,
        jobs_executed: engine.jobs,
        resource_units: engine.units,
        growth_events: scheduler.growth_events(),
        final_cap: config.resources.level_resource(scheduler.top_rung()),
        trace: engine.trace,
        ladder: scheduler.ladder().clone(),
    })
}

/// Feeds a recorded trace through a fresh scheduler, checking that every
/// start event is exactly the job the scheduler issues at that point.
pub fn replay(config: &SchedulerConfig, table: &LearningCurveTable, trace: &[TraceRecord]) -> Result<Scheduler> {
    let mut scheduler = new_scheduler(config, table)?;
    let mut running: HashMap<ConfigId, Job> = HashMap::new();
    for (index, record) in trace.iter().enumerate() {
        let diverged = |detail: String| Error::ReplayDiverged { index, detail };
        match record.kind {
            EventKind::Start => {
                let job = scheduler.get_job()?.ok_or_else(|| diverged("scheduler had no job to issue".into()))?;
                if (job.config, job.rung, job.target_resource) != (record.config, record.rung, record.resource) {
                    return Err(diverged(format!(
                        "scheduler issued config {} rung {} but the trace starts config {} rung {}",
                        job.config, job.rung, record.config, record.rung
                    )));
                }
                running.insert(job.config, job);
            }
            EventKind::Complete => {
                let job = running
                    .remove(&record.config)
                    .ok_or_else(|| diverged(format!("config {} was not running", record.config)))?;
                let metric = record.metric.ok_or_else(|| diverged("completion without a metric".into()))?;
                scheduler.report(&job, metric)?;
            }
        }
    }
    Ok(scheduler)
}

/// `reference / candidate`; infinite when the candidate took no time.
pub fn speedup_ratio(reference_seconds: f64, candidate_seconds: f64) -> f64 {
    if candidate_seconds <= 0.0 {
        f64::INFINITY
    } else {
        reference_seconds / candidate_seconds
    }
}

pub fn speedup(reference: &SimResult, candidate: &SimResult) -> f64 {
    speedup_ratio(reference.wall_clock, candidate.wall_clock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::{Direction, ResourceSpec};

    /// Candidate `i` has metric `(i + 1)·u / 100` at unit `u` and costs 1 s per unit.
    fn ladder_table(n: u64, units: usize) -> LearningCurveTable {
        let rows = (0..n)
            .map(|i| CurveRow {
                candidate: i,
                params: None,
                metrics: (1..=units).map(|u| (i + 1) as f64 * u as f64 / 100.0).collect(),
                costs: vec![1.0; units],
                final_metric: None,
            })
            .collect();
        LearningCurveTable::new("epoch", "acc", Direction::Maximize, rows).unwrap()
    }

    #[test]
    fn one_epoch_on_three_workers_takes_one_second() {
        let spec = ResourceSpec::new(1, 3, 9).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::OneEpoch, 3, 1);
        let result = simulate(&config, &ladder_table(3, 9), 3).unwrap();
        assert_eq!(result.wall_clock, 1.0);
        assert_eq!(result.jobs_executed, 3);
        assert_eq!(result.chosen.candidate, 2);
        assert_eq!(result.max_resources, 1);
    }

    #[test]
    fn single_worker_serializes_all_costs() {
        let spec = ResourceSpec::new(1, 3, 9).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::Asha, 9, 4);
        let result = simulate(&config, &ladder_table(9, 9), 1).unwrap();
        assert_eq!(result.wall_clock, result.resource_units as f64);
        assert_eq!(result.chosen.candidate, 8);
        assert_eq!(result.max_resources, 9);
    }

    #[test]
    fn short_curves_are_reported() {
        let spec = ResourceSpec::new(1, 3, 9).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::Asha, 9, 0);
        match simulate(&config, &ladder_table(9, 5), 2) {
            Err(Error::CurveTooShort { requested, available, .. }) => {
                assert_eq!((requested, available), (9, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn replay_reproduces_the_ladder() {
        let spec = ResourceSpec::new(1, 3, 27).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::Pasha, 27, 5);
        let table = ladder_table(30, 27);
        let result = simulate(&config, &table, 4).unwrap();
        let replayed = replay(&config, &table, &result.trace).unwrap();
        assert_eq!(replayed.ladder(), &result.ladder);
        assert!(replayed.should_stop());
    }

    #[test]
    fn replay_detects_tampering() {
        let spec = ResourceSpec::new(1, 3, 9).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::Asha, 9, 5);
        let table = ladder_table(9, 9);
        let mut trace = simulate(&config, &table, 2).unwrap().trace;
        trace[0].config = ConfigId(7);
        assert!(matches!(replay(&config, &table, &trace), Err(Error::ReplayDiverged { index: 0, .. })));
    }

    #[test]
    fn speedup_examples() {
        assert_eq!(speedup_ratio(3.0, 3.0), 1.0);
        assert!((speedup_ratio(3.0, 2.3) - 1.3).abs() < 0.01);
        assert!(speedup_ratio(3.0, 0.0).is_infinite());
    }

    #[test]
    fn zero_workers_is_an_error() {
        let spec = ResourceSpec::new(1, 3, 9).unwrap();
        let config = SchedulerConfig::new(spec, SchedulerMode::Asha, 9, 5);
        assert!(simulate(&config, &ladder_table(9, 9), 0).is_err());
    }
}
