//! ASHA, PASHA and the baseline schedulers behind one `get_job` / `report`
//! interface.
//!
//! The scheduler is a sequential state machine. Callers that drive it from
//! several workers must serialize calls; given the same seed and the same
//! order of calls, the issued jobs are identical.
//!
//! PASHA starts with the ladder capped at `R_0 = η²·r` and compares the
//! rankings of the two highest rungs every time a result lands in one of
//! them. If the rankings disagree under the configured criterion the cap is
//! multiplied by `η` (at most once per report), up to the safety net `R`.

mod baseline;
mod searcher;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{RungEntry, RungLadder};
use crate::ranking::{is_stable, RankingCriterion};
use crate::resource::{ConfigId, ConfigRecord, PashaState, ResourceSpec};

pub use baseline::{random_baseline, run_baseline};
pub use searcher::{draw_config, RandomSearcher, Searcher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerMode {
    Pasha,
    Asha,
    /// Every config trained at `r` only; best one selected.
    OneEpoch,
    /// PASHA with growth disabled: the ladder stays at `η²·r`.
    NoIncrease,
    /// A uniformly random pick among the drawn configs, no training.
    Random,
}

impl SchedulerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerMode::Pasha => "pasha",
            SchedulerMode::Asha => "asha",
            SchedulerMode::OneEpoch => "one-epoch",
            SchedulerMode::NoIncrease => "no-increase",
            SchedulerMode::Random => "random",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, SchedulerMode::OneEpoch | SchedulerMode::NoIncrease | SchedulerMode::Random)
    }
}

impl fmt::Display for SchedulerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pasha" => Ok(SchedulerMode::Pasha),
            "asha" => Ok(SchedulerMode::Asha),
            "one-epoch" => Ok(SchedulerMode::OneEpoch),
            "no-increase" => Ok(SchedulerMode::NoIncrease),
            "random" => Ok(SchedulerMode::Random),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Which pair of rungs PASHA compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RungPairing {
    /// The top rung `K` and `K − 1`, checked whenever a result lands in
    /// either of them.
    #[default]
    TopTwo,
    /// Rungs `K − 1` and `K − 2`, checked only when a result lands in
    /// `K − 1`.
    BelowTop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    pub resources: ResourceSpec,
    pub criterion: RankingCriterion,
    pub num_configs: usize,
    pub mode: SchedulerMode,
    pub seed: u64,
    #[serde(default)]
    pub rung_pairing: RungPairing,
    /// Draw count of the random baseline; defaults to `num_configs`.
    #[serde(default)]
    pub random_draws: Option<usize>,
}

impl SchedulerConfig {
    pub fn new(resources: ResourceSpec, mode: SchedulerMode, num_configs: usize, seed: u64) -> Self {
        Self {
            resources,
            criterion: RankingCriterion::default(),
            num_configs,
            mode,
            seed,
            rung_pairing: RungPairing::default(),
            random_draws: None,
        }
    }

    pub fn with_criterion(mut self, criterion: RankingCriterion) -> Self {
        self.criterion = criterion;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_configs == 0 {
            return Err(Error::InvalidArgument("num_configs must be at least 1".into()));
        }
        self.criterion.validate()
    }
}

/// Train `config` up to `target_resource`, the resource of rung `rung`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub config: ConfigId,
    pub rung: usize,
    pub target_resource: u64,
}

/// The selected configuration and the rung it was selected at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestConfig {
    pub config: ConfigRecord,
    pub metric: f64,
    pub rung: usize,
    pub max_resources: u64,
}

pub struct Scheduler {
    config: SchedulerConfig,
    ladder: RungLadder,
    pasha: PashaState,
    searcher: Box<dyn Searcher>,
    records: Vec<ConfigRecord>,
    in_flight: BTreeSet<(ConfigId, usize)>,
    completions: u64,
    growth_events: u32,
}

impl fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheduler")
            .field("mode", &self.config.mode)
            .field("pasha", &self.pasha)
            .field("drawn", &self.records.len())
            .field("in_flight", &self.in_flight.len())
            .finish_non_exhaustive()
    }
}

impl Scheduler {
    pub fn new(config: SchedulerConfig, searcher: Box<dyn Searcher>) -> Result<Self> {
        config.validate()?;
        if config.mode == SchedulerMode::Random {
            return Err(Error::InvalidArgument("the random baseline does not schedule jobs".into()));
        }
        let pasha = PashaState::initial(&config.resources);
        Ok(Self {
            config,
            ladder: RungLadder::new(),
            pasha,
            searcher,
            records: Vec::new(),
            in_flight: BTreeSet::new(),
            completions: 0,
            growth_events: 0,
        })
    }

    pub fn config(&self) -> &SchedulerConfig {
        &self.config
    }

    pub fn ladder(&self) -> &RungLadder {
        &self.ladder
    }

    pub fn pasha_state(&self) -> PashaState {
        self.pasha
    }

    pub fn growth_events(&self) -> u32 {
        self.growth_events
    }

    pub fn drawn(&self) -> usize {
        self.records.len()
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.len()
    }

    pub fn record(&self, config: ConfigId) -> Option<ConfigRecord> {
        self.records.get(config.index()).copied()
    }

    /// Highest rung jobs may currently target.
    pub fn top_rung(&self) -> usize {
        let spec = &self.config.resources;
        match self.config.mode {
            SchedulerMode::Pasha => self.pasha.top_rung(spec),
            SchedulerMode::Asha => spec.top_level(),
            SchedulerMode::NoIncrease => PashaState::initial(spec).top_rung(spec),
            SchedulerMode::OneEpoch | SchedulerMode::Random => 0,
        }
    }

    fn find_promotion(&self) -> Option<(usize, ConfigId)> {
        let eta = self.config.resources.reduction_factor();
        (0..self.top_rung()).rev().find_map(|k| self.ladder.promotable(k, eta).map(|c| (k, c)))
    }

    /// Next job for a free worker, or `None` when nothing is actionable
    /// until another result comes in.
    pub fn get_job(&mut self) -> Result<Option<Job>> {
        let spec = self.config.resources;
        if let Some((k, config)) = self.find_promotion() {
            self.ladder.mark_promoted(k, config);
            let job = Job { config, rung: k + 1, target_resource: spec.level_resource(k + 1) };
            self.in_flight.insert((config, job.rung));
            return Ok(Some(job));
        }
        if self.records.len() < self.config.num_configs {
            let candidate = self.searcher.draw()?;
            let id = ConfigId(self.records.len() as u32);
            self.records.push(ConfigRecord { id, candidate });
            let job = Job { config: id, rung: 0, target_resource: spec.level_resource(0) };
            self.in_flight.insert((id, 0));
            return Ok(Some(job));
        }
        Ok(None)
    }

    /// Records the result of an issued job. Returns whether PASHA grew its
    /// resource cap as a consequence.
    pub fn report(&mut self, job: &Job, metric: f64) -> Result<bool> {
        let key = (job.config, job.rung);
        if !self.in_flight.contains(&key) {
            let already = self.ladder.rung(job.rung).is_some_and(|r| r.get(job.config).is_some());
            return Err(if already {
                Error::DuplicateReport { config: job.config, rung: job.rung }
            } else {
                Error::UnknownJob { config: job.config, rung: job.rung }
            });
        }
        self.ladder.insert(
            job.rung,
            RungEntry { config: job.config, metric, promoted: false, completion_index: self.completions },
        )?;
        self.in_flight.remove(&key);
        self.completions += 1;

        if self.config.mode != SchedulerMode::Pasha {
            return Ok(false);
        }
        let top = self.top_rung();
        let compared = match self.config.rung_pairing {
            RungPairing::TopTwo if top >= 1 && job.rung + 1 >= top && job.rung <= top => Some((top, top - 1)),
            RungPairing::BelowTop if top >= 2 && job.rung + 1 == top => Some((top - 1, top - 2)),
            _ => None,
        };
        let Some((upper, lower)) = compared else {
            return Ok(false);
        };
        let stable = is_stable(&self.config.criterion, &self.ladder.ranked(upper), &self.ladder.ranked(lower))?;
        if stable {
            return Ok(false);
        }
        let grown = self.pasha.grow(&self.config.resources);
        if grown == self.pasha {
            return Ok(false);
        }
        self.pasha = grown;
        self.growth_events += 1;
        Ok(true)
    }

    /// All configs drawn, nothing in flight and nothing left to promote.
    pub fn should_stop(&self) -> bool {
        self.records.len() >= self.config.num_configs && self.in_flight.is_empty() && self.find_promotion().is_none()
    }

    /// Best config in the highest non-empty rung, ties by completion order.
    pub fn best_config(&self) -> Result<BestConfig> {
        let rung = self.ladder.highest_nonempty().ok_or(Error::EmptyLadder)?;
        let ranked = self.ladder.ranked(rung);
        let best = ranked.items()[0];
        Ok(BestConfig {
            config: self.records[best.config.index()],
            metric: best.metric,
            rung,
            max_resources: self.config.resources.level_resource(rung),
        })
    }
}
