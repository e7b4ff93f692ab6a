//! Progressive asynchronous successive halving over tabulated learning
//! curves, with the ranking criteria that decide when to train longer and a
//! deterministic simulator to compare schedulers by wall-clock time.

pub mod benchgen;
pub mod error;
pub mod experiment;
pub mod ladder;
pub mod ranking;
pub mod resource;
pub mod scheduler;
pub mod simulator;

pub use error::{Error, Result};
pub use ladder::{RungEntry, RungLadder};
pub use ranking::{is_stable, RankedList, RankingCriterion};
pub use resource::{ConfigId, ConfigRecord, Direction, PashaState, ResourceSpec};
pub use scheduler::{run_baseline, BestConfig, Job, RungPairing, Scheduler, SchedulerConfig, SchedulerMode};
pub use simulator::{replay, simulate, LearningCurveTable, SimResult};
