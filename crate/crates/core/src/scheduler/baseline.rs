use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::resource::{ConfigId, ConfigRecord};
use crate::simulator::{simulate, LearningCurveTable, SimResult};

use super::{RandomSearcher, SchedulerConfig, SchedulerMode, Searcher};

/// Runs one of the baselines: one-epoch, no-increase or random.
pub fn run_baseline(
    mode: SchedulerMode,
    table: &LearningCurveTable,
    config: &SchedulerConfig,
    workers: usize,
) -> Result<SimResult> {
    if !mode.is_baseline() {
        return Err(Error::InvalidArgument(format!("`{mode}` is not a baseline")));
    }
    let config = SchedulerConfig { mode, ..config.clone() };
    simulate(&config, table, workers)
}

/// Draws `random_draws` (default `num_configs`) candidates and picks one of
/// them uniformly. Nothing is trained, so runtime and resources are zero.
pub fn random_baseline(table: &LearningCurveTable, config: &SchedulerConfig) -> Result<SimResult> {
    config.validate()?;
    let draws = config.random_draws.unwrap_or(config.num_configs);
    if draws == 0 {
        return Err(Error::InvalidArgument("random baseline needs at least one draw".into()));
    }
    let mut searcher = RandomSearcher::new(table.candidates(), config.seed);
    let drawn = (0..draws).map(|_| searcher.draw()).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let pick = rng.random_range(0..drawn.len());
    let candidate = drawn[pick];
    let row = table.row(candidate).ok_or(Error::UnknownCandidate(candidate))?;
    Ok(SimResult {
        wall_clock: 0.0,
        chosen: ConfigRecord { id: ConfigId(pick as u32), candidate },
        chosen_metric: row.full_fidelity_metric(),
        chosen_metric_full: row.full_fidelity_metric(),
        max_resources: 0,
        jobs_executed: 0,
        resource_units: 0,
        growth_events: 0,
        final_cap: 0,
        trace: Vec::new(),
        ladder: Default::default(),
    })
}
