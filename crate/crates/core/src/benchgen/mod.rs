//! Synthetic tabulated benchmarks whose configuration ranking stops changing
//! after a known resource level `R*`.
//!
//! Every latent curve has the form `m_i(u) = a_i − g_i·H(u)` with a shared
//! decay `H` (normalized so `H(R*) = 1`), a per-config asymptote `a_i` and a
//! per-config deficit `g_i > 0`. For any pair the difference is monotone in
//! `H`, so two curves cross at most once. Deficits are redrawn so that the
//! values at `R*` are sorted like the asymptotes; the single crossing, if
//! any, therefore happens before `R*` and the order is frozen from `R*` on.
//!
//! Observation noise is added to the stored metrics only. Unless
//! [`CurveModel::allow_observed_crossings`] is set, a table whose noisy
//! observations still cross at or after `R*` is rejected.

mod crossings;
mod format;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resource::Direction;
use crate::simulator::{CurveRow, LearningCurveTable};

pub use crossings::{crossing_report, kendall_tau, Crossing};
pub use format::{load, read_table, save, write_table, FORMAT_MAGIC};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveFamily {
    /// `h(u) = u^(−rate)`.
    PowerLaw,
    /// `h(u) = exp(−rate·(u − 1))`.
    ExponentialSaturation,
}

impl CurveFamily {
    fn decay(self, rate: f64, u: f64) -> f64 {
        match self {
            CurveFamily::PowerLaw => u.powf(-rate),
            CurveFamily::ExponentialSaturation => (-rate * (u - 1.0)).exp(),
        }
    }
}

impl std::str::FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-law" => Ok(CurveFamily::PowerLaw),
            "exp-saturation" | "exponential-saturation" => Ok(CurveFamily::ExponentialSaturation),
            other => Err(Error::InvalidArgument(format!("unknown curve family `{other}`"))),
        }
    }
}

/// Parameters of the synthetic learning-curve distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveModel {
    pub family: CurveFamily,
    /// Shape parameter of the shared decay.
    pub rate: f64,
    /// Asymptotes are laid out on `n` strata of `[low, high]`.
    pub asymptote_range: (f64, f64),
    /// `a = low + (high − low)·q^skew`; values above 1 thin out the top.
    pub asymptote_skew: f64,
    /// Position inside each stratum: 0 puts every asymptote at the stratum
    /// midpoint, 1 draws it uniformly within the stratum.
    pub asymptote_jitter: f64,
    /// Distance below the asymptote at `u = 1`.
    pub initial_deficit: (f64, f64),
    /// Fraction of configs whose initial deficit is drawn from
    /// `initial_deficit` instead of sitting at its midpoint. Zero gives
    /// parallel curves that never cross; one gives the most crossings.
    pub crossing_rate: f64,
    pub noise_std: f64,
    /// `R*`: from this resource on the latent ranking never changes.
    pub crossing_horizon: u64,
    /// Seconds per unit, drawn once per config.
    pub unit_cost: (f64, f64),
    /// Accept tables whose noisy observations cross at or after `R*`.
    pub allow_observed_crossings: bool,
}

impl Default for CurveModel {
    fn default() -> Self {
        Self {
            family: CurveFamily::PowerLaw,
            rate: 0.5,
            asymptote_range: (0.5, 0.95),
            asymptote_skew: 1.0,
            asymptote_jitter: 1.0,
            initial_deficit: (0.1, 0.5),
            crossing_rate: 1.0,
            noise_std: 0.0,
            crossing_horizon: 5,
            unit_cost: (10.0, 60.0),
            allow_observed_crossings: false,
        }
    }
}

impl CurveModel {
    fn validate(&self, units: u64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let (lo, hi) = self.asymptote_range;
        let (dlo, dhi) = self.initial_deficit;
        let (clo, chi) = self.unit_cost;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("asymptote range ({lo}, {hi}) is not an interval"));
        }
        if !(dlo > 0.0 && dlo <= dhi && dhi.is_finite()) {
            return bad(format!("initial deficit ({dlo}, {dhi}) must be a positive interval"));
        }
        if !(clo > 0.0 && clo <= chi && chi.is_finite()) {
            return bad(format!("unit cost ({clo}, {chi}) must be a positive interval"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return bad(format!("rate must be positive, got {}", self.rate));
        }
        if !(self.asymptote_skew > 0.0 && self.asymptote_skew.is_finite()) {
            return bad(format!("asymptote skew must be positive, got {}", self.asymptote_skew));
        }
        if !(0.0..=1.0).contains(&self.asymptote_jitter) {
            return bad("asymptote jitter must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.crossing_rate) {
            return bad("crossing rate must lie in [0, 1]".into());
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise std must be non-negative, got {}", self.noise_std));
        }
        if self.crossing_horizon == 0 || self.crossing_horizon > units {
            return bad(format!("crossing horizon {} must lie in 1..={units}", self.crossing_horizon));
        }
        Ok(())
    }
}

/// Generates `n_configs` curves over `units` resource units.
///
/// Candidates are numbered `0..n_configs`. The final metric of each row is
/// the noiseless latent value at `units`.
pub fn generate(n_configs: usize, units: u64, model: &CurveModel, seed: u64) -> Result<LearningCurveTable> {
    if n_configs == 0 {
        return Err(Error::InvalidArgument("n_configs must be at least 1".into()));
    }
    model.validate(units)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_configs;

    let (lo, hi) = model.asymptote_range;
    let mut asymptotes: Vec<f64> = (0..n)
        .map(|k| {
            let offset = 0.5 + model.asymptote_jitter * (rng.random::<f64>() - 0.5);
            let q = (k as f64 + offset) / n as f64;
            lo + (hi - lo) * q.powf(model.asymptote_skew)
        })
        .collect();
    asymptotes.shuffle(&mut rng);

    let (dlo, dhi) = model.initial_deficit;
    let mid = 0.5 * (dlo + dhi);
    let deficits: Vec<f64> = (0..n)
        .map(|_| if rng.random::<f64>() < model.crossing_rate { rng.random_range(dlo..=dhi) } else { mid })
        .collect();

    // deficit at R*, then sort the values at R* into asymptote order
    let horizon = model.crossing_horizon as f64;
    let h_star = model.family.decay(model.rate, horizon);
    let mut at_horizon: Vec<f64> = asymptotes.iter().zip(&deficits).map(|(a, d)| a - d * h_star).collect();
    at_horizon.sort_by(f64::total_cmp);
    let mut by_asymptote: Vec<usize> = (0..n).collect();
    by_asymptote.sort_by(|&i, &j| asymptotes[i].total_cmp(&asymptotes[j]).then(i.cmp(&j)));
    let mut gaps = vec![0.0; n];
    for (rank, &i) in by_asymptote.iter().enumerate() {
        gaps[i] = asymptotes[i] - at_horizon[rank];
    }

    let (clo, chi) = model.unit_cost;
    let noise = Normal::new(0.0, model.noise_std).expect("validated noise std");
    let shape: Vec<f64> = (1..=units).map(|u| model.family.decay(model.rate, u as f64) / h_star).collect();

    let rows = (0..n)
        .map(|i| {
            let latent = |h: f64| asymptotes[i] - gaps[i] * h;
            let metrics = shape
                .iter()
                .map(|&h| {
                    let m = latent(h);
                    if model.noise_std > 0.0 {
                        m + noise.sample(&mut rng)
                    } else {
                        m
                    }
                })
                .collect();
            let unit_cost = rng.random_range(clo..=chi);
            CurveRow {
                candidate: i as u64,
                params: None,
                metrics,
                costs: vec![unit_cost; units as usize],
                final_metric: Some(latent(shape[units as usize - 1])),
            }
        })
        .collect();

    let table = LearningCurveTable::new("epoch", "accuracy", Direction::Maximize, rows)?;
    if !model.allow_observed_crossings {
        if let Some(c) = crossing_report(&table).into_iter().find(|c| c.last_crossing >= model.crossing_horizon) {
            return Err(Error::Infeasible(format!(
                "candidates {} and {} cross at {} units, not before R* = {}; \
                 reduce the noise or allow observed crossings",
                c.pair.0, c.pair.1, c.last_crossing, model.crossing_horizon
            )));
        }
    }
    Ok(table)
}

/// Fills candidates missing from some of the per-seed tables with the
/// element-wise mean of the tables that do have them. All tables must
/// share the same number of units.
pub fn impute_missing(tables: &mut [LearningCurveTable]) -> Result<()> {
    use std::collections::BTreeSet;

    let Some(first) = tables.first() else {
        return Ok(());
    };
    let units = first.units();
    if tables.iter().any(|t| t.units() != units) {
        return Err(Error::InvalidArgument("benchmark seeds disagree on the number of units".into()));
    }
    let all: BTreeSet<u64> = tables.iter().flat_map(|t| t.candidates()).collect();
    let mut fills: Vec<Vec<CurveRow>> = vec![Vec::new(); tables.len()];
    for &candidate in &all {
        let present: Vec<&CurveRow> = tables.iter().filter_map(|t| t.row(candidate)).collect();
        if present.len() == tables.len() {
            continue;
        }
        let k = present.len() as f64;
        let mean = |f: &dyn Fn(&CurveRow) -> &[f64]| -> Vec<f64> {
            (0..units as usize).map(|u| present.iter().map(|r| f(r)[u]).sum::<f64>() / k).collect()
        };
        let finals: Vec<f64> = present.iter().filter_map(|r| r.final_metric).collect();
        let row = CurveRow {
            candidate,
            params: present[0].params.clone(),
            metrics: mean(&|r| &r.metrics),
            costs: mean(&|r| &r.costs),
            final_metric: (finals.len() == present.len()).then(|| finals.iter().sum::<f64>() / k),
        };
        for (t, fill) in tables.iter().zip(fills.iter_mut()) {
            if t.row(candidate).is_none() {
                fill.push(row.clone());
            }
        }
    }
    for (table, fill) in tables.iter_mut().zip(fills) {
        if fill.is_empty() {
            continue;
        }
        let mut rows = table.rows().to_vec();
        rows.extend(fill);
        *table = LearningCurveTable::new(table.unit_label.clone(), table.metric_name.clone(), table.direction, rows)?;
    }
    Ok(())
}
