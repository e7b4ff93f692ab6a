use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resource::Direction;

/// Tabulated learning curve of one candidate. Index `u − 1` holds the value
/// after `u` resource units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub candidate: u64,
    /// Opaque hyperparameter payload, if the source recorded one.
    pub params: Option<String>,
    /// Larger-is-better metric after each unit.
    pub metrics: Vec<f64>,
    /// Wall-clock seconds spent on each unit.
    pub costs: Vec<f64>,
    /// Re-trained full-fidelity metric used for reporting.
    pub final_metric: Option<f64>,
}

impl CurveRow {
    pub fn units(&self) -> u64 {
        self.metrics.len() as u64
    }

    /// Metric after `u` units, `1 ≤ u ≤ U`.
    pub fn metric_at(&self, u: u64) -> Option<f64> {
        if u == 0 {
            return None;
        }
        self.metrics.get(u as usize - 1).copied()
    }

    /// Seconds spent going from `from` to `to` units, i.e. units `from + 1 ..= to`.
    pub fn cost_between(&self, from: u64, to: u64) -> f64 {
        self.costs[from as usize..to as usize].iter().sum()
    }

    /// `final_metric` when recorded, else the metric at the last unit.
    pub fn full_fidelity_metric(&self) -> f64 {
        self.final_metric.unwrap_or_else(|| *self.metrics.last().expect("rows are non-empty"))
    }
}

/// Per-candidate learning curves and per-unit costs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearningCurveTable {
    pub unit_label: String,
    pub metric_name: String,
    /// Orientation of the source data. Stored values are always normalized
    /// to larger-is-better.
    pub direction: Direction,
    rows: Vec<CurveRow>,
    #[serde(skip)]
    index: HashMap<u64, usize>,
}

impl PartialEq for LearningCurveTable {
    fn eq(&self, other: &Self) -> bool {
        self.unit_label == other.unit_label
            && self.metric_name == other.metric_name
            && self.direction == other.direction
            && self.rows == other.rows
    }
}

impl LearningCurveTable {
    /// Validates and indexes the rows; they are kept sorted by candidate.
    pub fn new(
        unit_label: impl Into<String>,
        metric_name: impl Into<String>,
        direction: Direction,
        mut rows: Vec<CurveRow>,
    ) -> Result<Self> {
        let units = rows
            .first()
            .map(|r| r.metrics.len())
            .ok_or_else(|| Error::InvalidArgument("benchmark has no rows".into()))?;
        if units == 0 {
            return Err(Error::InvalidArgument("learning curves are empty".into()));
        }
        for row in &rows {
            if row.metrics.len() != units || row.costs.len() != units {
                return Err(Error::InvalidArgument(format!(
                    "candidate {} has {} metrics and {} costs, expected {units} of each",
                    row.candidate,
                    row.metrics.len(),
                    row.costs.len()
                )));
            }
            if let Some(bad) = row.metrics.iter().chain(row.final_metric.iter()).find(|m| !m.is_finite()) {
                return Err(Error::InvalidArgument(format!("candidate {} has non-finite metric {bad}", row.candidate)));
            }
            if let Some(bad) = row.costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                return Err(Error::InvalidArgument(format!("candidate {} has non-positive cost {bad}", row.candidate)));
            }
        }
        rows.sort_by_key(|r| r.candidate);
        if let Some(w) = rows.windows(2).find(|w| w[0].candidate == w[1].candidate) {
            return Err(Error::InvalidArgument(format!("candidate {} appears twice", w[0].candidate)));
        }
        let index = rows.iter().enumerate().map(|(i, r)| (r.candidate, i)).collect();
        Ok(Self { unit_label: unit_label.into(), metric_name: metric_name.into(), direction, rows, index })
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of tabulated resource units `U`.
    pub fn units(&self) -> u64 {
        self.rows[0].units()
    }

    pub fn candidates(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.candidate).collect()
    }

    pub fn row(&self, candidate: u64) -> Option<&CurveRow> {
        self.index.get(&candidate).map(|&i| &self.rows[i])
    }

    pub fn into_rows(self) -> Vec<CurveRow> {
        self.rows
    }
}
