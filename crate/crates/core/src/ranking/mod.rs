//! Rank construction and rank-stability criteria.
//!
//! Every stability check compares the ranking of the upper rung (`top`) with
//! the ranking of the rung below it. The lower rung holds roughly `η×` more
//! configs, so it is first projected onto the configs present in `top`,
//! keeping its relative order. Positional comparisons then run over the
//! common set.
//!
//! Ties in metric are broken by completion index, earlier first. When the
//! upper rung holds fewer than two configs there is no ordering to compare
//! and every criterion reports stable.

mod criterion;
mod overlap;
mod regret;
mod soft;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::RungEntry;
use crate::resource::ConfigId;

pub use criterion::{is_stable, RankingCriterion};
pub use overlap::{is_stable_rbo, rbo};
pub use regret::{arrr, rrr};
pub use soft::{
    epsilon_mean_distance, epsilon_median_distance, epsilon_sigma, is_stable_direct, is_stable_soft, soft_rank,
    SoftRank,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub config: ConfigId,
    pub metric: f64,
    pub completion_index: u64,
}

/// Configs sorted by metric descending, ties by completion index ascending.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    items: Vec<RankedItem>,
}

impl RankedList {
    pub fn from_items(mut items: Vec<RankedItem>) -> Self {
        items.sort_by(|a, b| b.metric.total_cmp(&a.metric).then(a.completion_index.cmp(&b.completion_index)));
        Self { items }
    }

    pub fn from_entries(entries: &[RungEntry]) -> Self {
        Self::from_items(
            entries
                .iter()
                .map(|e| RankedItem { config: e.config, metric: e.metric, completion_index: e.completion_index })
                .collect(),
        )
    }

    /// Builds a list from `(config, metric)` pairs; position in the input
    /// serves as the completion index.
    pub fn from_metrics(pairs: impl IntoIterator<Item = (ConfigId, f64)>) -> Self {
        Self::from_items(
            pairs
                .into_iter()
                .enumerate()
                .map(|(i, (config, metric))| RankedItem { config, metric, completion_index: i as u64 })
                .collect(),
        )
    }

    pub fn items(&self) -> &[RankedItem] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RankedItem> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn order(&self) -> Vec<ConfigId> {
        self.items.iter().map(|i| i.config).collect()
    }

    pub fn metrics(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.metric).collect()
    }

    pub fn metric_of(&self, config: ConfigId) -> Option<f64> {
        self.items.iter().find(|i| i.config == config).map(|i| i.metric)
    }

    /// Restricts `self` to the configs present in `onto`, preserving order.
    pub fn project(&self, onto: &RankedList) -> Result<RankedList> {
        let position: HashMap<ConfigId, usize> =
            self.items.iter().enumerate().map(|(i, item)| (item.config, i)).collect();
        let mut keep = Vec::with_capacity(onto.len());
        for item in &onto.items {
            let &i = position.get(&item.config).ok_or(Error::MissingFromLowerRung(item.config))?;
            keep.push(i);
        }
        keep.sort_unstable();
        Ok(RankedList { items: keep.into_iter().map(|i| self.items[i]).collect() })
    }
}

impl<'a> IntoIterator for &'a RankedList {
    type Item = &'a RankedItem;
    type IntoIter = std::slice::Iter<'a, RankedItem>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
