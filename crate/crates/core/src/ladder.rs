//! Rung levels of a successive-halving ladder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::RankedList;
use crate::resource::ConfigId;

/// One completed evaluation of a config at a rung.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungEntry {
    pub config: ConfigId,
    /// Larger is better.
    pub metric: f64,
    pub promoted: bool,
    /// Global completion counter, used to break metric ties.
    pub completion_index: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    entries: Vec<RungEntry>,
}

impl Rung {
    pub fn entries(&self) -> &[RungEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, config: ConfigId) -> Option<&RungEntry> {
        self.entries.iter().find(|e| e.config == config)
    }

    pub fn ranked(&self) -> RankedList {
        RankedList::from_entries(&self.entries)
    }
}

/// Ordered rung levels `k = 0, 1, 2, …`; level `k` trains to `r·η^k`.
///
/// A config present at rung `k > 0` is present and promoted at rung `k − 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RungLadder {
    rungs: Vec<Rung>,
}

impl RungLadder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rungs(&self) -> &[Rung] {
        &self.rungs
    }

    /// Rung `k`, or `None` if nothing was ever recorded at that level.
    pub fn rung(&self, k: usize) -> Option<&Rung> {
        self.rungs.get(k)
    }

    pub fn rung_len(&self, k: usize) -> usize {
        self.rungs.get(k).map_or(0, Rung::len)
    }

    pub fn ranked(&self, k: usize) -> RankedList {
        self.rungs.get(k).map(Rung::ranked).unwrap_or_default()
    }

    pub fn highest_nonempty(&self) -> Option<usize> {
        self.rungs.iter().rposition(|r| !r.is_empty())
    }

    pub fn total_entries(&self) -> usize {
        self.rungs.iter().map(Rung::len).sum()
    }

    /// Records a completed evaluation.
    pub fn insert(&mut self, k: usize, entry: RungEntry) -> Result<()> {
        if !entry.metric.is_finite() {
            return Err(Error::NonFiniteMetric { config: entry.config, metric: entry.metric });
        }
        if k > 0 {
            let promoted_below = self.rungs.get(k - 1).and_then(|r| r.get(entry.config)).is_some_and(|e| e.promoted);
            if !promoted_below {
                return Err(Error::UnknownJob { config: entry.config, rung: k });
            }
        }
        if self.rungs.len() <= k {
            self.rungs.resize_with(k + 1, Rung::default);
        }
        let rung = &mut self.rungs[k];
        if rung.get(entry.config).is_some() {
            return Err(Error::DuplicateReport { config: entry.config, rung: k });
        }
        rung.entries.push(RungEntry { promoted: false, ..entry });
        Ok(())
    }

    pub(crate) fn mark_promoted(&mut self, k: usize, config: ConfigId) {
        if let Some(e) = self.rungs[k].entries.iter_mut().find(|e| e.config == config) {
            e.promoted = true;
        }
    }

    /// First not-yet-promoted config among the top `⌊|rung k| / η⌋` of rung `k`.
    pub fn promotable(&self, k: usize, reduction_factor: u64) -> Option<ConfigId> {
        let rung = self.rungs.get(k)?;
        let quota = rung.len() / reduction_factor as usize;
        if quota == 0 {
            return None;
        }
        rung.ranked().iter().take(quota).map(|item| item.config).find(|&c| rung.get(c).is_some_and(|e| !e.promoted))
    }
}
