//! Soft ranking: configs within `ε` of the metric at a position are
//! interchangeable at that position.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::resource::ConfigId;

use super::RankedList;

/// One set of interchangeable configs per rank position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftRank {
    pub positions: Vec<BTreeSet<ConfigId>>,
}

impl SoftRank {
    pub fn contains(&self, position: usize, config: ConfigId) -> bool {
        self.positions.get(position).is_some_and(|set| set.contains(&config))
    }
}

/// `positions[i] = { c : |f(c_i) − f(c)| ≤ ε }`.
pub fn soft_rank(list: &RankedList, epsilon: f64) -> SoftRank {
    let positions = list
        .iter()
        .map(|anchor| list.iter().filter(|c| (anchor.metric - c.metric).abs() <= epsilon).map(|c| c.config).collect())
        .collect();
    SoftRank { positions }
}

/// Whether, for every rank `i`, the upper rung's config at `i` belongs to
/// the soft-rank set at `i` of the (projected) lower rung.
pub fn is_stable_soft(top: &RankedList, below: &RankedList, epsilon: f64) -> Result<bool> {
    let below = below.project(top)?;
    if top.len() < 2 {
        return Ok(true);
    }
    // Membership of c in positions[i] is |f(c_i) - f(c)| <= ε with f taken
    // from the lower rung, so the full sets never need to be built here.
    Ok(top.iter().zip(below.iter()).all(|(upper, anchor)| {
        let f = below.metric_of(upper.config).expect("projection keeps every upper config");
        (anchor.metric - f).abs() <= epsilon
    }))
}

/// Plain positional comparison, i.e. soft ranking with `ε = 0`.
pub fn is_stable_direct(top: &RankedList, below: &RankedList) -> Result<bool> {
    is_stable_soft(top, below, 0.0)
}

/// `m ×` the population standard deviation of the list's metrics.
pub fn epsilon_sigma(below: &RankedList, multiplier: f64) -> f64 {
    let n = below.len();
    if n < 2 {
        return 0.0;
    }
    // shifted by the first value so constant lists give exactly zero
    let shift = below.items()[0].metric;
    let mean = below.iter().map(|i| i.metric - shift).sum::<f64>() / n as f64;
    let var = below.iter().map(|i| (i.metric - shift - mean).powi(2)).sum::<f64>() / n as f64;
    multiplier * var.sqrt()
}

fn gaps(below: &RankedList) -> Vec<f64> {
    below.items().windows(2).map(|w| w[0].metric - w[1].metric).collect()
}

/// Mean of consecutive metric gaps in ranked order.
pub fn epsilon_mean_distance(below: &RankedList) -> f64 {
    let g = gaps(below);
    if g.is_empty() {
        return 0.0;
    }
    g.iter().sum::<f64>() / g.len() as f64
}

/// Median of consecutive metric gaps; the two middle gaps are averaged for
/// an even count.
pub fn epsilon_median_distance(below: &RankedList) -> f64 {
    let mut g = gaps(below);
    if g.is_empty() {
        return 0.0;
    }
    g.sort_by(f64::total_cmp);
    let mid = g.len() / 2;
    if g.len() % 2 == 1 {
        g[mid]
    } else {
        (g[mid - 1] + g[mid]) / 2.0
    }
}
