//! Reciprocal rank regret (RRR) and its absolute variant (ARRR).
//!
//! `f` are the upper rung's metrics in the upper rung's order; `f′` are the
//! same upper-rung metrics read in the lower rung's order. The score is
//! `Σ_i w_i·(f_i − f′_i) / f_i` with `w_i = p^i / Σ_j p^j`.

use crate::error::{Error, Result};
use crate::resource::ConfigId;

use super::overlap::check_same_set;
use super::RankedList;

fn regret(top: &RankedList, below_order: &[ConfigId], p: f64, absolute: bool) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("rank regret needs 0 < p <= 1, got {p}")));
    }
    check_same_set(&top.order(), below_order)?;
    if let Some(bad) = top.iter().find(|i| i.metric <= 0.0) {
        return Err(Error::NonPositiveMetric { config: bad.config, metric: bad.metric });
    }

    let mut weight = 1.0;
    let mut weight_sum = 0.0;
    let mut total = 0.0;
    for (item, &reordered) in top.iter().zip(below_order) {
        let f = item.metric;
        let f_prime = top.metric_of(reordered).expect("same config set");
        let diff = if absolute { (f - f_prime).abs() } else { f - f_prime };
        total += weight * diff / f;
        weight_sum += weight;
        weight *= p;
    }
    Ok(total / weight_sum)
}

pub fn rrr(top: &RankedList, below_order: &[ConfigId], p: f64) -> Result<f64> {
    regret(top, below_order, p, false)
}

pub fn arrr(top: &RankedList, below_order: &[ConfigId], p: f64) -> Result<f64> {
    regret(top, below_order, p, true)
}
