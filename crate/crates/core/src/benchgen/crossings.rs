use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::simulator::LearningCurveTable;

/// A pair of candidates whose relative order changes along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub pair: (u64, u64),
    /// Last unit at which the pair's order differs from its order one unit
    /// later. From `last_crossing + 1` on the order is final.
    pub last_crossing: u64,
}

/// Every pair whose order (ties included) is not constant over `1..=U`,
/// sorted by `last_crossing` descending, then by pair.
pub fn crossing_report(table: &LearningCurveTable) -> Vec<Crossing> {
    let rows = table.rows();
    let units = table.units() as usize;
    let mut out = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let order = |u: usize| a.metrics[u].total_cmp(&b.metrics[u]);
            let last = order(units - 1);
            let settled = (0..units).rev().take_while(|&u| order(u) == last).last().unwrap_or(units - 1);
            if settled > 0 {
                out.push(Crossing { pair: (a.candidate, b.candidate), last_crossing: settled as u64 });
            }
        }
    }
    out.sort_by(|x, y| y.last_crossing.cmp(&x.last_crossing).then(x.pair.cmp(&y.pair)));
    out
}

/// Kendall's tau-a between two equally long score vectors.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "score vectors differ in length");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut score = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let s = match (a[i].total_cmp(&a[j]), b[i].total_cmp(&b[j])) {
                (Ordering::Equal, _) | (_, Ordering::Equal) => 0,
                (x, y) if x == y => 1,
                _ => -1,
            };
            score += s;
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}
