//! Rank-biased overlap over two finite rankings of the same config set.
//!
//! With agreement at depth `d` defined as `A_d = |top[..d] ∩ below[..d]| / d`,
//! the score is `Σ_d w_d·A_d` with `w_d = (1 − p)·p^(d−1) / (1 − p^n)`, i.e.
//! the usual geometric weights truncated at depth `n` and renormalized.
//! For `p = 1` the weights are uniform and the score is the average overlap.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::resource::ConfigId;

use super::RankedList;

pub(crate) fn check_same_set(a: &[ConfigId], b: &[ConfigId]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::MismatchedRankings);
    }
    let sa: HashSet<_> = a.iter().collect();
    let sb: HashSet<_> = b.iter().collect();
    if sa.len() != a.len() || sa != sb {
        return Err(Error::MismatchedRankings);
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rank-biased overlap needs 0 < p <= 1, got {p}")))
    }
}

pub fn rbo(top_order: &[ConfigId], below_order: &[ConfigId], p: f64) -> Result<f64> {
    check_p(p)?;
    check_same_set(top_order, below_order)?;
    let n = top_order.len();
    if n == 0 {
        return Err(Error::MismatchedRankings);
    }

    let mut seen_top = HashSet::with_capacity(n);
    let mut seen_below = HashSet::with_capacity(n);
    let mut overlap = 0usize;
    let mut total = 0.0;
    // p^(d-1), carried along the loop.
    let mut weight_power = 1.0;
    for (d, (&a, &b)) in top_order.iter().zip(below_order).enumerate() {
        if a == b {
            overlap += 1;
        } else {
            overlap += usize::from(seen_below.contains(&a)) + usize::from(seen_top.contains(&b));
        }
        seen_top.insert(a);
        seen_below.insert(b);
        let agreement = overlap as f64 / (d + 1) as f64;
        let weight = if p < 1.0 { weight_power } else { 1.0 };
        total += weight * agreement;
        weight_power *= p;
    }

    Ok(if p < 1.0 {
        // weight_power is now p^n
        total * (1.0 - p) / (1.0 - weight_power)
    } else {
        total / n as f64
    })
}

/// Stable iff the overlap of `top` with the projected lower rung reaches
/// `threshold`.
pub fn is_stable_rbo(top: &RankedList, below: &RankedList, p: f64, threshold: f64) -> Result<bool> {
    let below = below.project(top)?;
    if top.len() < 2 {
        return Ok(true);
    }
    Ok(rbo(&top.order(), &below.order(), p)? >= threshold)
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;

    #[test]
    fn identical_lists_score_one() {
        let l = ids(&[4, 2, 7, 1]);
        for p in [0.1, 0.5, 0.9, 1.0] {
            assert!((rbo(&l, &l, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swapped_pair() {
        let a = ids(&[0, 1]);
        let b = ids(&[1, 0]);
        assert!((rbo(&a, &b, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((rbo(&a, &b, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_triple_average_overlap() {
        // A_1 = 0, A_2 = 1/2 (prefixes share the middle config), A_3 = 1
        let a = ids(&[0, 1, 2]);
        let b = ids(&[2, 1, 0]);
        assert!((rbo(&a, &b, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stability_threshold_is_inclusive() {
        let top = RankedList::from_metrics([(ConfigId(0), 0.9), (ConfigId(1), 0.8)]);
        let below = RankedList::from_metrics([(ConfigId(1), 0.9), (ConfigId(0), 0.8)]);
        assert!(is_stable_rbo(&top, &below, 1.0, 0.5).unwrap());
        assert!(is_stable_rbo(&top, &top, 0.5, 0.5).unwrap());

        let top = list(&[0.9, 0.8, 0.7]);
        let below = RankedList::from_metrics([(ConfigId(2), 0.9), (ConfigId(1), 0.8), (ConfigId(0), 0.7)]);
        assert!(is_stable_rbo(&top, &below, 1.0, 0.5).unwrap());
        assert!(!is_stable_rbo(&top, &below, 1.0, 0.51).unwrap());
    }

    #[test]
    fn mismatched_sets_are_rejected() {
        assert!(rbo(&ids(&[0, 1]), &ids(&[0, 2]), 0.5).is_err());
        assert!(rbo(&ids(&[0, 1]), &ids(&[0]), 0.5).is_err());
        assert!(rbo(&ids(&[0, 0]), &ids(&[0, 0]), 0.5).is_err());
        assert!(rbo(&ids(&[0]), &ids(&[0]), 0.0).is_err());
    }
}
