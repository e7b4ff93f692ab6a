use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::soft::{epsilon_mean_distance, epsilon_median_distance, epsilon_sigma};
use super::{arrr, is_stable_rbo, is_stable_soft, rrr, RankedList};

/// How PASHA decides whether the top two rungs agree.
///
/// Textual form, as accepted by [`FromStr`]: `direct`, `soft:0.025`,
/// `soft-sigma:2`, `soft-mean-dist`, `soft-median-dist`, `rbo:p=0.5,t=0.5`,
/// `rrr:p=0.5,t=0.05`, `arrr:p=1.0,t=0.05`, `never-stable`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RankingCriterion {
    Direct,
    Soft {
        epsilon: f64,
    },
    /// `ε = m·σ` of the projected lower-rung metrics, `m ∈ {1, 2, 3}`.
    SoftSigma {
        multiplier: u32,
    },
    SoftMeanDistance,
    SoftMedianDistance,
    Rbo {
        p: f64,
        threshold: f64,
    },
    Rrr {
        p: f64,
        threshold: f64,
    },
    Arrr {
        p: f64,
        threshold: f64,
    },
    /// Reports unstable on every check, turning PASHA into ASHA.
    NeverStable,
}

impl Default for RankingCriterion {
    fn default() -> Self {
        RankingCriterion::Soft { epsilon: 0.025 }
    }
}

impl RankingCriterion {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidCriterion { spec: self.to_string(), reason: reason.to_string() });
        match *self {
            RankingCriterion::Soft { epsilon } if !(epsilon >= 0.0 && epsilon.is_finite()) => {
                bad("epsilon must be a finite non-negative number")
            }
            RankingCriterion::SoftSigma { multiplier } if !(1..=3).contains(&multiplier) => {
                bad("sigma multiplier must be 1, 2 or 3")
            }
            RankingCriterion::Rbo { p, threshold }
            | RankingCriterion::Rrr { p, threshold }
            | RankingCriterion::Arrr { p, threshold } => {
                if !(p > 0.0 && p <= 1.0) {
                    bad("p must satisfy 0 < p <= 1")
                } else if !(0.0..=1.0).contains(&threshold) {
                    bad("threshold must lie in [0, 1]")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Dispatches to the criterion-specific stability check.
///
/// RBO is stable when the score reaches the threshold, RRR and ARRR when the
/// regret does not exceed it.
pub fn is_stable(criterion: &RankingCriterion, top: &RankedList, below: &RankedList) -> Result<bool> {
    use RankingCriterion::*;
    match *criterion {
        NeverStable => {
            below.project(top)?;
            Ok(false)
        }
        Direct => is_stable_soft(top, below, 0.0),
        Soft { epsilon } => is_stable_soft(top, below, epsilon),
        SoftSigma { multiplier } => {
            let eps = epsilon_sigma(&below.project(top)?, f64::from(multiplier));
            is_stable_soft(top, below, eps)
        }
        SoftMeanDistance => {
            let eps = epsilon_mean_distance(&below.project(top)?);
            is_stable_soft(top, below, eps)
        }
        SoftMedianDistance => {
            let eps = epsilon_median_distance(&below.project(top)?);
            is_stable_soft(top, below, eps)
        }
        Rbo { p, threshold } => is_stable_rbo(top, below, p, threshold),
        Rrr { p, threshold } | Arrr { p, threshold } => {
            let projected = below.project(top)?;
            if top.len() < 2 {
                return Ok(true);
            }
            let score = if matches!(criterion, Rrr { .. }) {
                rrr(top, &projected.order(), p)?
            } else {
                arrr(top, &projected.order(), p)?
            };
            Ok(score <= threshold)
        }
    }
}

impl fmt::Display for RankingCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RankingCriterion::*;
        match self {
            Direct => write!(f, "direct"),
            Soft { epsilon } => write!(f, "soft:{epsilon:?}"),
            SoftSigma { multiplier } => write!(f, "soft-sigma:{multiplier}"),
            SoftMeanDistance => write!(f, "soft-mean-dist"),
            SoftMedianDistance => write!(f, "soft-median-dist"),
            Rbo { p, threshold } => write!(f, "rbo:p={p:?},t={threshold:?}"),
            Rrr { p, threshold } => write!(f, "rrr:p={p:?},t={threshold:?}"),
            Arrr { p, threshold } => write!(f, "arrr:p={p:?},t={threshold:?}"),
            NeverStable => write!(f, "never-stable"),
        }
    }
}

fn parse_p_t(spec: &str, args: &str) -> Result<(f64, f64)> {
    let invalid = |reason: String| Error::InvalidCriterion { spec: spec.to_string(), reason };
    let mut p = None;
    let mut t = None;
    for part in args.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| invalid(format!("expected key=value, got `{part}`")))?;
        let value: f64 = value.trim().parse().map_err(|_| invalid(format!("`{value}` is not a number")))?;
        match key.trim() {
            "p" => p = Some(value),
            "t" => t = Some(value),
            other => return Err(invalid(format!("unknown parameter `{other}`"))),
        }
    }
    match (p, t) {
        (Some(p), Some(t)) => Ok((p, t)),
        _ => Err(invalid("both p and t are required".into())),
    }
}

impl FromStr for RankingCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let invalid = |reason: &str| Error::InvalidCriterion { spec: s.to_string(), reason: reason.to_string() };
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let criterion = match (name, args) {
            ("direct", None) => RankingCriterion::Direct,
            ("never-stable", None) => RankingCriterion::NeverStable,
            ("soft-mean-dist", None) => RankingCriterion::SoftMeanDistance,
            ("soft-median-dist", None) => RankingCriterion::SoftMedianDistance,
            ("soft", Some(a)) => {
                RankingCriterion::Soft { epsilon: a.trim().parse().map_err(|_| invalid("epsilon is not a number"))? }
            }
            ("soft-sigma", Some(a)) => RankingCriterion::SoftSigma {
                multiplier: a.trim().parse().map_err(|_| invalid("multiplier must be an integer"))?,
            },
            ("rbo", Some(a)) => {
                let (p, threshold) = parse_p_t(s, a)?;
                RankingCriterion::Rbo { p, threshold }
            }
            ("rrr", Some(a)) => {
                let (p, threshold) = parse_p_t(s, a)?;
                RankingCriterion::Rrr { p, threshold }
            }
            ("arrr", Some(a)) => {
                let (p, threshold) = parse_p_t(s, a)?;
                RankingCriterion::Arrr { p, threshold }
            }
            _ => return Err(invalid("unknown criterion or wrong arguments")),
        };
        criterion.validate()?;
        Ok(criterion)
    }
}

impl TryFrom<String> for RankingCriterion {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<RankingCriterion> for String {
    fn from(value: RankingCriterion) -> Self {
        value.to_string()
    }
}
