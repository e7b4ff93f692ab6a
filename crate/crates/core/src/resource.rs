//! Resource arithmetic shared by every scheduler: configuration identities,
//! the `(r, η, R)` triple and the progressive resource cap.
//!
//! All logarithms are integer: `⌊log_η(x / r)⌋` is the largest `k` with
//! `r·η^k ≤ x`, found by repeated multiplication.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity of one drawn configuration, dense in draw order from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConfigId(pub u32);

impl ConfigId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A drawn configuration: its dense id plus the searcher's candidate key
/// (the row id when the search space is a tabulated benchmark).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub id: ConfigId,
    pub candidate: u64,
}

/// Orientation of a raw metric. Everything downstream is larger-is-better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

impl Direction {
    /// Converts a raw metric to the internal larger-is-better orientation.
    pub fn normalize(self, raw: f64) -> f64 {
        match self {
            Direction::Maximize => raw,
            Direction::Minimize => -raw,
        }
    }

    /// Inverse of [`Direction::normalize`].
    pub fn denormalize(self, value: f64) -> f64 {
        self.normalize(value)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maximize" | "max" => Ok(Direction::Maximize),
            "minimize" | "min" => Ok(Direction::Minimize),
            other => Err(Error::InvalidArgument(format!("unknown direction `{other}`"))),
        }
    }
}

/// Minimum resource `r`, reduction factor `η` and safety-net maximum `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawResourceSpec")]
pub struct ResourceSpec {
    min_resource: u64,
    reduction_factor: u64,
    max_resource: u64,
}

#[derive(Deserialize)]
struct RawResourceSpec {
    min_resource: u64,
    reduction_factor: u64,
    max_resource: u64,
}

impl TryFrom<RawResourceSpec> for ResourceSpec {
    type Error = Error;

    fn try_from(raw: RawResourceSpec) -> Result<Self> {
        Self::new(raw.min_resource, raw.reduction_factor, raw.max_resource)
    }
}

impl ResourceSpec {
    /// Requires `r ≥ 1`, `η ≥ 2` and `R ≥ η²·r`.
    pub fn new(min_resource: u64, reduction_factor: u64, max_resource: u64) -> Result<Self> {
        if min_resource == 0 {
            return Err(Error::InvalidResources("minimum resource must be at least 1".into()));
        }
        if reduction_factor < 2 {
            return Err(Error::InvalidResources(format!(
                "reduction factor must be at least 2, got {reduction_factor}"
            )));
        }
        let floor = reduction_factor
            .checked_mul(reduction_factor)
            .and_then(|sq| sq.checked_mul(min_resource))
            .ok_or_else(|| Error::InvalidResources("η²·r overflows".into()))?;
        if max_resource < floor {
            return Err(Error::InvalidResources(format!("maximum resource {max_resource} is below η²·r = {floor}")));
        }
        Ok(Self { min_resource, reduction_factor, max_resource })
    }

    pub fn min_resource(&self) -> u64 {
        self.min_resource
    }

    pub fn reduction_factor(&self) -> u64 {
        self.reduction_factor
    }

    pub fn max_resource(&self) -> u64 {
        self.max_resource
    }

    /// `⌊log_η(R / r)⌋`.
    pub fn max_power(&self) -> u32 {
        floor_log(self.max_resource, self.min_resource, self.reduction_factor)
    }

    /// Whether `R = r·η^K` for some integer `K`.
    pub fn max_is_rung_aligned(&self) -> bool {
        rung_resource(self.max_power() as usize, self) == self.max_resource
    }

    /// Index of the highest ladder level. When `R` is not of the form
    /// `r·η^K`, `R` is appended as one extra level above `r·η^⌊log_η(R/r)⌋`.
    pub fn top_level(&self) -> usize {
        let k = self.max_power() as usize;
        if self.max_is_rung_aligned() {
            k
        } else {
            k + 1
        }
    }

    /// Resource of ladder level `k`: `r·η^k`, capped at `R`.
    pub fn level_resource(&self, k: usize) -> u64 {
        rung_resource(k, self).min(self.max_resource)
    }
}

/// `r·η^k`, saturating at `u64::MAX`.
pub fn rung_resource(k: usize, spec: &ResourceSpec) -> u64 {
    let mut value = spec.min_resource;
    for _ in 0..k {
        value = value.saturating_mul(spec.reduction_factor);
    }
    value
}

/// Largest `k` with `base·η^k ≤ value`; 0 when `value < base·η`.
pub(crate) fn floor_log(value: u64, base: u64, eta: u64) -> u32 {
    let mut k = 0;
    let mut current = base;
    while let Some(next) = current.checked_mul(eta) {
        if next > value {
            break;
        }
        current = next;
        k += 1;
    }
    k
}

/// Growth counter `t`, current cap `R_t` and top index `K_t` of PASHA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PashaState {
    pub t: u32,
    pub resource_cap: u64,
    pub top_index: u32,
}

impl PashaState {
    /// `t = 0`, `R_0 = η²·r`, `K_0 = 2`.
    pub fn initial(spec: &ResourceSpec) -> Self {
        let resource_cap = rung_resource(2, spec);
        Self { t: 0, resource_cap, top_index: floor_log(resource_cap, spec.min_resource, spec.reduction_factor) }
    }

    /// One growth step: `R_{t+1} = η·R_t`, clamped to `R`. Once `R_t = R`
    /// the state no longer changes.
    pub fn grow(&self, spec: &ResourceSpec) -> Self {
        if self.resource_cap >= spec.max_resource {
            return *self;
        }
        let next = self.resource_cap.saturating_mul(spec.reduction_factor);
        let resource_cap = next.min(spec.max_resource);
        Self {
            t: self.t + 1,
            resource_cap,
            top_index: floor_log(resource_cap, spec.min_resource, spec.reduction_factor),
        }
    }

    pub fn at_safety_net(&self, spec: &ResourceSpec) -> bool {
        self.resource_cap >= spec.max_resource
    }

    /// Ladder level whose resource equals `R_t`: `K_t`, or the appended
    /// `R` level once the cap is clamped to an unaligned `R`.
    pub fn top_rung(&self, spec: &ResourceSpec) -> usize {
        let k = self.top_index as usize;
        if rung_resource(k, spec) == self.resource_cap {
            k
        } else {
            k + 1
        }
    }
}

/// Free-function form of [`PashaState::initial`].
pub fn initial_pasha_state(spec: &ResourceSpec) -> PashaState {
    PashaState::initial(spec)
}

/// Free-function form of [`PashaState::grow`].
pub fn grow(state: &PashaState, spec: &ResourceSpec) -> PashaState {
    state.grow(spec)
}
