//! Deterministic checkpoint-selection strategies.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::distribution::{CheckpointPlan, FaultDistribution, SavingsReport};
use crate::error::{Error, Result};

mod dp;
mod exhaustive;
mod uniform;

pub use dp::{dp_placement, DpTables};
pub use exhaustive::{
    exhaustive_placement, exhaustive_placement_with_budget, DEFAULT_ENUMERATION_BUDGET,
};
pub use uniform::{snapped_uniform_placement, uniform_placement, uniform_times};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Uniform,
    UniformSnapped,
    Dp,
    Exhaustive,
    Genetic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Uniform => "uniform",
            Method::UniformSnapped => "uniform-snapped",
            Method::Dp => "dp",
            Method::Exhaustive => "exhaustive",
            Method::Genetic => "genetic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => Method::Uniform,
            "uniform-snapped" => Method::UniformSnapped,
            "dp" => Method::Dp,
            "exhaustive" => Method::Exhaustive,
            "genetic" => Method::Genetic,
            other => return Err(Error::Parameter(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PlacementResult {
    pub method: Method,
    /// The `k` the caller asked for.
    pub requested_k: usize,
    pub plan: CheckpointPlan,
    pub report: SavingsReport,
    pub elapsed: Duration,
}

impl PlacementResult {
    pub(crate) fn new(
        d: &FaultDistribution,
        method: Method,
        requested_k: usize,
        plan: CheckpointPlan,
        elapsed: Duration,
    ) -> Self {
        let report = d
            .savings(&plan)
            .expect("placement strategies only emit in-range plans");
        PlacementResult {
            method,
            requested_k,
            plan,
            report,
            elapsed,
        }
    }

    /// True when fewer checkpoints than requested were placed.
    pub fn truncated(&self) -> bool {
        self.plan.len() < self.requested_k
    }

    pub fn summary(&self) -> PlacementSummary {
        PlacementSummary {
            method: self.method,
            k: self.requested_k,
            plan: self.plan.times().to_vec(),
            saved: self.report.saved,
            baseline: self.report.baseline,
            reduction: self.report.reduction,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// JSON shape of a placement result.
#[derive(Debug, Clone, Serialize)]
pub struct PlacementSummary {
    pub method: Method,
    pub k: usize,
    pub plan: Vec<u64>,
    pub saved: u64,
    pub baseline: u64,
    pub reduction: f64,
    pub elapsed_ms: f64,
}
